#include <gtest/gtest.h>

#include "aotransistor/io.hpp"

using namespace aotx;

namespace {

const SimulationConfig& standard() {
  static const SimulationConfig c = parse_config(std::string(AOTX_CONFIG_DIR) + "/rb87_standard.yaml");
  return c;
}

const TransistorModel& standard_model() {
  static const TransistorModel m = standard().model();
  return m;
}

ScenarioConfig at_zero(ControlField c, PowerCase p, bool on) {
  return scenario_config(standard().base, c, p, on, SweepGrid{0.0, 0.0, 1});
}

Spectrum one_point(double T, double D) {
  SpectrumPoint p;
  p.T = T;
  p.D = D;
  return Spectrum{{p}};
}

}  // namespace

TEST(SwitchMetrics, LogarithmArithmetic) {
  const SwitchMetrics m = switch_metrics(one_point(0.95, 1e-3), one_point(9.5e-4, 0.9));
  EXPECT_NEAR(m.through_contrast_db, 30.0, 1e-12);
  EXPECT_NEAR(m.through_loss_db, 0.2227639471, 1e-9);
  EXPECT_NEAR(m.drop_contrast_db, 10.0 * std::log10(900.0), 1e-12);
  EXPECT_NEAR(m.drop_loss_db, -10.0 * std::log10(0.9), 1e-12);
  EXPECT_EQ(m.evaluated_at, 0.0);
}

TEST(SwitchMetrics, IdenticalSpectraGiveZeroContrast) {
  const SwitchMetrics m = switch_metrics(one_point(0.4, 0.5), one_point(0.4, 0.5));
  EXPECT_EQ(m.through_contrast_db, 0.0);
  EXPECT_EQ(m.drop_contrast_db, 0.0);
}

TEST(SwitchMetrics, ZeroDenominatorIsFlaggedInfinite) {
  const SwitchMetrics m = switch_metrics(one_point(0.9, 0.0), one_point(0.0, 0.9));
  EXPECT_TRUE(std::isinf(m.through_contrast_db));
  EXPECT_TRUE(m.through_contrast_infinite);
  EXPECT_TRUE(m.drop_contrast_infinite);
}

TEST(SwitchMetrics, GridErrors) {
  Spectrum a = one_point(0.5, 0.5), b = one_point(0.5, 0.5);
  b.points[0].delta = 1.0;
  EXPECT_THROW(switch_metrics(a, b), InvalidParameter);
  a.points[0].delta = 1.0;
  EXPECT_THROW(switch_metrics(a, b), InvalidParameter);
  EXPECT_THROW(switch_metrics(a, Spectrum{}), InvalidParameter);
}

TEST(SweepGrid, PointsAndCentre) {
  const SweepGrid g{-3.0, 3.0, 7};
  const auto p = g.points();
  ASSERT_EQ(p.size(), 7u);
  EXPECT_EQ(p[3], 0.0);
  EXPECT_EQ(p.front(), -3.0);
  EXPECT_EQ(p.back(), 3.0);
  EXPECT_EQ((SweepGrid{-1.0, 2.0, 2}.points().size()), 2u);
  EXPECT_THROW((SweepGrid{1.0, 1.0, 3}.points()), InvalidParameter);
}

TEST(ScenarioConfig, PowerRatioFollowsFieldAssignment) {
  const BaseScenario b;
  const SweepGrid g{0.0, 0.0, 1};
  EXPECT_DOUBLE_EQ(scenario_config(b, ControlField::field1_795, PowerCase::weak_control, true, g).power_ratio(), 0.1);
  EXPECT_DOUBLE_EQ(scenario_config(b, ControlField::field2_780, PowerCase::weak_control, true, g).power_ratio(), 10.0);
  EXPECT_DOUBLE_EQ(scenario_config(b, ControlField::field2_780, PowerCase::equal, true, g).power_ratio(), 1.0);
  ScenarioConfig bad = scenario_config(b, ControlField::field1_795, PowerCase::equal, true, g);
  bad.p_control = -1.0;
  EXPECT_THROW(bad.validate(), InvalidParameter);
}

TEST(Simulation, VacuumReproducesBareCavity) {
  TransistorModel m = standard_model();
  m.vapor.density_N = 0.0;
  for (ControlField cf : {ControlField::field1_795, ControlField::field2_780}) {
    ScenarioConfig sc = scenario_config(standard().base, cf, PowerCase::equal, true, standard().sweep_grid(m, cf));
    sc.sweep.n_points = 9;
    const Spectrum s = sweep_spectrum(m, sc);
    ASSERT_EQ(s.points.size(), 9u);
    const CavityParams c = m.cavity_for(signal_probe(cf));
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto& p = s.points[i];
      EXPECT_EQ(p.kappa_e, 0.0);
      const KappaSet k = bare_kappas(c, p.delta);
      EXPECT_NEAR(p.T, through_transmission(k), 1e-12);
      EXPECT_NEAR(p.D, drop_transmission(k), 1e-12);
      EXPECT_DOUBLE_EQ(p.T, s.points[s.points.size() - 1 - i].T);
      EXPECT_DOUBLE_EQ(p.D, s.points[s.points.size() - 1 - i].D);
    }
  }
}

TEST(Simulation, TwoPointSweep) {
  TransistorModel m = standard_model();
  m.vapor.density_N = 0.0;
  ScenarioConfig sc = at_zero(ControlField::field1_795, PowerCase::equal, false);
  sc.sweep = SweepGrid{-1e9, 1e9, 2};
  EXPECT_EQ(sweep_spectrum(m, sc).points.size(), 2u);
}

TEST(Simulation, EitTransparencyLimit) {
  TransistorModel m = standard_model();
  m.scheme.gamma_gg = 0.0;
  const SpectrumPoint p = simulate_point(m, at_zero(ControlField::field2_780, PowerCase::equal, false), 0.0);
  const KappaSet k = bare_kappas(m.cavity_for(Probe::field1));
  EXPECT_LT(p.kappa_e, 1e-6 * k.kappa_0);
  EXPECT_NEAR(p.D, drop_transmission(k), 1e-6);
}

TEST(Simulation, EitBeamOffClosesTheDropPath) {
  TransistorModel m = standard_model();
  ScenarioConfig sc = at_zero(ControlField::field1_795, PowerCase::equal, false);
  sc.p_eit = 0.0;
  EXPECT_LT(simulate_point(m, sc, 0.0).D, 0.5);
}

TEST(Simulation, ControlEngagesSwitching) {
  const SpectrumPoint on = simulate_point(standard_model(), at_zero(ControlField::field1_795, PowerCase::equal, true), 0.0);
  EXPECT_GE(on.T, 0.9);
  EXPECT_GE(on.kappa_e, on.signal_kappas.kappa_1);
}

TEST(Simulation, FixedPointInsensitiveToDamping) {
  std::vector<double> signal;
  for (double beta : {0.3, 0.5, 0.7}) {
    TransistorModel m = standard_model();
    m.fixed_point.damping = beta;
    m.fixed_point.tolerance = 1e-9;
    m.fixed_point.max_iterations = 2000;
    const SpectrumPoint p = simulate_point(m, at_zero(ControlField::field1_795, PowerCase::equal, true), 0.0);
    signal.push_back(p.signal_intensity);
    EXPECT_NEAR(p.control_intensity / simulate_point(standard_model(), at_zero(ControlField::field1_795, PowerCase::equal, true), 0.0).control_intensity, 1.0, 1e-5);
  }
  EXPECT_NEAR(signal[0] / signal[1], 1.0, 1e-5);
  EXPECT_NEAR(signal[2] / signal[1], 1.0, 1e-5);
}

TEST(Simulation, ErrorsCarryDetuning) {
  TransistorModel m = standard_model();
  m.fixed_point.max_iterations = 1;
  try {
    simulate_point(m, at_zero(ControlField::field1_795, PowerCase::equal, true), 123.0);
    FAIL() << "expected SimulationError";
  } catch (const SimulationError& e) {
    EXPECT_EQ(e.delta, 123.0);
  }
}

TEST(Sweep, AbortKeepsPartialResults) {
  TransistorModel m = standard_model();
  m.fixed_point.max_iterations = 1;
  ScenarioConfig sc = at_zero(ControlField::field1_795, PowerCase::equal, true);
  sc.sweep = SweepGrid{-1e9, 1e9, 5};
  try {
    sweep_spectrum(m, sc);
    FAIL() << "expected SweepAborted";
  } catch (const SweepAborted& e) {
    EXPECT_LT(e.partial.points.size(), 5u);
  }
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  ScenarioConfig sc = at_zero(ControlField::field2_780, PowerCase::equal, true);
  sc.sweep = standard().sweep_grid(standard_model(), ControlField::field2_780);
  sc.sweep.n_points = 5;
  const Spectrum a = sweep_spectrum(standard_model(), sc, 1);
  const Spectrum b = sweep_spectrum(standard_model(), sc, 3);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].T, b.points[i].T);
    EXPECT_EQ(a.points[i].D, b.points[i].D);
    EXPECT_EQ(a.points[i].fp_iterations, b.points[i].fp_iterations);
  }
}

// Control off: a through-port dip centred on resonance with rising shoulders.
TEST(Sweep, ControlOffThroughDip) {
  ScenarioConfig sc = at_zero(ControlField::field1_795, PowerCase::equal, false);
  sc.sweep = standard().sweep_grid(standard_model(), ControlField::field1_795);
  sc.sweep.n_points = 41;
  const Spectrum s = sweep_spectrum(standard_model(), sc);
  EXPECT_NO_THROW(s.validate());
  const std::size_t mid = 20;
  EXPECT_EQ(s.points[mid].delta, 0.0);
  for (std::size_t i = 0; i < mid; ++i) {
    EXPECT_GE(s.points[i].T, s.points[i + 1].T);
    EXPECT_LE(s.points[i].D, s.points[i + 1].D);
    EXPECT_GE(s.points[mid + i + 1].T, s.points[mid + i].T);
  }
  EXPECT_GT(s.points.front().T, 0.9);
  EXPECT_LT(s.points[mid].T, 1e-2);
}

TEST(Scenarios, FourLabelledRows) {
  const auto rows = run_scenarios(standard_model(), standard().base);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].control_label, "795 nm Control");
  EXPECT_EQ(rows[0].column_label, "Equal Power");
  EXPECT_EQ(rows[1].column_label, "Weak Control");
  EXPECT_EQ(rows[2].control_label, "780 nm Control");
  EXPECT_DOUBLE_EQ(rows[1].power_ratio, 0.1);
  EXPECT_DOUBLE_EQ(rows[3].power_ratio, 10.0);
  for (const auto& r : rows) {
    EXPECT_GE(r.metrics.drop_loss_db, 0.0);
    EXPECT_GE(r.metrics.through_loss_db, 0.0);
    EXPECT_GE(r.metrics.drop_contrast_db, 0.0);
    EXPECT_GT(r.tau_s, 0.0);
    EXPECT_TRUE(r.audit.ok());
  }
}
