#include <gtest/gtest.h>

#include <fstream>

#include "aotransistor/io.hpp"

using namespace aotx;

namespace {

std::string line_data() { return std::string(AOTX_DATA_DIR) + "/rb87_lines.yaml"; }

std::string minimal(const std::string& extra_atom = "", const std::string& extra = "") {
  return "atom:\n"
         "  line_data: " + line_data() + "\n"
         "  density_per_cm3: 1.0e12\n"
         "  temperature_K: 300\n"
         "  gamma_gg_Hz: 1.0e4\n" + extra_atom +
         "cavity:\n"
         "  q_factor: 1.0e6\n"
         "  q_interpretation: loaded\n"
         "  overcoupling: 30\n"
         "  mode_area_m2: 2.5e-13\n"
         "  round_trip_length_m: 9.42e-5\n"
         "  group_index: 2\n"
         "  evanescent_fraction: 0.2\n"
         "fields:\n"
         "  signal_power_W: 1.0e-11\n"
         "  eit_power_W: 1.0e-5\n"
         "  eit_beam_diameter_m: 1.0e-4\n"
         "  weak_control_fraction: 0.1\n" + extra;
}

std::string error_of(const std::string& text) {
  try {
    parse_config_string(text, "test.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(LineData, Rb87File) {
  const LineData ld = load_line_data(line_data());
  EXPECT_NEAR(ld.d1.wavelength, 794.978851e-9, 1e-15);
  EXPECT_NEAR(ld.d2.wavelength, 780.241209e-9, 1e-15);
  EXPECT_NEAR(ld.d1.gamma / (2.0 * constants::pi), 5.75e6, 1e2);
  EXPECT_NEAR(ld.d2.gamma / (2.0 * constants::pi), 6.0666e6, 1e2);
  EXPECT_NEAR(ld.mass, 1.443160648e-25, 1e-33);
  EXPECT_NE(ld.crc32, 0u);
  EXPECT_FALSE(ld.source.empty());
}

TEST(LineData, DipolesAreRadiativelyConsistent) {
  const LineData ld = load_line_data(line_data());
  for (const auto& l : {ld.d1, ld.d2}) {
    const double w = 2.0 * constants::pi * constants::c / l.wavelength;
    const double d2 = 3.0 * constants::pi * constants::epsilon0 * constants::hbar * std::pow(constants::c, 3) * l.gamma /
                      (w * w * w);
    EXPECT_NEAR(l.dipole / std::sqrt(d2), 1.0, 1e-4);
  }
}

TEST(Config, MinimalParsesWithDefaults) {
  const SimulationConfig c = parse_config_string(minimal());
  EXPECT_DOUBLE_EQ(c.vapor.density_N, 1e18);
  EXPECT_DOUBLE_EQ(c.scheme.gamma_21, 0.5 * c.lines.d1.gamma);
  EXPECT_DOUBLE_EQ(c.scheme.gamma_43, c.lines.d2.gamma);
  EXPECT_NEAR(c.scheme.gamma_gg, 2.0 * constants::pi * 1e4, 1e-9);
  EXPECT_EQ(c.scheme.gamma_14_rule, Gamma14Rule::excited_only);
  EXPECT_EQ(c.scheme.ground_dephasing, GroundDephasing::lindblad);
  EXPECT_NEAR(c.eit_beam_area, constants::pi * 0.25e-8, 1e-20);
  EXPECT_EQ(c.sweep_points, 201);
  EXPECT_DOUBLE_EQ(c.sweep_span_kappa, 5.0);
  EXPECT_EQ(c.solver.rule, QuadratureRule::resolved);
  EXPECT_EQ(c.solver.eit_doppler, EitDoppler::raman_locked);
  EXPECT_DOUBLE_EQ(c.solver.fixed_point.damping, 0.5);
  EXPECT_DOUBLE_EQ(c.solver.fixed_point.tolerance, 1e-6);
  EXPECT_EQ(c.solver.fixed_point.max_iterations, 200);
  EXPECT_EQ(c.output.directory, "out");
  EXPECT_EQ(c.profile.samples.size(), 1u);
}

TEST(Config, KappaZeroConflictsWithQ) {
  const std::string e = error_of(minimal() + "");
  EXPECT_EQ(e, "");
  std::string text = minimal();
  text.replace(text.find("  q_factor"), 0, "  kappa_0_rad_per_s: 4.0e7\n");
  EXPECT_NE(error_of(text).find("conflict"), std::string::npos);
}

TEST(Config, NegativeDensityNamesField) {
  std::string text = minimal();
  text.replace(text.find("1.0e12"), 6, "-1.0e12");
  const std::string e = error_of(text);
  EXPECT_NE(e.find("density"), std::string::npos);
  EXPECT_NE(e.find("test.yaml:3"), std::string::npos);
}

TEST(Config, UnknownKeyIsRejectedWithLine) {
  const std::string e = error_of(minimal("  temprature_K: 300\n"));
  EXPECT_NE(e.find("unknown key 'atom.temprature_K'"), std::string::npos);
  EXPECT_NE(e.find("test.yaml:6"), std::string::npos);
}

TEST(Config, UnitMismatchIsNamed) {
  const std::string e = error_of(minimal("", "sweep:\n  n_points: 11\n  delta_min_Hz: -1\n"));
  EXPECT_NE(e.find("unknown key 'sweep.delta_min_Hz'"), std::string::npos);
  EXPECT_NE(e.find("unit mismatch"), std::string::npos);
}

TEST(Config, MissingSectionAndKey) {
  EXPECT_NE(error_of("atom:\n  temperature_K: 300\n").find("missing required section"), std::string::npos);
  std::string text = minimal();
  text.erase(text.find("  temperature_K: 300\n"), 20);
  EXPECT_NE(error_of(text).find("atom.temperature_K"), std::string::npos);
  EXPECT_NE(error_of(minimal() + "extras:\n  a: 1\n").find("unknown section"), std::string::npos);
}

TEST(Config, AlternativeUnitsScale) {
  std::string text = minimal();
  text.replace(text.find("mode_area_m2: 2.5e-13"), 21, "mode_area_um2: 0.25");
  const SimulationConfig c = parse_config_string(text);
  EXPECT_NEAR(c.cavity.mode_area, 2.5e-13, 1e-25);
  std::string both = minimal("  density_per_m3: 1e18\n");
  EXPECT_NE(error_of(both).find("conflicts"), std::string::npos);
}

TEST(Config, SolverAndSweepOverrides) {
  const SimulationConfig c = parse_config_string(minimal(
      "", "solver:\n  quadrature: gauss_hermite\n  quadrature_nodes: 32\n  eit_doppler: unshifted\n  damping: 0.3\n"
          "sweep:\n  delta_min_rad_per_s: -1.0e10\n  delta_max_rad_per_s: 1.0e10\n  n_points: 11\n"));
  EXPECT_EQ(c.solver.rule, QuadratureRule::gauss_hermite);
  EXPECT_EQ(c.quadrature().size(), 32u);
  EXPECT_EQ(c.solver.eit_doppler, EitDoppler::unshifted);
  const SweepGrid g = c.sweep_grid(c.model(), ControlField::field1_795);
  EXPECT_EQ(g.delta_min, -1e10);
  EXPECT_EQ(g.n_points, 11);
  EXPECT_NE(error_of(minimal("", "sweep:\n  n_points: 1\n")).find("n_points"), std::string::npos);
  EXPECT_NE(error_of(minimal("", "solver:\n  damping: 1.5\n")).find("damping"), std::string::npos);
}

TEST(Config, ResolvedConfigRoundTrips) {
  const SimulationConfig a = parse_config_string(minimal("  gamma_14_rule: summed\n  ground_dephasing: coherence_only\n"));
  const nlohmann::json j = resolved_config(a);
  const SimulationConfig b = parse_config_string(j.dump(), "resolved.json");
  EXPECT_EQ(resolved_config(b), j);
  EXPECT_EQ(b.scheme.gamma_14_rule, Gamma14Rule::summed);
  EXPECT_EQ(b.scheme.ground_dephasing, GroundDephasing::coherence_only);
  EXPECT_DOUBLE_EQ(b.eit_beam_area, a.eit_beam_area);
}

TEST(Config, LineDataChecksumIsEnforcedOnReplay) {
  nlohmann::json j = resolved_config(parse_config_string(minimal()));
  j["atom"]["line_data_crc32"] = 12345u;
  EXPECT_NE(error_of(j.dump()).find("checksum"), std::string::npos);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(parse_config("/nonexistent/config.yaml"), ConfigError);
}

TEST(ModeProfile, FileIsNormalized) {
  const std::string path = ::testing::TempDir() + "/profile.csv";
  {
    std::ofstream out(path);
    out << "# two-zone profile\nrelative_intensity,weight\n2.0,1\n1.0,3\n";
  }
  const ModeProfile p = load_mode_profile(path);
  ASSERT_EQ(p.samples.size(), 2u);
  EXPECT_NO_THROW(p.validate());
  EXPECT_NEAR(p.samples[0].relative_intensity, 2.0 / 1.25, 1e-12);
  EXPECT_NEAR(p.samples[1].weight, 0.75, 1e-15);
  {
    std::ofstream out(path);
    out << "1.0\n";
  }
  EXPECT_THROW(load_mode_profile(path), ConfigError);
}

TEST(Validation, FreshSuitePassesWithResiduals) {
  const ValidationReport r = run_validation();
  EXPECT_TRUE(r.all_pass()) << r.text();
  EXPECT_GE(r.checks.size(), 6u);
  EXPECT_NE(r.text().find("residual"), std::string::npos);
}

// A damping model that drops the |2> -> |3> branch from gamma_12.
TEST(Validation, CorruptedGamma12IsCaughtByLineshapeCheck) {
  const CoherenceRateFn corrupt = [](const LevelScheme& s) {
    CoherenceRates r = s.coherence_rates();
    r.g12 = 0.5 * s.gamma_21;
    return r;
  };
  const ValidationReport r = run_validation(corrupt);
  EXPECT_FALSE(r.all_pass());
  bool named = false;
  for (const auto& c : r.checks)
    if (c.name == "eit_lineshape_width") named = !c.pass;
  EXPECT_TRUE(named) << r.text();
}
