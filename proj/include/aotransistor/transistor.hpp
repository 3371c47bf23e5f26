#pragma once

// Control-on / control-off scenarios of the resonator transistor: staged
// buildup of control and signal, detuning sweeps of the signal's port
// transmissions, and the contrast / insertion-loss figures of merit.

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "aotransistor/cavity.hpp"
#include "aotransistor/quantum_core.hpp"
#include "aotransistor/vapor.hpp"

namespace aotx {

enum class ControlField { field1_795, field2_780 };

inline const char* to_string(ControlField c) { return c == ControlField::field1_795 ? "795" : "780"; }

inline Probe control_probe(ControlField c) { return c == ControlField::field1_795 ? Probe::field1 : Probe::field2; }
inline Probe signal_probe(ControlField c) { return c == ControlField::field1_795 ? Probe::field2 : Probe::field1; }

/// Physical model shared by every scenario.
struct TransistorModel {
  LevelScheme scheme;
  VaporParams vapor;
  CavityParams cavity;  // lambda_cavity is replaced by each field's wavelength
  ModeProfile profile;
  DopplerQuadrature quadrature;
  EitDoppler eit_doppler = EitDoppler::unshifted;
  double eit_beam_area = 0;   // m^2, top-hat area of the free-space EIT beam
  double delta_c = 0;         // EIT detuning
  double atomic_delta_1 = 0;  // field detunings from the atomic lines at cavity resonance
  double atomic_delta_2 = 0;
  FixedPointOptions fixed_point;
  double seed_fraction = 1e-6;

  CavityParams cavity_for(Probe p) const {
    CavityParams c = cavity;
    c.lambda_cavity = p == Probe::field1 ? vapor.lambda_1 : vapor.lambda_2;
    return c;
  }

  double eit_rabi(double p_eit) const {
    if (!(eit_beam_area > 0.0)) throw InvalidParameter("TransistorModel: EIT beam area must be positive");
    return rabi_from_intensity(p_eit / eit_beam_area, vapor.dipole_c);
  }

  /// Numerical-zero threshold for alpha: 1e-9 of the resonant two-level value.
  double alpha_floor() const {
    const double lam = std::max(vapor.lambda_1, vapor.lambda_2);
    return 1e-9 * vapor.density_N * 3.0 * lam * lam / (2.0 * constants::pi);
  }

  void validate() const {
    scheme.validate();
    vapor.validate();
    cavity_for(Probe::field1).validate();
    profile.validate();
    quadrature.validate();
    if (!(eit_beam_area > 0.0)) throw InvalidParameter("TransistorModel: EIT beam area must be positive");
  }
};

struct SweepGrid {
  double delta_min = 0, delta_max = 0;  // rad/s
  int n_points = 201;

  std::vector<double> points() const {
    if (n_points < 1) throw InvalidParameter("SweepGrid: n_points must be >= 1");
    if (n_points == 1) return {delta_min};
    if (!(delta_max > delta_min)) throw InvalidParameter("SweepGrid: delta_max must exceed delta_min");
    std::vector<double> out(static_cast<std::size_t>(n_points));
    const double step = (delta_max - delta_min) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) {
      out[static_cast<std::size_t>(i)] = delta_min + i * step;
    }
    // Snap the centre of a symmetric grid to exactly zero.
    if (n_points % 2 == 1 && std::abs(delta_min + delta_max) <= 1e-12 * (delta_max - delta_min))
      out[static_cast<std::size_t>(n_points / 2)] = 0.0;
    return out;
  }
};

struct ScenarioConfig {
  ControlField control_field = ControlField::field1_795;
  double p_control = 0;  // W
  double p_signal = 0;   // W
  double p_eit = 0;      // W
  SweepGrid sweep;
  bool control_on = true;

  /// P1/P2 with field 1 = 795 nm and field 2 = 780 nm.
  double power_ratio() const {
    return control_field == ControlField::field1_795 ? p_control / p_signal : p_signal / p_control;
  }

  void validate() const {
    for (double p : {p_control, p_signal, p_eit})
      if (!std::isfinite(p) || p < 0.0) throw InvalidParameter("ScenarioConfig: powers must be >= 0");
    if (!(p_signal > 0.0)) throw InvalidParameter("ScenarioConfig: signal power must be positive");
    if (sweep.n_points < 1) throw InvalidParameter("ScenarioConfig: sweep needs at least one point");
  }
};

struct SpectrumPoint {
  double delta = 0;
  double T = 0, D = 0;
  double kappa_e = 0;    // signal
  double alpha_bar = 0;  // signal
  int fp_iterations = 0;
  // diagnostics
  double signal_intensity = 0, control_intensity = 0;
  double control_kappa_e = 0;
  double control_T = std::numeric_limits<double>::quiet_NaN();
  double control_D = std::numeric_limits<double>::quiet_NaN();
  KappaSet signal_kappas;
};

struct Spectrum {
  std::vector<SpectrumPoint> points;

  void validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      if (p.T < 0.0 || p.D < 0.0 || p.T + p.D > 1.0 + 1e-12)
        throw InvalidParameter("Spectrum: transmission outside [0,1] at point " + std::to_string(i));
      if (i > 0 && !(p.delta > points[i - 1].delta))
        throw InvalidParameter("Spectrum: detunings must be strictly increasing");
    }
  }
};

class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, double delta) : Error(what), delta(delta) {}
  double delta;
};

class SweepAborted : public Error {
 public:
  SweepAborted(const std::string& what, Spectrum partial) : Error(what), partial(std::move(partial)) {}
  Spectrum partial;  // points completed before the failure, in grid order
};

/// `audit`, when given, records every atomic state solved for this point.
inline SpectrumPoint simulate_point(const TransistorModel& m, const ScenarioConfig& cfg, double delta,
                                    StateAudit* audit = nullptr) {
  cfg.validate();
  const Probe sig = signal_probe(cfg.control_field);
  const Probe ctl = control_probe(cfg.control_field);
  const double p_ctl = cfg.control_on ? cfg.p_control : 0.0;
  const double omega_c = m.eit_rabi(cfg.p_eit);

  IntracavityProblem pb;
  pb.cavity_1 = m.cavity_for(Probe::field1);
  pb.cavity_2 = m.cavity_for(Probe::field2);
  pb.p_in_1 = sig == Probe::field1 ? cfg.p_signal : p_ctl;
  pb.p_in_2 = sig == Probe::field2 ? cfg.p_signal : p_ctl;
  pb.delta_1 = sig == Probe::field1 ? delta : 0.0;
  pb.delta_2 = sig == Probe::field2 ? delta : 0.0;
  pb.first_field = ctl;
  pb.seed_fraction = m.seed_fraction;
  pb.alpha_floor = m.alpha_floor();
  pb.fixed_point = m.fixed_point;

  // The swept laser is detuned from the co-resonant cavity and atomic line alike.
  DriveSet base;
  base.omega_c = omega_c;
  base.delta_c = m.delta_c;
  base.delta_1 = m.atomic_delta_1 + pb.delta_1;
  base.delta_2 = m.atomic_delta_2 + pb.delta_2;
  DopplerOptions dopt;
  dopt.eit = m.eit_doppler;
  dopt.audit = audit;
  pb.absorption = [&](double i1, double i2) {
    return profile_average(
        [&](double a, double b) {
          DriveSet d = base;
          d.omega_1 = rabi_from_intensity(a, m.vapor.dipole_1);
          d.omega_2 = rabi_from_intensity(b, m.vapor.dipole_2);
          return doppler_average(d, m.scheme, m.vapor, m.quadrature, dopt);
        },
        m.profile, i1, i2);
  };

  IntracavityState st;
  try {
    st = self_consistent_intensities(pb);
  } catch (const std::exception& e) {
    throw SimulationError(std::string(e.what()) + " [delta = " + std::to_string(delta) + " rad/s]", delta);
  }

  SpectrumPoint pt;
  pt.delta = delta;
  pt.fp_iterations = st.iterations;
  const CavityParams sc = m.cavity_for(sig);
  KappaSet k = bare_kappas(sc, delta);
  k.kappa_e = sig == Probe::field1 ? st.kappa_e_1 : st.kappa_e_2;
  pt.signal_kappas = k;
  pt.kappa_e = k.kappa_e;
  pt.alpha_bar = std::max(0.0, sig == Probe::field1 ? st.alpha_1 : st.alpha_2);
  pt.T = through_transmission(k);
  pt.D = drop_transmission(k);
  pt.signal_intensity = sig == Probe::field1 ? st.intensity_1 : st.intensity_2;
  pt.control_intensity = ctl == Probe::field1 ? st.intensity_1 : st.intensity_2;
  pt.control_kappa_e = ctl == Probe::field1 ? st.kappa_e_1 : st.kappa_e_2;
  if (p_ctl > 0.0) {
    KappaSet kc = bare_kappas(m.cavity_for(ctl), 0.0);
    kc.kappa_e = pt.control_kappa_e;
    pt.control_T = through_transmission(kc);
    pt.control_D = drop_transmission(kc);
  }
  return pt;
}

/// Runs fn(i) for i in [0, n) on `threads` workers. Results must be written
/// to pre-sized storage indexed by i; the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const auto workers = static_cast<std::size_t>(threads) < n ? static_cast<std::size_t>(threads) : n;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline Spectrum sweep_spectrum(const TransistorModel& m, const ScenarioConfig& cfg, int threads = 1) {
  cfg.validate();
  const std::vector<double> grid = cfg.sweep.points();
  std::vector<SpectrumPoint> pts(grid.size());
  std::vector<char> done(grid.size(), 0);
  try {
    parallel_for(grid.size(), threads, [&](std::size_t i) {
      pts[i] = simulate_point(m, cfg, grid[i]);
      done[i] = 1;
    });
  } catch (const std::exception& e) {
    Spectrum partial;
    for (std::size_t i = 0; i < grid.size() && done[i]; ++i) partial.points.push_back(pts[i]);
    throw SweepAborted(e.what(), std::move(partial));
  }
  return Spectrum{std::move(pts)};
}

struct SwitchMetrics {
  double drop_contrast_db = 0, through_contrast_db = 0;
  double drop_loss_db = 0, through_loss_db = 0;
  double evaluated_at = 0;
  bool drop_contrast_infinite = false, through_contrast_infinite = false;
};

namespace detail {
inline double contrast_db(double num, double den, bool& infinite) {
  if (num == 0.0 || den == 0.0) {
    infinite = num != den;
    return infinite ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return std::abs(10.0 * std::log10(num / den));
}
inline double loss_db(double t) {
  if (t <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, -10.0 * std::log10(t));
}
}  // namespace detail

/// ON = control present (signal routed to the through port),
/// OFF = control absent (signal routed to the drop port). Evaluated at delta = 0.
inline SwitchMetrics switch_metrics(const Spectrum& on, const Spectrum& off) {
  if (on.points.size() != off.points.size()) throw InvalidParameter("switch_metrics: spectra grids differ");
  std::size_t zero = on.points.size();
  for (std::size_t i = 0; i < on.points.size(); ++i) {
    if (on.points[i].delta != off.points[i].delta) throw InvalidParameter("switch_metrics: spectra grids differ");
    if (on.points[i].delta == 0.0) zero = i;
  }
  if (zero == on.points.size()) throw InvalidParameter("switch_metrics: grid does not contain delta = 0");
  const SpectrumPoint& a = on.points[zero];
  const SpectrumPoint& b = off.points[zero];
  SwitchMetrics m;
  m.evaluated_at = 0.0;
  m.through_contrast_db = detail::contrast_db(a.T, b.T, m.through_contrast_infinite);
  m.drop_contrast_db = detail::contrast_db(b.D, a.D, m.drop_contrast_infinite);
  m.through_loss_db = detail::loss_db(a.T);
  m.drop_loss_db = detail::loss_db(b.D);
  return m;
}

enum class PowerCase { equal, weak_control };

struct ScenarioRow {
  std::string name;           // machine label, e.g. "795_control_equal"
  std::string control_label;  // "795 nm Control"
  std::string column_label;   // "Equal Power" / "Weak Control"
  ControlField control = ControlField::field1_795;
  PowerCase power_case = PowerCase::equal;
  double power_ratio = 1;     // P1/P2
  SwitchMetrics metrics;
  SpectrumPoint on, off;      // delta = 0 points
  double tau_s = 0, settle_s = 0;
  double photons = 0;            // signal photons in the cavity, control off
  double signal_intensity = 0;   // W/m^2, control off
  int fp_iterations = 0;
  StateAudit audit;
};

struct BaseScenario {
  double p_signal = 10e-12;
  double p_eit = 10e-6;
  double weak_control_fraction = 0.1;  // P_control / P_signal in the weak-control rows
};

inline std::string scenario_name(ControlField c, PowerCase p) {
  return std::string(to_string(c)) + "_control_" + (p == PowerCase::equal ? "equal" : "weak");
}

inline ScenarioConfig scenario_config(const BaseScenario& base, ControlField c, PowerCase p, bool control_on,
                                      const SweepGrid& sweep) {
  ScenarioConfig cfg;
  cfg.control_field = c;
  cfg.p_signal = base.p_signal;
  cfg.p_control = p == PowerCase::equal ? base.p_signal : base.weak_control_fraction * base.p_signal;
  cfg.p_eit = base.p_eit;
  cfg.control_on = control_on;
  cfg.sweep = sweep;
  return cfg;
}

/// The four-row table: {795, 780 control} x {equal, weak control}, each
/// with the control on and off at delta = 0.
inline std::vector<ScenarioRow> run_scenarios(const TransistorModel& m, const BaseScenario& base, int threads = 1) {
  m.validate();
  const ControlField controls[2] = {ControlField::field1_795, ControlField::field2_780};
  const PowerCase cases[2] = {PowerCase::equal, PowerCase::weak_control};
  std::vector<ScenarioRow> rows;
  for (ControlField c : controls)
    for (PowerCase p : cases) {
      ScenarioRow r;
      r.name = scenario_name(c, p);
      r.control_label = std::string(to_string(c)) + " nm Control";
      r.column_label = p == PowerCase::equal ? "Equal Power" : "Weak Control";
      r.control = c;
      r.power_case = p;
      rows.push_back(r);
    }
  SweepGrid at_zero{0.0, 0.0, 1};
  std::vector<SpectrumPoint> results(rows.size() * 2);
  std::vector<StateAudit> audits(results.size());
  parallel_for(results.size(), threads, [&](std::size_t job) {
    const ScenarioRow& r = rows[job / 2];
    const bool on = job % 2 == 0;
    results[job] =
        simulate_point(m, scenario_config(base, r.control, r.power_case, on, at_zero), 0.0, &audits[job]);
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ScenarioRow& r = rows[i];
    r.on = results[2 * i];
    r.off = results[2 * i + 1];
    r.power_ratio = scenario_config(base, r.control, r.power_case, true, at_zero).power_ratio();
    r.metrics = switch_metrics(Spectrum{{r.on}}, Spectrum{{r.off}});
    const SwitchingTime t_off = switching_time(r.off.signal_kappas);
    const SwitchingTime t_on = switching_time(r.on.signal_kappas);
    r.tau_s = std::max(t_off.tau, t_on.tau);
    r.settle_s = std::max(t_off.settle, t_on.settle);
    const Probe sig = signal_probe(r.control);
    const double lambda = sig == Probe::field1 ? m.vapor.lambda_1 : m.vapor.lambda_2;
    const CavityParams sc = m.cavity_for(sig);
    const double energy = r.off.signal_intensity * sc.group_index * sc.round_trip_length * sc.mode_area / constants::c;
    r.photons = photon_number(energy, lambda);
    r.signal_intensity = r.off.signal_intensity;
    r.fp_iterations = r.on.fp_iterations + r.off.fp_iterations;
    r.audit = audits[2 * i];
    r.audit.merge(audits[2 * i + 1]);
  }
  return rows;
}

}  // namespace aotx
