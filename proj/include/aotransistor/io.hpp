#pragma once

// Output writers, run manifests, the analytic validation suite and the
// spectrum / metrics / validate commands behind the CLI.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aotransistor/config.hpp"

namespace aotx {

inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kSpectrumHeader = "delta_rad_s,T,D,kappa_e_rad_s,alpha_bar_per_m,fp_iterations";
inline constexpr const char* kMetricsHeader =
    "scenario,drop_contrast_db,through_contrast_db,drop_loss_db,through_loss_db,tau_s,photons";

inline std::string spectrum_csv(const Spectrum& s) {
  std::string out = std::string(kSpectrumHeader) + "\n";
  for (const auto& p : s.points) {
    out += format_g17(p.delta) + "," + format_g17(p.T) + "," + format_g17(p.D) + "," + format_g17(p.kappa_e) + "," +
           format_g17(p.alpha_bar) + "," + std::to_string(p.fp_iterations) + "\n";
  }
  return out;
}

inline std::string metrics_csv(const std::vector<ScenarioRow>& rows) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out += r.name + "," + format_g17(m.drop_contrast_db) + "," + format_g17(m.through_contrast_db) + "," +
           format_g17(m.drop_loss_db) + "," + format_g17(m.through_loss_db) + "," + format_g17(r.tau_s) + "," +
           format_g17(r.photons) + "\n";
  }
  return out;
}

/// Two tables (one per control wavelength) with Equal Power / Weak Control columns.
inline std::string metrics_text(const std::vector<ScenarioRow>& rows, const std::string& manifest_name) {
  std::ostringstream os;
  char buf[160];
  auto find = [&](ControlField c, PowerCase p) -> const ScenarioRow* {
    for (const auto& r : rows)
      if (r.control == c && r.power_case == p) return &r;
    return nullptr;
  };
  for (ControlField c : {ControlField::field1_795, ControlField::field2_780}) {
    const ScenarioRow* eq = find(c, PowerCase::equal);
    const ScenarioRow* wk = find(c, PowerCase::weak_control);
    if (!eq || !wk) continue;
    os << "Performance Results - " << to_string(c) << " nm Control\n";
    std::snprintf(buf, sizeof buf, "%-24s%16s%16s\n", "", "Equal Power", "Weak Control");
    os << buf;
    auto line = [&](const char* label, double a, double b) {
      std::snprintf(buf, sizeof buf, "%-24s%13.1f dB%13.1f dB\n", label, a, b);
      os << buf;
    };
    auto line2 = [&](const char* label, double a, double b) {
      std::snprintf(buf, sizeof buf, "%-24s%13.2f dB%13.2f dB\n", label, a, b);
      os << buf;
    };
    line("Drop Port Contrast", eq->metrics.drop_contrast_db, wk->metrics.drop_contrast_db);
    line("Through Port Contrast", eq->metrics.through_contrast_db, wk->metrics.through_contrast_db);
    line2("Drop Port Loss", eq->metrics.drop_loss_db, wk->metrics.drop_loss_db);
    line2("Through Port Loss", eq->metrics.through_loss_db, wk->metrics.through_loss_db);
    std::snprintf(buf, sizeof buf, "%-24s%13.1f ps%13.1f ps\n", "Switching time (tau)", eq->tau_s * 1e12,
                  wk->tau_s * 1e12);
    os << buf;
    std::snprintf(buf, sizeof buf, "%-24s%16.3g%16.3g\n", "Signal photons (off)", eq->photons, wk->photons);
    os << buf;
    std::snprintf(buf, sizeof buf, "%-24s%11.2f W/cm2%11.2f W/cm2\n", "Signal intensity (off)",
                  eq->signal_intensity * 1e-4, wk->signal_intensity * 1e-4);
    os << buf << "\n";
  }
  os << "manifest: " << manifest_name << "\n";
  return os.str();
}

inline void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

inline nlohmann::json audit_json(const StateAudit& a) {
  return {{"states", a.states},
          {"max_hermiticity_error", a.max_hermiticity_error},
          {"max_trace_error", a.max_trace_error},
          {"min_eigenvalue", a.min_eigenvalue},
          {"ok", a.ok()}};
}

/// Manifest skeleton shared by every command. Wall-clock time is kept in a
/// separate timing file so that the manifest itself is reproducible.
inline nlohmann::json base_manifest(const SimulationConfig& c, const std::string& command) {
  nlohmann::json m;
  m["tool"] = "aotx";
  m["tool_version"] = kToolVersion;
  m["command"] = command;
  m["resolved_config"] = resolved_config(c);
  m["line_data"] = {{"path", fs::absolute(c.lines.path).lexically_normal().string()},
                    {"crc32", c.lines.crc32},
                    {"source", c.lines.source}};
  m["q_interpretation"] = c.cavity.kappa_0_override ? "kappa_0_override" : to_string(c.cavity.q_interpretation);
  m["quadrature_nodes_used"] = c.quadrature().size();
  m["timing_file"] = "timing.json";
  m["errors"] = nlohmann::json::array();
  return m;
}

struct CommandResult {
  int exit_code = 0;
  std::vector<std::string> files;  // written, in order
  std::vector<ScenarioRow> rows;   // metrics only
};

struct RunOptions {
  std::string output_dir;  // empty: config's output.directory
  int threads = 1;
};

namespace detail {

inline fs::path prepare_output(const SimulationConfig& c, const RunOptions& o) {
  fs::path dir = o.output_dir.empty() ? fs::path(c.output.directory) : fs::path(o.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

inline void finish_run(const fs::path& dir, nlohmann::json& manifest, CommandResult& res,
                       std::chrono::steady_clock::time_point start, int threads) {
  std::vector<std::string> names;
  for (const auto& f : res.files) names.push_back(fs::path(f).filename().string());
  manifest["outputs"] = names;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  res.files.push_back((dir / "manifest.json").string());
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  nlohmann::json timing = {{"wall_clock_s", wall}, {"threads", threads}, {"manifest", "manifest.json"}};
  write_file(dir / "timing.json", timing.dump(2) + "\n");
  res.files.push_back((dir / "timing.json").string());
}

}  // namespace detail

inline CommandResult cmd_metrics(const SimulationConfig& c, const RunOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = detail::prepare_output(c, o);
  nlohmann::json manifest = base_manifest(c, "metrics");
  CommandResult res;
  try {
    const TransistorModel model = c.model();
    res.rows = run_scenarios(model, c.base, o.threads);
    nlohmann::json stats = nlohmann::json::array();
    for (const auto& r : res.rows) {
      stats.push_back({{"scenario", r.name},
                       {"power_ratio_P1_P2", r.power_ratio},
                       {"fp_iterations", r.fp_iterations},
                       {"drop_contrast_infinite", r.metrics.drop_contrast_infinite},
                       {"through_contrast_infinite", r.metrics.through_contrast_infinite},
                       {"T_on", r.on.T}, {"T_off", r.off.T}, {"D_on", r.on.D}, {"D_off", r.off.D},
                       {"settle_s", r.settle_s},
                       {"signal_intensity_W_per_m2", r.signal_intensity},
                       {"atomic_states", audit_json(r.audit)}});
    }
    manifest["scenarios"] = stats;
    if (c.output.csv) {
      write_file(dir / "metrics.csv", metrics_csv(res.rows));
      res.files.push_back((dir / "metrics.csv").string());
    }
    if (c.output.text) {
      write_file(dir / "metrics.txt", metrics_text(res.rows, "manifest.json"));
      res.files.push_back((dir / "metrics.txt").string());
    }
  } catch (const Error& e) {
    manifest["errors"].push_back(e.what());
    res.exit_code = 1;
  }
  detail::finish_run(dir, manifest, res, start, o.threads);
  return res;
}

inline CommandResult cmd_spectrum(const SimulationConfig& c, const RunOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = detail::prepare_output(c, o);
  nlohmann::json manifest = base_manifest(c, "spectrum");
  CommandResult res;
  nlohmann::json stats = nlohmann::json::array();
  try {
    const TransistorModel model = c.model();
    for (ControlField cf : {ControlField::field1_795, ControlField::field2_780})
      for (PowerCase pc : {PowerCase::equal, PowerCase::weak_control})
        for (bool on : {true, false}) {
          const std::string name = scenario_name(cf, pc) + (on ? "_on" : "_off");
          const ScenarioConfig sc = scenario_config(c.base, cf, pc, on, c.sweep_grid(model, cf));
          const fs::path file = dir / ("spectrum_" + name + ".csv");
          Spectrum s;
          try {
            s = sweep_spectrum(model, sc, o.threads);
          } catch (const SweepAborted& e) {
            write_file(file, spectrum_csv(e.partial));
            res.files.push_back(file.string());
            manifest["errors"].push_back(name + ": " + e.what());
            res.exit_code = 1;
            stats.push_back({{"scenario", name}, {"points", e.partial.points.size()}, {"complete", false}});
            continue;
          }
          long iters = 0;
          for (const auto& p : s.points) iters += p.fp_iterations;
          stats.push_back({{"scenario", name},
                           {"points", s.points.size()},
                           {"complete", true},
                           {"power_ratio_P1_P2", sc.power_ratio()},
                           {"fp_iterations_total", iters}});
          if (c.output.csv) {
            write_file(file, spectrum_csv(s));
            res.files.push_back(file.string());
          }
        }
  } catch (const Error& e) {
    manifest["errors"].push_back(e.what());
    res.exit_code = 1;
  }
  manifest["scenarios"] = stats;
  detail::finish_run(dir, manifest, res, start, o.threads);
  return res;
}

// ---------------------------------------------------------------------------
// Analytic validation suite

struct ValidationCheck {
  std::string name;
  double residual = 0;
  double tolerance = 0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }
  std::string text() const {
    std::ostringstream os;
    char buf[200];
    for (const auto& c : checks) {
      std::snprintf(buf, sizeof buf, "%s  %-32s residual %.3e  (tolerance %.1e)\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.residual, c.tolerance);
      os << buf;
    }
    os << (all_pass() ? "all checks passed\n" : "validation FAILED\n");
    return os.str();
  }
};

/// Reference Rb-87 scheme and vapor used by the analytic checks.
struct ReferenceAtom {
  LevelScheme scheme;
  VaporParams vapor;
};

inline ReferenceAtom reference_atom() {
  ReferenceAtom a;
  const double g1 = 2.0 * constants::pi * 5.7500e6, g2 = 2.0 * constants::pi * 6.0666e6;
  a.scheme = LevelScheme{0.5 * g1, 0.5 * g1, g2, 2.0 * constants::pi * 1e4};
  VaporParams& v = a.vapor;
  v.density_N = 1e18;
  v.temperature = 300.0;
  v.atomic_mass = 1.443160648e-25;
  v.lambda_1 = 794.978851156e-9;
  v.lambda_2 = 780.241209686e-9;
  auto radiative = [](double lambda, double gamma) {
    const double w = 2.0 * constants::pi * constants::c / lambda;
    return std::sqrt(3.0 * constants::pi * constants::epsilon0 * constants::hbar * std::pow(constants::c, 3) * gamma /
                     (w * w * w));
  };
  v.dipole_1 = radiative(v.lambda_1, g1);
  v.dipole_2 = radiative(v.lambda_2, g2);
  v.dipole_c = v.dipole_1;
  return a;
}

/// Two-level Voigt absorption evaluated on a uniform trapezoid grid in v.
inline double trapezoid_voigt_oracle(const LevelScheme& s, const VaporParams& vp, double omega_1, int n_points,
                                     double span = 6.0) {
  const double u = thermal_velocity(vp.temperature, vp.atomic_mass);
  const double vmax = span * u, h = 2.0 * vmax / (n_points - 1);
  double num = 0.0, den = 0.0;
  const DensityMatrix history = DensityMatrix::pure(0);
  for (int i = 0; i < n_points; ++i) {
    const double v = -vmax + i * h;
    const double w = (i == 0 || i == n_points - 1 ? 0.5 : 1.0) * std::exp(-(v * v) / (u * u));
    DriveSet d;
    d.omega_1 = omega_1;
    d.delta_1 = -vp.wavenumber_1() * v;
    num += w * absorption_coefficient(d, s, vp, Probe::field1, history);
    den += w;
  }
  return num / den;
}

/// Two-level Voigt absorption on a given quadrature (one history-aware solve per node).
inline double quadrature_voigt(const LevelScheme& s, const VaporParams& vp, double omega_1,
                               const DopplerQuadrature& q) {
  double acc = 0.0;
  const DensityMatrix history = DensityMatrix::pure(0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    DriveSet d;
    d.omega_1 = omega_1;
    d.delta_1 = -vp.wavenumber_1() * q.nodes[i];
    acc += q.weights[i] * absorption_coefficient(d, s, vp, Probe::field1, history);
  }
  return acc;
}

/// Radiative two-level limit: every |2> decay returns to |1>, no ground dephasing.
inline LevelScheme two_level_scheme(const LevelScheme& s) {
  LevelScheme t = s;
  t.gamma_21 = s.gamma_21 + s.gamma_23;
  t.gamma_23 = 0.0;
  t.gamma_gg = 0.0;
  return t;
}

/// `rates` replaces the coherence-damping model of the atomic solver (used to
/// check that the suite catches a wrong damping formula).
inline ValidationReport run_validation(const CoherenceRateFn& rates = standard_coherence_rates) {
  ValidationReport rep;
  const ReferenceAtom ref = reference_atom();
  const LevelScheme& s = ref.scheme;
  const double G = s.gamma_21 + s.gamma_23;
  auto add = [&](std::string name, double residual, double tol) {
    rep.checks.push_back({std::move(name), residual, tol, residual <= tol});
  };
  auto solve = [&](const DriveSet& d, const LevelScheme& sc) { return steady_state(build_liouvillian(d, sc, rates(sc))); };

  // EIT zero at two-photon resonance with no ground dephasing.
  {
    LevelScheme sc = s;
    sc.gamma_gg = 0.0;
    DriveSet d;
    d.omega_1 = 0.01 * G;
    d.omega_c = G;
    d.delta_1 = d.delta_c = 0.3 * G;
    add("eit_zero", std::abs(solve(d, sc)(1, 0).imag()), 1e-10);
  }

  // Resonant two-level cross-section with the radiative dipole.
  {
    const LevelScheme sc = two_level_scheme(s);
    DriveSet d;
    d.omega_1 = 1e-4 * G;
    const DensityMatrix rho =
        steady_state_from(build_liouvillian(d, sc, rates(sc)), DensityMatrix::pure(0));
    const double alpha = absorption_from_state(rho, d, ref.vapor, Probe::field1);
    const double sigma = 3.0 * ref.vapor.lambda_1 * ref.vapor.lambda_1 / (2.0 * constants::pi);
    add("two_level_cross_section", std::abs(alpha / (ref.vapor.density_N * sigma) - 1.0), 1e-6);
  }

  // Weak-probe EIT lineshape against the closed-form Lambda response, with
  // the optical coherence damping computed here from the population decays
  // and the dephasing operator.
  {
    const double dephasing = s.ground_dephasing == GroundDephasing::lindblad ? 0.25 * s.gamma_gg : 0.0;
    const double g21 = 0.5 * (s.gamma_21 + s.gamma_23) + dephasing;
    double worst = 0.0;
    for (double x : {-2.0, -0.5, -0.05, 0.0, 0.02, 0.3, 1.5}) {
      DriveSet d;
      d.omega_1 = 1e-4 * G;
      d.omega_c = 0.5 * G;
      d.delta_c = 0.1 * G;
      d.delta_1 = d.delta_c + x * G;
      const Complex i(0.0, 1.0);
      const Complex expect = (i * d.omega_1 / 2.0) /
                             (g21 + i * d.delta_1 + (d.omega_c * d.omega_c / 4.0) / (s.gamma_gg + i * (d.delta_1 - d.delta_c)));
      const Complex got = solve(d, s)(1, 0);
      worst = std::max(worst, std::abs(got - expect) / std::abs(expect));
    }
    add("eit_lineshape_width", worst, 1e-5);
  }

  // Add-drop identities.
  {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0, worst_energy = 0.0;
    for (int k = 0; k < 1000; ++k) {
      KappaSet ks{0.0, 0.0, 1e9 * (0.01 + U(rng)), 1e9 * (0.01 + U(rng)), 1e10 * (2.0 * U(rng) - 1.0)};
      worst = std::max(worst, std::abs(through_transmission(ks) + drop_transmission(ks) - 1.0));
      KappaSet kl{1e8 * U(rng), 1e8 * U(rng), ks.kappa_1, ks.kappa_2, ks.delta};
      const double p = 1e-12 * (0.1 + U(rng));
      const double u = stored_energy(p, kl);
      const double out = p * (through_transmission(kl) + drop_transmission(kl)) + (kl.kappa_0 + kl.kappa_e) * u;
      worst_energy = std::max(worst_energy, std::abs(out / p - 1.0));
    }
    add("lossless_identity", worst, 1e-12);
    add("stored_energy_conservation", worst_energy, 1e-12);
    const KappaSet anchor{1.0, 0.0, 30.0, 30.0, 0.0};
    add("anchor_values",
        std::max(std::abs(through_transmission(anchor) - 1.0 / 3721.0), std::abs(drop_transmission(anchor) - 3600.0 / 3721.0)),
        1e-12);
  }

  // Steady state against long-time integration.
  {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
      DriveSet d;
      d.omega_1 = G * (0.2 + U(rng));
      d.omega_2 = G * (0.2 + U(rng));
      d.omega_c = G * (0.2 + U(rng));
      d.delta_1 = G * (U(rng) - 0.5);
      d.delta_2 = G * (U(rng) - 0.5);
      d.delta_c = G * (U(rng) - 0.5);
      const Superoperator op = build_liouvillian(d, s, rates(s));
      const DensityMatrix ss = steady_state(op);
      const DensityMatrix ev = evolve(d, s, DensityMatrix::pure(0), 100.0 / s.gamma_21, 0.1 / op.max_abs());
      worst = std::max(worst, (ss.matrix() - ev.matrix()).cwiseAbs().maxCoeff());
    }
    add("steady_state_vs_evolution", worst, 1e-8);
  }

  // Resolved velocity quadrature against a dense trapezoid rule.
  {
    const LevelScheme sc = two_level_scheme(s);
    const double w1 = 1e-3 * G;
    const double oracle = trapezoid_voigt_oracle(sc, ref.vapor, w1, 4001);
    const double got = quadrature_voigt(sc, ref.vapor, w1, resolved_doppler_quadrature(ref.vapor, sc));
    add("doppler_resolved_vs_trapezoid", std::abs(got / oracle - 1.0), 1e-6);
  }
  return rep;
}

}  // namespace aotx
