#pragma once

// Run configuration: YAML files with unit-suffixed keys, line-data ingestion,
// transverse-profile tables, and the resolved-config / manifest JSON.
//
// Every physical key carries its unit in the name (temperature_K,
// wavelength_m, ...). Unknown keys are rejected. Only the solver, sweep and
// output sections have defaults.

#include <yaml-cpp/yaml.h>

#include <boost/crc.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aotransistor/transistor.hpp"

namespace aotx {

namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "1.0.0";

enum class QuadratureRule { resolved, gauss_hermite };

inline const char* to_string(QuadratureRule q) { return q == QuadratureRule::resolved ? "resolved" : "gauss_hermite"; }
inline const char* to_string(EitDoppler e) { return e == EitDoppler::raman_locked ? "raman_locked" : "unshifted"; }

struct LineData {
  struct Line {
    double wavelength = 0;  // m
    double gamma = 0;       // rad/s, excited-state population decay rate
    double dipole = 0;      // C m
  };
  Line d1, d2;
  double mass = 0;  // kg
  std::string path;
  std::uint32_t crc32 = 0;
  std::string source;  // citation string from the file
};

struct SolverSettings {
  QuadratureRule rule = QuadratureRule::resolved;
  int nodes = 0;  // gauss_hermite: node count (default 32); resolved: > 0 fixes the total
  ResolvedQuadratureOptions resolved;
  FixedPointOptions fixed_point;
  double seed_fraction = 1e-6;
  EitDoppler eit_doppler = EitDoppler::raman_locked;
};

struct OutputSettings {
  std::string directory = "out";
  bool csv = true;
  bool text = true;
};

struct SimulationConfig {
  std::string source_path;

  // atom
  LineData lines;
  double branching_21 = 0.5;  // fraction of the D1 excited-state decay that returns to |1>
  LevelScheme scheme;
  VaporParams vapor;

  // cavity
  CavityParams cavity;
  ModeProfile profile;
  std::string mode_profile_path;

  // fields
  BaseScenario base;
  double eit_beam_area = 0;
  double delta_c = 0, atomic_delta_1 = 0, atomic_delta_2 = 0;

  // sweep
  std::optional<double> sweep_min, sweep_max;
  double sweep_span_kappa = 5.0;
  int sweep_points = 201;

  SolverSettings solver;
  OutputSettings output;

  DopplerQuadrature quadrature() const {
    if (solver.rule == QuadratureRule::gauss_hermite) return doppler_quadrature(vapor, solver.nodes > 0 ? solver.nodes : 32);
    ResolvedQuadratureOptions o = solver.resolved;
    o.total_nodes = solver.nodes;
    return resolved_doppler_quadrature(vapor, scheme, o);
  }

  TransistorModel model() const {
    TransistorModel m;
    m.scheme = scheme;
    m.vapor = vapor;
    m.cavity = cavity;
    m.profile = profile;
    m.quadrature = quadrature();
    m.eit_doppler = solver.eit_doppler;
    m.eit_beam_area = eit_beam_area;
    m.delta_c = delta_c;
    m.atomic_delta_1 = atomic_delta_1;
    m.atomic_delta_2 = atomic_delta_2;
    m.fixed_point = solver.fixed_point;
    m.seed_fraction = solver.seed_fraction;
    return m;
  }

  /// Signal detuning grid; defaults to +-span * kappa_total of the bare signal cavity.
  SweepGrid sweep_grid(const TransistorModel& m, ControlField c) const {
    SweepGrid g;
    g.n_points = sweep_points;
    const double k = bare_kappas(m.cavity_for(signal_probe(c))).total();
    g.delta_min = sweep_min.value_or(-sweep_span_kappa * k);
    g.delta_max = sweep_max.value_or(sweep_span_kappa * k);
    return g;
  }
};

// ---------------------------------------------------------------------------
// YAML helpers

namespace detail {

inline std::string mark_prefix(const std::string& file, const YAML::Mark& m) {
  std::ostringstream os;
  os << file;
  if (m.line >= 0) os << ":" << m.line + 1 << ":" << m.column + 1;
  return os.str() + ": ";
}

/// A mapping node whose keys are consumed one by one; finish() rejects leftovers.
class Section {
 public:
  Section(YAML::Node node, std::string file, std::string name)
      : node_(std::move(node)), file_(std::move(file)), name_(std::move(name)) {
    if (node_ && !node_.IsMap()) fail(node_.Mark(), "section '" + name_ + "' must be a mapping");
  }

  bool present() const { return static_cast<bool>(node_); }
  bool has(const std::string& key) const { return node_ && node_[key]; }

  [[noreturn]] void fail(const YAML::Mark& m, const std::string& msg) const {
    throw ConfigError(mark_prefix(file_, m) + msg);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(node_ ? node_.Mark() : YAML::Mark::null_mark(), msg); }

  YAML::Mark mark(const std::string& key) const { return has(key) ? node_[key].Mark() : node_.Mark(); }

  YAML::Node take(const std::string& key) {
    used_.insert(key);
    if (!node_) return YAML::Node(YAML::NodeType::Undefined);
    return node_[key];
  }

  template <class T>
  std::optional<T> get(const std::string& key) {
    YAML::Node n = take(key);
    if (!n || n.IsNull()) return std::nullopt;
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n.Mark(), "key '" + name_ + "." + key + "' has an invalid value");
    }
  }

  template <class T>
  T require(const std::string& key) {
    auto v = get<T>(key);
    if (!v) fail("missing required key '" + name_ + "." + key + "'");
    return *v;
  }

  /// Reads one of several unit spellings of the same quantity, applying each spelling's scale.
  std::optional<double> get_scaled(const std::vector<std::pair<std::string, double>>& spellings) {
    std::optional<double> out;
    std::string first;
    for (const auto& [key, scale] : spellings) {
      if (auto v = get<double>(key)) {
        if (out) fail(mark(key), "'" + name_ + "." + key + "' conflicts with '" + name_ + "." + first + "'");
        out = *v * scale;
        first = key;
      }
    }
    return out;
  }

  double require_scaled(const std::vector<std::pair<std::string, double>>& spellings) {
    auto v = get_scaled(spellings);
    if (!v) fail("missing required key '" + name_ + "." + spellings.front().first + "'");
    return *v;
  }

  /// Rejects keys that were never consumed, pointing at unit mismatches where possible.
  void finish() const {
    if (!node_) return;
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      const std::string key = it->first.as<std::string>();
      if (used_.count(key)) continue;
      std::string hint;
      for (const auto& u : used_) {
        if (stem(u) == stem(key)) hint = " (unit mismatch: expected '" + u + "')";
      }
      fail(it->first.Mark(), "unknown key '" + name_ + "." + key + "'" + hint);
    }
  }

  const std::string& file() const { return file_; }
  const std::string& name() const { return name_; }

 private:
  static std::string stem(const std::string& k) {
    const auto p = k.find('_');
    return p == std::string::npos ? k : k.substr(0, p);
  }

  YAML::Node node_;
  std::string file_, name_;
  std::set<std::string> used_;
};

inline std::uint32_t crc32_of_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  const std::string bytes = os.str();
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

inline YAML::Node load_yaml_file(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError(path + ": file not found");
  try {
    return YAML::LoadFile(path);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(mark_prefix(path, e.mark) + e.msg);
  } catch (const YAML::Exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

template <class Fn>
void with_context(const std::string& file, const std::string& section, Fn&& fn) {
  try {
    fn();
  } catch (const InvalidParameter& e) {
    throw ConfigError(file + ": invariant violation in section '" + section + "': " + e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Line data

inline LineData load_line_data(const std::string& path) {
  const YAML::Node root = detail::load_yaml_file(path);
  detail::Section top(root, path, "line_data");
  LineData ld;
  ld.path = path;
  ld.crc32 = detail::crc32_of_file(path);
  ld.source = top.get<std::string>("source").value_or("");
  ld.mass = top.require<double>("mass_kg");
  auto line = [&](const std::string& name) {
    detail::Section s(top.take(name), path, name);
    if (!s.present()) top.fail("missing line '" + name + "'");
    LineData::Line l;
    l.wavelength = s.require<double>("wavelength_m");
    l.gamma = s.require<double>("gamma_rad_per_s");
    l.dipole = s.require<double>("dipole_Cm");
    s.finish();
    if (!(l.wavelength > 0.0) || !(l.gamma > 0.0) || !(l.dipole > 0.0))
      s.fail("line '" + name + "': wavelength, gamma and dipole must be positive");
    return l;
  };
  ld.d1 = line("D1");
  ld.d2 = line("D2");
  top.finish();
  if (!(ld.mass > 0.0)) top.fail("mass_kg must be positive");
  return ld;
}

// ---------------------------------------------------------------------------
// Mode profile table: two columns "relative_intensity,weight" with an optional
// header line and '#' comments. Intensities are rescaled to unit weighted mean.

inline ModeProfile load_mode_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open mode profile");
  std::vector<ModeSample> raw;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (raw.empty() && line.find_first_of("0123456789") != 0 && line.find("relative") != std::string::npos) continue;
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream is(line);
    ModeSample s;
    if (!(is >> s.relative_intensity >> s.weight))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'relative_intensity,weight'");
    raw.push_back(s);
  }
  try {
    return ModeProfile::normalized(std::move(raw));
  } catch (const InvalidParameter& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Config

namespace detail {

inline std::string resolve_relative(const std::string& base_file, const std::string& p) {
  fs::path q(p);
  if (q.is_absolute()) return q.lexically_normal().string();
  return (fs::absolute(fs::path(base_file)).parent_path() / q).lexically_normal().string();
}

inline EitDoppler parse_eit(Section& s, const std::string& key, EitDoppler dflt) {
  auto v = s.get<std::string>(key);
  if (!v) return dflt;
  if (*v == "raman_locked") return EitDoppler::raman_locked;
  if (*v == "unshifted") return EitDoppler::unshifted;
  s.fail(s.mark(key), "'" + key + "' must be 'raman_locked' or 'unshifted'");
}

}  // namespace detail

/// Parses a config tree. `file` labels error messages and anchors relative paths.
inline SimulationConfig parse_config_node(const YAML::Node& root, const std::string& file) {
  using detail::Section;
  if (!root || !root.IsMap()) throw ConfigError(file + ": top level must be a mapping");
  const std::set<std::string> sections{"atom", "vapor", "cavity", "fields", "sweep", "solver", "output"};
  for (auto it = root.begin(); it != root.end(); ++it) {
    const std::string k = it->first.as<std::string>();
    if (!sections.count(k)) throw ConfigError(detail::mark_prefix(file, it->first.Mark()) + "unknown section '" + k + "'");
  }
  for (const char* req : {"atom", "cavity", "fields"})
    if (!root[req]) throw ConfigError(file + ": missing required section '" + std::string(req) + "'");

  SimulationConfig c;
  c.source_path = file;
  constexpr double two_pi = 2.0 * constants::pi;

  // atom
  {
    Section s(root["atom"], file, "atom");
    const std::string ld = s.require<std::string>("line_data");
    c.lines = load_line_data(detail::resolve_relative(file, ld));
    if (auto crc = s.get<std::uint32_t>("line_data_crc32"); crc && *crc != c.lines.crc32)
      s.fail(s.mark("line_data_crc32"), "line data checksum mismatch");
    const double density = s.require_scaled({{"density_per_cm3", 1e6}, {"density_per_m3", 1.0}});
    const double temperature = s.require<double>("temperature_K");
    c.branching_21 = s.get<double>("branching_21").value_or(0.5);
    const auto ggs = s.get_scaled({{"gamma_gg_rad_per_s", 1.0}, {"gamma_gg_Hz", two_pi}});
    if (!ggs) s.fail("missing required key 'atom.gamma_gg_rad_per_s'");
    if (auto rule = s.get<std::string>("gamma_14_rule")) {
      if (*rule == "summed")
        c.scheme.gamma_14_rule = Gamma14Rule::summed;
      else if (*rule != "excited_only")
        s.fail(s.mark("gamma_14_rule"), "'gamma_14_rule' must be 'excited_only' or 'summed'");
    }
    if (auto g = s.get<std::string>("ground_dephasing")) {
      if (*g == "coherence_only")
        c.scheme.ground_dephasing = GroundDephasing::coherence_only;
      else if (*g != "lindblad")
        s.fail(s.mark("ground_dephasing"), "'ground_dephasing' must be 'lindblad' or 'coherence_only'");
    }
    s.finish();
    if (!(c.branching_21 >= 0.0 && c.branching_21 <= 1.0))
      s.fail(s.mark("branching_21"), "invariant violation: atom.branching_21 must lie in [0, 1]");
    if (!(density >= 0.0)) s.fail(s.mark("density_per_cm3"), "invariant violation: atom.density must be >= 0");
    if (!(temperature > 0.0)) s.fail(s.mark("temperature_K"), "invariant violation: atom.temperature_K must be > 0");
    c.scheme.gamma_21 = c.branching_21 * c.lines.d1.gamma;
    c.scheme.gamma_23 = (1.0 - c.branching_21) * c.lines.d1.gamma;
    c.scheme.gamma_43 = c.lines.d2.gamma;
    c.scheme.gamma_gg = *ggs;
    c.vapor.density_N = density;
    c.vapor.temperature = temperature;
    c.vapor.atomic_mass = c.lines.mass;
    c.vapor.lambda_1 = c.lines.d1.wavelength;
    c.vapor.lambda_2 = c.lines.d2.wavelength;
    c.vapor.dipole_1 = c.lines.d1.dipole;
    c.vapor.dipole_2 = c.lines.d2.dipole;
    c.vapor.dipole_c = c.lines.d1.dipole;
    if (c.scheme.gamma_gg < 0.0) s.fail(s.mark("gamma_gg_rad_per_s"), "invariant violation: atom.gamma_gg must be >= 0");
  }

  // vapor overrides
  {
    Section s(root["vapor"], file, "vapor");
    auto set = [&](const char* key, double& target) {
      if (auto v = s.get<double>(key)) {
        if (!(*v > 0.0)) s.fail(s.mark(key), std::string("invariant violation: vapor.") + key + " must be > 0");
        target = *v;
      }
    };
    set("mass_kg", c.vapor.atomic_mass);
    set("lambda_1_m", c.vapor.lambda_1);
    set("lambda_2_m", c.vapor.lambda_2);
    set("dipole_1_Cm", c.vapor.dipole_1);
    set("dipole_2_Cm", c.vapor.dipole_2);
    set("dipole_c_Cm", c.vapor.dipole_c);
    s.finish();
  }
  detail::with_context(file, "atom/vapor", [&] {
    c.scheme.validate();
    c.vapor.validate();
  });

  // cavity
  {
    Section s(root["cavity"], file, "cavity");
    auto q = s.get<double>("q_factor");
    auto k0 = s.get<double>("kappa_0_rad_per_s");
    if (q && k0) s.fail(s.mark("kappa_0_rad_per_s"), "conflict: cavity.kappa_0_rad_per_s and cavity.q_factor both given");
    if (!q && !k0) s.fail("missing required key 'cavity.q_factor' (or 'cavity.kappa_0_rad_per_s')");
    c.cavity.q_factor = q.value_or(0.0);
    c.cavity.kappa_0_override = k0;
    if (auto qi = s.get<std::string>("q_interpretation")) {
      if (*qi == "loaded")
        c.cavity.q_interpretation = QInterpretation::loaded;
      else if (*qi == "intrinsic")
        c.cavity.q_interpretation = QInterpretation::intrinsic;
      else
        s.fail(s.mark("q_interpretation"), "'q_interpretation' must be 'loaded' or 'intrinsic'");
    } else if (q) {
      s.fail("missing required key 'cavity.q_interpretation'");
    }
    c.cavity.overcoupling = s.require<double>("overcoupling");
    c.cavity.mode_area = s.require_scaled({{"mode_area_m2", 1.0}, {"mode_area_um2", 1e-12}});
    c.cavity.round_trip_length = s.require_scaled({{"round_trip_length_m", 1.0}, {"round_trip_length_um", 1e-6}});
    c.cavity.group_index = s.require<double>("group_index");
    c.cavity.evanescent_fraction = s.require<double>("evanescent_fraction");
    if (auto mp = s.get<std::string>("mode_profile")) {
      c.mode_profile_path = detail::resolve_relative(file, *mp);
      c.profile = load_mode_profile(c.mode_profile_path);
    }
    s.finish();
    c.cavity.lambda_cavity = c.vapor.lambda_1;
    detail::with_context(file, "cavity", [&] { c.cavity.validate(); });
  }

  // fields
  {
    Section s(root["fields"], file, "fields");
    c.base.p_signal = s.require_scaled({{"signal_power_W", 1.0}, {"signal_power_pW", 1e-12}});
    c.base.p_eit = s.require_scaled({{"eit_power_W", 1.0}, {"eit_power_uW", 1e-6}});
    auto area = s.get_scaled({{"eit_beam_area_m2", 1.0}});
    auto diam = s.get_scaled({{"eit_beam_diameter_m", 1.0}, {"eit_beam_diameter_um", 1e-6}});
    if (area && diam) s.fail(s.mark("eit_beam_area_m2"), "conflict: EIT beam area and diameter both given");
    if (!area && !diam) s.fail("missing required key 'fields.eit_beam_diameter_m' (or 'fields.eit_beam_area_m2')");
    c.eit_beam_area = area ? *area : constants::pi * 0.25 * *diam * *diam;
    c.base.weak_control_fraction = s.require<double>("weak_control_fraction");
    c.delta_c = s.get_scaled({{"delta_c_rad_per_s", 1.0}, {"delta_c_Hz", two_pi}}).value_or(0.0);
    c.atomic_delta_1 = s.get_scaled({{"atomic_delta_1_rad_per_s", 1.0}, {"atomic_delta_1_Hz", two_pi}}).value_or(0.0);
    c.atomic_delta_2 = s.get_scaled({{"atomic_delta_2_rad_per_s", 1.0}, {"atomic_delta_2_Hz", two_pi}}).value_or(0.0);
    s.finish();
    if (!(c.base.p_signal > 0.0)) s.fail("invariant violation: fields.signal_power must be > 0");
    if (!(c.base.p_eit >= 0.0)) s.fail("invariant violation: fields.eit_power must be >= 0");
    if (!(c.eit_beam_area > 0.0)) s.fail("invariant violation: EIT beam size must be > 0");
    if (!(c.base.weak_control_fraction > 0.0)) s.fail("invariant violation: fields.weak_control_fraction must be > 0");
  }

  // sweep
  {
    Section s(root["sweep"], file, "sweep");
    c.sweep_min = s.get_scaled({{"delta_min_rad_per_s", 1.0}});
    c.sweep_max = s.get_scaled({{"delta_max_rad_per_s", 1.0}});
    c.sweep_span_kappa = s.get<double>("span_kappa_total").value_or(5.0);
    c.sweep_points = s.get<int>("n_points").value_or(201);
    s.finish();
    if (c.sweep_min.has_value() != c.sweep_max.has_value())
      s.fail("sweep.delta_min_rad_per_s and sweep.delta_max_rad_per_s must be given together");
    if (c.sweep_points < 2) s.fail(s.mark("n_points"), "invariant violation: sweep.n_points must be >= 2");
    if (c.sweep_min && !(*c.sweep_max > *c.sweep_min)) s.fail("invariant violation: sweep.delta_max must exceed delta_min");
    if (!(c.sweep_span_kappa > 0.0)) s.fail("invariant violation: sweep.span_kappa_total must be > 0");
  }

  // solver
  {
    Section s(root["solver"], file, "solver");
    if (auto r = s.get<std::string>("quadrature")) {
      if (*r == "resolved")
        c.solver.rule = QuadratureRule::resolved;
      else if (*r == "gauss_hermite")
        c.solver.rule = QuadratureRule::gauss_hermite;
      else
        s.fail(s.mark("quadrature"), "'quadrature' must be 'resolved' or 'gauss_hermite'");
    }
    c.solver.nodes = s.get<int>("quadrature_nodes").value_or(0);
    c.solver.resolved.span = s.get<double>("resolved_span_thermal").value_or(c.solver.resolved.span);
    c.solver.resolved.panel_linewidths =
        s.get<double>("resolved_panel_linewidths").value_or(c.solver.resolved.panel_linewidths);
    c.solver.resolved.order = s.get<int>("resolved_order").value_or(c.solver.resolved.order);
    c.solver.fixed_point.damping = s.get<double>("damping").value_or(c.solver.fixed_point.damping);
    c.solver.fixed_point.tolerance = s.get<double>("tolerance").value_or(c.solver.fixed_point.tolerance);
    c.solver.fixed_point.max_iterations = s.get<int>("max_iterations").value_or(c.solver.fixed_point.max_iterations);
    c.solver.seed_fraction = s.get<double>("seed_fraction").value_or(c.solver.seed_fraction);
    c.solver.eit_doppler = detail::parse_eit(s, "eit_doppler", c.solver.eit_doppler);
    s.finish();
    if (c.solver.nodes < 0) s.fail(s.mark("quadrature_nodes"), "invariant violation: solver.quadrature_nodes must be >= 0");
    if (!(c.solver.fixed_point.damping > 0.0 && c.solver.fixed_point.damping <= 1.0))
      s.fail(s.mark("damping"), "invariant violation: solver.damping must lie in (0, 1]");
    if (!(c.solver.fixed_point.tolerance > 0.0)) s.fail(s.mark("tolerance"), "invariant violation: solver.tolerance must be > 0");
    if (c.solver.fixed_point.max_iterations < 1)
      s.fail(s.mark("max_iterations"), "invariant violation: solver.max_iterations must be >= 1");
    if (!(c.solver.seed_fraction > 0.0 && c.solver.seed_fraction <= 1.0))
      s.fail(s.mark("seed_fraction"), "invariant violation: solver.seed_fraction must lie in (0, 1]");
    if (c.solver.resolved.order < 1 || !(c.solver.resolved.span > 0.0) || !(c.solver.resolved.panel_linewidths > 0.0))
      s.fail("invariant violation: resolved quadrature settings must be positive");
  }

  // output
  {
    Section s(root["output"], file, "output");
    c.output.directory = s.get<std::string>("directory").value_or(c.output.directory);
    c.output.csv = s.get<bool>("csv").value_or(true);
    c.output.text = s.get<bool>("text").value_or(true);
    s.finish();
  }
  return c;
}

inline SimulationConfig parse_config(const std::string& path) {
  return parse_config_node(detail::load_yaml_file(path), path);
}

inline SimulationConfig parse_config_string(const std::string& text, const std::string& label = "<string>") {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(detail::mark_prefix(label, e.mark) + e.msg);
  }
  return parse_config_node(root, label);
}

/// The fully expanded config in the same key schema as the input file.
/// JSON is valid YAML, so this round-trips through parse_config_node.
inline nlohmann::json resolved_config(const SimulationConfig& c) {
  using nlohmann::json;
  json j;
  j["atom"] = {{"line_data", fs::absolute(c.lines.path).lexically_normal().string()},
               {"line_data_crc32", c.lines.crc32},
               {"density_per_m3", c.vapor.density_N},
               {"temperature_K", c.vapor.temperature},
               {"branching_21", c.branching_21},
               {"gamma_gg_rad_per_s", c.scheme.gamma_gg},
               {"gamma_14_rule", to_string(c.scheme.gamma_14_rule)},
               {"ground_dephasing", to_string(c.scheme.ground_dephasing)}};
  j["vapor"] = {{"mass_kg", c.vapor.atomic_mass},     {"lambda_1_m", c.vapor.lambda_1},
                {"lambda_2_m", c.vapor.lambda_2},     {"dipole_1_Cm", c.vapor.dipole_1},
                {"dipole_2_Cm", c.vapor.dipole_2},    {"dipole_c_Cm", c.vapor.dipole_c}};
  json cav = {{"overcoupling", c.cavity.overcoupling},
              {"mode_area_m2", c.cavity.mode_area},
              {"round_trip_length_m", c.cavity.round_trip_length},
              {"group_index", c.cavity.group_index},
              {"evanescent_fraction", c.cavity.evanescent_fraction}};
  if (c.cavity.kappa_0_override) {
    cav["kappa_0_rad_per_s"] = *c.cavity.kappa_0_override;
  } else {
    cav["q_factor"] = c.cavity.q_factor;
    cav["q_interpretation"] = to_string(c.cavity.q_interpretation);
  }
  if (!c.mode_profile_path.empty()) cav["mode_profile"] = c.mode_profile_path;
  j["cavity"] = cav;
  j["fields"] = {{"signal_power_W", c.base.p_signal},
                 {"eit_power_W", c.base.p_eit},
                 {"eit_beam_area_m2", c.eit_beam_area},
                 {"weak_control_fraction", c.base.weak_control_fraction},
                 {"delta_c_rad_per_s", c.delta_c},
                 {"atomic_delta_1_rad_per_s", c.atomic_delta_1},
                 {"atomic_delta_2_rad_per_s", c.atomic_delta_2}};
  json sw = {{"n_points", c.sweep_points}, {"span_kappa_total", c.sweep_span_kappa}};
  if (c.sweep_min) {
    sw["delta_min_rad_per_s"] = *c.sweep_min;
    sw["delta_max_rad_per_s"] = *c.sweep_max;
  }
  j["sweep"] = sw;
  j["solver"] = {{"quadrature", to_string(c.solver.rule)},
                 {"quadrature_nodes", c.solver.nodes},
                 {"resolved_span_thermal", c.solver.resolved.span},
                 {"resolved_panel_linewidths", c.solver.resolved.panel_linewidths},
                 {"resolved_order", c.solver.resolved.order},
                 {"damping", c.solver.fixed_point.damping},
                 {"tolerance", c.solver.fixed_point.tolerance},
                 {"max_iterations", c.solver.fixed_point.max_iterations},
                 {"seed_fraction", c.solver.seed_fraction},
                 {"eit_doppler", to_string(c.solver.eit_doppler)}};
  j["output"] = {{"directory", c.output.directory}, {"csv", c.output.csv}, {"text", c.output.text}};
  return j;
}

/// Rebuilds a config from a manifest written by a previous run.
inline SimulationConfig config_from_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open manifest");
  nlohmann::json m;
  try {
    in >> m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": malformed manifest: " + e.what());
  }
  if (!m.contains("resolved_config")) throw ConfigError(path + ": manifest has no resolved_config");
  return parse_config_string(m["resolved_config"].dump(), path);
}

}  // namespace aotx
