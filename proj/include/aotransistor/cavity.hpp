#pragma once

// Coupled-mode model of a four-port (add-drop) resonator. All kappa values are
// energy decay rates, so the loaded full width at half maximum is
// kappa_0 + kappa_e + kappa_1 + kappa_2.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aotransistor/constants.hpp"
#include "aotransistor/errors.hpp"
#include "aotransistor/vapor.hpp"

namespace aotx {

/// Which linewidth the quality factor describes.
///   intrinsic : kappa_0 = omega / Q
///   loaded    : kappa_0 + kappa_1 + kappa_2 = omega / Q (no atoms)
enum class QInterpretation { intrinsic, loaded };

inline const char* to_string(QInterpretation q) { return q == QInterpretation::loaded ? "loaded" : "intrinsic"; }

struct CavityParams {
  double lambda_cavity = 0;        // m
  double q_factor = 0;             // see q_interpretation
  QInterpretation q_interpretation = QInterpretation::intrinsic;
  double overcoupling = 1;         // kappa_1/kappa_0 = kappa_2/kappa_0
  double mode_area = 0;            // m^2
  double round_trip_length = 0;    // m
  double group_index = 1;
  double evanescent_fraction = 0;  // eta, fraction of mode energy in the vapor
  std::optional<double> kappa_0_override;  // rad/s, replaces the Q-derived value

  void validate() const {
    for (double v : {lambda_cavity, overcoupling, mode_area, round_trip_length, group_index})
      if (!std::isfinite(v) || v <= 0.0) throw InvalidParameter("CavityParams: parameters must be positive");
    if (!kappa_0_override && !(q_factor > 0.0)) throw InvalidParameter("CavityParams: q_factor must be positive");
    if (kappa_0_override && !(*kappa_0_override > 0.0))
      throw InvalidParameter("CavityParams: kappa_0 must be positive");
    if (!(evanescent_fraction >= 0.0) || evanescent_fraction > 1.0)
      throw InvalidParameter("CavityParams: evanescent_fraction must lie in [0, 1]");
  }

  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    if (overcoupling < 1.0) out.emplace_back("CavityParams: overcoupling < 1 (under-coupled resonator)");
    return out;
  }

  double angular_frequency() const { return 2.0 * constants::pi * constants::c / lambda_cavity; }
};

struct KappaSet {
  double kappa_0 = 0, kappa_e = 0, kappa_1 = 0, kappa_2 = 0;
  double delta = 0;  // detuning of the field from the cavity resonance

  double total() const { return kappa_0 + kappa_e + kappa_1 + kappa_2; }

  void validate() const {
    for (double k : {kappa_0, kappa_e, kappa_1, kappa_2})
      if (!std::isfinite(k) || k < 0.0) throw InvalidParameter("KappaSet: rates must be finite and >= 0");
    if (!std::isfinite(delta)) throw InvalidParameter("KappaSet: detuning must be finite");
  }
};

inline double kappa_intrinsic(const CavityParams& c) {
  c.validate();
  if (c.kappa_0_override) return *c.kappa_0_override;
  const double bare = c.angular_frequency() / c.q_factor;
  return c.q_interpretation == QInterpretation::loaded ? bare / (1.0 + 2.0 * c.overcoupling) : bare;
}

/// Rates of the empty resonator at detuning `delta`.
inline KappaSet bare_kappas(const CavityParams& c, double delta = 0.0) {
  const double k0 = kappa_intrinsic(c);
  return KappaSet{k0, 0.0, c.overcoupling * k0, c.overcoupling * k0, delta};
}

namespace detail {
inline double transmission_denominator(const KappaSet& k) {
  k.validate();
  const double s = k.total();
  const double den = 4.0 * k.delta * k.delta + s * s;
  if (!(den > 0.0)) throw InvalidParameter("transmission: all rates and the detuning are zero");
  return den;
}
}  // namespace detail

inline double through_transmission(const KappaSet& k) {
  const double den = detail::transmission_denominator(k);
  const double a = k.kappa_0 + k.kappa_e - k.kappa_1 + k.kappa_2;
  return (4.0 * k.delta * k.delta + a * a) / den;
}

inline double drop_transmission(const KappaSet& k) {
  const double den = detail::transmission_denominator(k);
  return 4.0 * k.kappa_1 * k.kappa_2 / den;
}

/// Stored energy for input power p_in in waveguide 1; satisfies
/// p_in (1 - T) = U (kappa_0 + kappa_e) + D p_in.
inline double stored_energy(double p_in, const KappaSet& k) {
  if (!(p_in >= 0.0)) throw InvalidParameter("stored_energy: input power must be >= 0");
  const double den = 0.25 * detail::transmission_denominator(k);
  return k.kappa_1 * p_in / den;
}

inline double circulating_intensity(double energy, const CavityParams& c) {
  return energy * constants::c / (c.group_index * c.round_trip_length * c.mode_area);
}

inline double photon_number(double energy, double lambda) {
  if (!(energy >= 0.0)) throw InvalidParameter("photon_number: energy must be >= 0");
  return energy * lambda / (constants::h * constants::c);
}

inline double kappa_external(double alpha, const CavityParams& c) {
  if (std::isnan(alpha)) throw InvalidParameter("kappa_external: alpha is NaN");
  if (alpha < 0.0)
    throw ModelViolation("kappa_external: negative absorption (gain) is outside the model, alpha = " +
                         std::to_string(alpha) + " 1/m");
  return c.evanescent_fraction * constants::c * alpha / c.group_index;
}

struct SwitchingTime {
  double tau = 0;     // loaded energy decay time 1/kappa_total
  double settle = 0;  // 3 tau
};

inline SwitchingTime switching_time(const KappaSet& k) {
  k.validate();
  const double s = k.total();
  if (!(s > 0.0)) throw InvalidParameter("switching_time: total decay rate is zero");
  return {1.0 / s, 3.0 / s};
}

// ---------------------------------------------------------------------------
// Damped Picard iteration on the pair of circulating intensities

struct FixedPointOptions {
  double damping = 0.5;     // x <- (1 - beta) x + beta F(x)
  double tolerance = 1e-6;  // relative change of both components
  int max_iterations = 200;
};

struct FixedPointResult {
  std::array<double, 2> x{0.0, 0.0};
  int iterations = 0;
  bool converged = false;
};

namespace detail {
inline double relative_change(double next, double prev) {
  const double diff = std::abs(next - prev);
  if (diff == 0.0) return 0.0;
  return diff / std::max(std::abs(next), std::abs(prev));
}
}  // namespace detail

/// Iterates from x0. Throws FixedPointDiverged, carrying the last two
/// iterates, when the cap is reached.
template <class Map>
FixedPointResult damped_fixed_point(Map&& map, std::array<double, 2> x0, const FixedPointOptions& opt) {
  if (!(opt.damping > 0.0) || opt.damping > 1.0)
    throw InvalidParameter("damped_fixed_point: damping must lie in (0, 1]");
  if (opt.max_iterations < 1) throw InvalidParameter("damped_fixed_point: max_iterations must be >= 1");
  FixedPointResult res;
  std::array<double, 2> x = x0, prev = x0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const std::array<double, 2> fx = map(x);
    std::array<double, 2> next{};
    bool done = true;
    for (int k = 0; k < 2; ++k) {
      next[static_cast<std::size_t>(k)] = (1.0 - opt.damping) * x[static_cast<std::size_t>(k)] +
                                           opt.damping * fx[static_cast<std::size_t>(k)];
      if (!std::isfinite(next[static_cast<std::size_t>(k)]))
        throw FixedPointDiverged("damped_fixed_point: non-finite iterate", x[0], x[1], next[0], next[1]);
      if (detail::relative_change(next[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(k)]) >
          opt.tolerance)
        done = false;
    }
    prev = x;
    x = next;
    res.iterations = it;
    if (done) {
      res.x = x;
      res.converged = true;
      return res;
    }
  }
  throw FixedPointDiverged("damped_fixed_point: no convergence after " + std::to_string(opt.max_iterations) +
                               " iterations",
                           prev[0], prev[1], x[0], x[1]);
}

struct IntracavityState {
  double intensity_1 = 0, intensity_2 = 0;  // W/m^2
  double kappa_e_1 = 0, kappa_e_2 = 0;      // rad/s
  double alpha_1 = 0, alpha_2 = 0;          // 1/m
  int iterations = 0;
  bool converged = false;
};

/// Everything the self-consistent buildup needs. `absorption` maps the two
/// circulating intensities to the averaged absorption of each field.
struct IntracavityProblem {
  double p_in_1 = 0, p_in_2 = 0;    // W, input power in waveguide 1 for each field
  CavityParams cavity_1, cavity_2;  // per-field resonator parameters
  double delta_1 = 0, delta_2 = 0;  // cavity detuning of each field
  std::function<AbsorptionPair(double, double)> absorption;
  std::optional<Probe> first_field;  // builds up alone before the other field enters
  double seed_fraction = 1e-6;       // start from this fraction of the empty-cavity buildup
  double alpha_floor = 0.0;          // |alpha| below this (1/m) counts as numerical zero
  FixedPointOptions fixed_point;
};

namespace detail {

inline double kappa_e_from_alpha(double alpha, double floor, const CavityParams& c) {
  if (alpha < 0.0 && alpha > -floor) alpha = 0.0;
  return kappa_external(alpha, c);
}

inline double buildup_intensity(double p_in, const CavityParams& c, double kappa_e, double delta) {
  KappaSet k = bare_kappas(c, delta);
  k.kappa_e = kappa_e;
  return circulating_intensity(stored_energy(p_in, k), c);
}

}  // namespace detail

inline IntracavityState self_consistent_intensities(const IntracavityProblem& pb) {
  if (!pb.absorption) throw InvalidParameter("self_consistent_intensities: missing absorption model");
  if (!(pb.p_in_1 >= 0.0) || !(pb.p_in_2 >= 0.0))
    throw InvalidParameter("self_consistent_intensities: input powers must be >= 0");
  pb.cavity_1.validate();
  pb.cavity_2.validate();

  auto kappas = [&](const std::array<double, 2>& I) {
    const AbsorptionPair a = pb.absorption(I[0], I[1]);
    return std::pair{a, std::array<double, 2>{
                            I[0] > 0.0 ? detail::kappa_e_from_alpha(a.alpha_1, pb.alpha_floor, pb.cavity_1) : 0.0,
                            I[1] > 0.0 ? detail::kappa_e_from_alpha(a.alpha_2, pb.alpha_floor, pb.cavity_2) : 0.0}};
  };

  int total_iterations = 0;
  auto solve_stage = [&](double p1, double p2, std::array<double, 2> start) {
    auto map = [&](const std::array<double, 2>& I) {
      const auto ke = kappas(I).second;
      return std::array<double, 2>{p1 > 0.0 ? detail::buildup_intensity(p1, pb.cavity_1, ke[0], pb.delta_1) : 0.0,
                                   p2 > 0.0 ? detail::buildup_intensity(p2, pb.cavity_2, ke[1], pb.delta_2) : 0.0};
    };
    // A field entering the cavity starts from a weak seed; the first map
    // evaluation sets its low-intensity buildup.
    const std::array<double, 2> seed{
        p1 > 0.0 && start[0] <= 0.0 ? pb.seed_fraction * detail::buildup_intensity(p1, pb.cavity_1, 0.0, pb.delta_1)
                                    : start[0],
        p2 > 0.0 && start[1] <= 0.0 ? pb.seed_fraction * detail::buildup_intensity(p2, pb.cavity_2, 0.0, pb.delta_2)
                                    : start[1]};
    std::array<double, 2> x0 = seed;
    if ((p1 > 0.0 && start[0] <= 0.0) || (p2 > 0.0 && start[1] <= 0.0)) {
      const auto f = map(seed);
      for (int k = 0; k < 2; ++k) {
        const auto i = static_cast<std::size_t>(k);
        if (start[i] <= 0.0) x0[i] = f[i];
      }
      ++total_iterations;
    }
    if (p1 <= 0.0) x0[0] = 0.0;
    if (p2 <= 0.0) x0[1] = 0.0;
    const FixedPointResult r = damped_fixed_point(map, x0, pb.fixed_point);
    total_iterations += r.iterations;
    return r.x;
  };

  std::array<double, 2> I{0.0, 0.0};
  if (pb.first_field && pb.p_in_1 > 0.0 && pb.p_in_2 > 0.0) {
    if (*pb.first_field == Probe::field1)
      I = solve_stage(pb.p_in_1, 0.0, {0.0, 0.0});
    else
      I = solve_stage(0.0, pb.p_in_2, {0.0, 0.0});
  }
  I = solve_stage(pb.p_in_1, pb.p_in_2, I);

  IntracavityState st;
  st.intensity_1 = I[0];
  st.intensity_2 = I[1];
  const auto [a, ke] = kappas(I);
  st.alpha_1 = a.alpha_1;
  st.alpha_2 = a.alpha_2;
  st.kappa_e_1 = ke[0];
  st.kappa_e_2 = ke[1];
  st.iterations = total_iterations;
  st.converged = true;
  return st;
}

}  // namespace aotx
