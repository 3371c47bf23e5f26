#pragma once

// Optical power -> Rabi frequency conversion, absorption coefficients from the
// atomic steady state, and thermal (Doppler) and transverse-profile averaging.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "aotransistor/constants.hpp"
#include "aotransistor/errors.hpp"
#include "aotransistor/quantum_core.hpp"

namespace aotx {

enum class Probe { field1, field2 };

/// How the free-space EIT beam enters the velocity-dependent detunings.
///   unshifted     : delta_c is independent of velocity.
///   raman_locked  : delta_c follows field 1's Doppler shift, so the |1>-|3>
///                   Raman detuning is velocity independent (a broadband EIT
///                   source always supplies the Raman-resonant component).
enum class EitDoppler { unshifted, raman_locked };

struct VaporParams {
  double density_N = 0;    // atoms / m^3
  double temperature = 0;  // K
  double atomic_mass = 0;  // kg
  double lambda_1 = 0;     // m, |1> <-> |2>
  double lambda_2 = 0;     // m, |3> <-> |4>
  double dipole_1 = 0;     // C m
  double dipole_2 = 0;
  double dipole_c = 0;

  void validate() const {
    const std::array<double, 7> positive{temperature, atomic_mass, lambda_1, lambda_2,
                                         dipole_1,    dipole_2,    dipole_c};
    for (double v : positive)
      if (!std::isfinite(v) || v <= 0.0) throw InvalidParameter("VaporParams: parameters must be positive");
    if (!std::isfinite(density_N) || density_N < 0.0)
      throw InvalidParameter("VaporParams: density_N must be >= 0");
    if (!(lambda_1 > lambda_2)) throw InvalidParameter("VaporParams: expected lambda_1 > lambda_2");
  }

  double wavenumber_1() const { return 2.0 * constants::pi / lambda_1; }
  double wavenumber_2() const { return 2.0 * constants::pi / lambda_2; }
};

inline double rabi_from_intensity(double intensity, double dipole) {
  if (!(intensity >= 0.0) || !std::isfinite(intensity))
    throw InvalidParameter("rabi_from_intensity: intensity must be finite and >= 0");
  const double field = std::sqrt(2.0 * intensity / (constants::c * constants::epsilon0));
  return 2.0 * dipole * field / constants::hbar;
}

inline double intensity_from_rabi(double rabi, double dipole) {
  if (!(rabi >= 0.0)) throw InvalidParameter("intensity_from_rabi: Rabi frequency must be >= 0");
  const double field = rabi * constants::hbar / (2.0 * dipole);
  return 0.5 * constants::c * constants::epsilon0 * field * field;
}

/// 1/e half width u of f(v) = exp(-v^2/u^2) / (u sqrt(pi)).
inline double thermal_velocity(double temperature, double mass) {
  if (!(temperature > 0.0) || !(mass > 0.0))
    throw InvalidParameter("thermal_velocity: temperature and mass must be positive");
  return std::sqrt(2.0 * constants::kB * temperature / mass);
}

/// 2 omega N d^2 / (eps0 hbar c); alpha = prefactor * Im(rho_eg) / Omega.
inline double absorption_prefactor(const VaporParams& vp, Probe p) {
  const double lambda = p == Probe::field1 ? vp.lambda_1 : vp.lambda_2;
  const double d = p == Probe::field1 ? vp.dipole_1 : vp.dipole_2;
  const double omega = 2.0 * constants::pi * constants::c / lambda;
  return 2.0 * omega * vp.density_N * d * d / (constants::epsilon0 * constants::hbar * constants::c);
}

inline constexpr int coherence_index(Probe p) {
  return p == Probe::field1 ? vec_index(1, 0) : vec_index(3, 2);
}

inline double probe_rabi(const DriveSet& d, Probe p) { return p == Probe::field1 ? d.omega_1 : d.omega_2; }

inline double absorption_from_state(const DensityMatrix& rho, const DriveSet& d, const VaporParams& vp,
                                    Probe p) {
  const double rabi = probe_rabi(d, p);
  if (!(rabi > 0.0)) throw InvalidParameter("absorption_coefficient: probe Rabi frequency must be > 0");
  const Complex coh = p == Probe::field1 ? rho(1, 0) : rho(3, 2);
  return absorption_prefactor(vp, p) * coh.imag() / rabi;
}

inline double absorption_coefficient(const DriveSet& d, const LevelScheme& s, const VaporParams& vp,
                                     Probe p) {
  vp.validate();
  if (!(probe_rabi(d, p) > 0.0))
    throw InvalidParameter("absorption_coefficient: probe Rabi frequency must be > 0");
  return absorption_from_state(steady_state(build_liouvillian(d, s)), d, vp, p);
}

/// Variant for generators whose stationary state is not unique (e.g. the
/// two-level limit with an isolated ground state): the state reached from
/// `history` is used.
inline double absorption_coefficient(const DriveSet& d, const LevelScheme& s, const VaporParams& vp, Probe p,
                                     const DensityMatrix& history) {
  vp.validate();
  if (!(probe_rabi(d, p) > 0.0))
    throw InvalidParameter("absorption_coefficient: probe Rabi frequency must be > 0");
  return absorption_from_state(steady_state_from(build_liouvillian(d, s), history), d, vp, p);
}

// ---------------------------------------------------------------------------
// Velocity quadrature

struct DopplerQuadrature {
  std::vector<double> nodes;    // m/s
  std::vector<double> weights;  // normalized Maxwell-Boltzmann measure

  std::size_t size() const noexcept { return nodes.size(); }

  void validate() const {
    if (nodes.empty() || nodes.size() != weights.size())
      throw InvalidParameter("DopplerQuadrature: nodes and weights must be non-empty and equal in size");
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-10) throw InvalidParameter("DopplerQuadrature: weights must sum to 1");
    const std::size_t n = nodes.size();
    double scale = 0.0;
    for (double v : nodes) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(nodes[i] + nodes[n - 1 - i]) > 1e-12 * std::max(scale, 1e-300))
        throw InvalidParameter("DopplerQuadrature: nodes must be symmetric about zero");
  }
};

namespace detail {

/// Golub-Welsch: nodes/weights of the Jacobi matrix with zero diagonal and the
/// given off-diagonal, weights normalized to unit total mass.
inline void golub_welsch(const std::vector<double>& offdiag, std::vector<double>& x, std::vector<double>& w) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) J(k, k + 1) = J(k + 1, k) = offdiag[static_cast<std::size_t>(k)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    x[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    w[static_cast<std::size_t>(k)] = v0 * v0;
  }
  // Enforce exact mirror symmetry of the even weight functions used here.
  for (int k = 0; k < n / 2; ++k) {
    const auto a = static_cast<std::size_t>(k), b = static_cast<std::size_t>(n - 1 - k);
    const double xs = 0.5 * (x[b] - x[a]);
    const double ws = 0.5 * (w[a] + w[b]);
    x[a] = -xs;
    x[b] = xs;
    w[a] = w[b] = ws;
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& wi : w) wi /= total;
}

inline void normalize(DopplerQuadrature& q) {
  const double total = std::accumulate(q.weights.begin(), q.weights.end(), 0.0);
  for (double& w : q.weights) w /= total;
}

}  // namespace detail

/// Gauss-Hermite rule for the 1-D Maxwell-Boltzmann distribution, v = u x.
inline DopplerQuadrature doppler_quadrature(const VaporParams& vp, int n_nodes) {
  if (n_nodes < 2) throw InvalidParameter("doppler_quadrature: n_nodes must be >= 2");
  const double u = thermal_velocity(vp.temperature, vp.atomic_mass);
  std::vector<double> off(static_cast<std::size_t>(n_nodes - 1));
  for (int k = 1; k < n_nodes; ++k) off[static_cast<std::size_t>(k - 1)] = std::sqrt(0.5 * k);
  DopplerQuadrature q;
  detail::golub_welsch(off, q.nodes, q.weights);
  for (double& x : q.nodes) x *= u;
  return q;
}

struct ResolvedQuadratureOptions {
  double span = 5.0;               // integrate v in [-span*u, +span*u]
  double panel_linewidths = 1.0;   // panel width in units of the narrowest optical HWHM / k
  int order = 8;                   // Gauss-Legendre points per panel
  int total_nodes = 0;             // > 0 overrides the automatic panel count
};

/// Composite Gauss-Legendre rule with the Maxwell-Boltzmann weight folded in.
/// Panels are narrow enough to resolve the homogeneous optical linewidths,
/// which at room temperature are ~1/50 of the Doppler width.
inline DopplerQuadrature resolved_doppler_quadrature(const VaporParams& vp, const LevelScheme& s,
                                                     const ResolvedQuadratureOptions& opt = {}) {
  vp.validate();
  s.validate();
  if (opt.order < 1 || !(opt.span > 0.0) || !(opt.panel_linewidths > 0.0))
    throw InvalidParameter("resolved_doppler_quadrature: invalid options");
  const double u = thermal_velocity(vp.temperature, vp.atomic_mass);
  const CoherenceRates r = s.coherence_rates();
  double hwhm = std::min(r.g12, r.g34);
  if (!(hwhm > 0.0)) hwhm = std::max(r.g12, r.g34);
  const double kmax = std::max(vp.wavenumber_1(), vp.wavenumber_2());
  int panels = 0;
  if (opt.total_nodes > 0) {
    panels = std::max(1, opt.total_nodes / opt.order);
  } else if (hwhm > 0.0) {
    const double width = opt.panel_linewidths * hwhm / kmax;
    panels = static_cast<int>(std::ceil(2.0 * opt.span * u / width));
  } else {
    panels = 64;
  }
  if (panels % 2 == 1) ++panels;

  std::vector<double> off(static_cast<std::size_t>(opt.order - 1));
  for (int k = 1; k < opt.order; ++k) off[static_cast<std::size_t>(k - 1)] = k / std::sqrt(4.0 * k * k - 1.0);
  std::vector<double> gx, gw;
  if (opt.order == 1) {
    gx = {0.0};
    gw = {1.0};
  } else {
    detail::golub_welsch(off, gx, gw);
  }

  DopplerQuadrature q;
  q.nodes.reserve(static_cast<std::size_t>(panels * opt.order));
  q.weights.reserve(q.nodes.capacity());
  const double a = -opt.span, h = 2.0 * opt.span / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t k = 0; k < gx.size(); ++k) {
      const double x = mid + 0.5 * h * gx[k];
      q.nodes.push_back(x * u);
      q.weights.push_back(gw[k] * h * std::exp(-x * x));
    }
  }
  // Mirror so the rule is exactly symmetric in floating point.
  const std::size_t n = q.nodes.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double v = 0.5 * (q.nodes[n - 1 - i] - q.nodes[i]);
    const double w = 0.5 * (q.weights[i] + q.weights[n - 1 - i]);
    q.nodes[i] = -v;
    q.nodes[n - 1 - i] = v;
    q.weights[i] = q.weights[n - 1 - i] = w;
  }
  detail::normalize(q);
  return q;
}

/// Drives seen by atoms moving with velocity v along the (co-propagating) cavity fields.
inline DriveSet doppler_shifted(const DriveSet& d, const VaporParams& vp, double v, EitDoppler eit) {
  DriveSet out = d;
  out.delta_1 -= vp.wavenumber_1() * v;
  out.delta_2 -= vp.wavenumber_2() * v;
  if (eit == EitDoppler::raman_locked) out.delta_c -= vp.wavenumber_1() * v;
  return out;
}

// ---------------------------------------------------------------------------
// Doppler averaging

/// Velocity-averaged absorption of both cavity fields. A field whose Rabi
/// frequency is zero is not probed and reports 0.
struct AbsorptionPair {
  double alpha_1 = 0.0;
  double alpha_2 = 0.0;

  double operator[](Probe p) const { return p == Probe::field1 ? alpha_1 : alpha_2; }
  AbsorptionPair& operator+=(const AbsorptionPair& o) {
    alpha_1 += o.alpha_1;
    alpha_2 += o.alpha_2;
    return *this;
  }
  friend AbsorptionPair operator*(double w, AbsorptionPair a) {
    a.alpha_1 *= w;
    a.alpha_2 *= w;
    return a;
  }
};

/// Worst-case density-matrix invariant violations over every state examined.
struct StateAudit {
  long states = 0;
  double max_hermiticity_error = 0.0;
  double max_trace_error = 0.0;
  double min_eigenvalue = 1.0;

  void record(const DensityMatrix& rho) {
    ++states;
    max_hermiticity_error = std::max(max_hermiticity_error, rho.hermiticity_error());
    max_trace_error = std::max(max_trace_error, std::abs(rho.trace() - 1.0));
    min_eigenvalue = std::min(min_eigenvalue, rho.min_eigenvalue());
  }
  void merge(const StateAudit& o) {
    states += o.states;
    max_hermiticity_error = std::max(max_hermiticity_error, o.max_hermiticity_error);
    max_trace_error = std::max(max_trace_error, o.max_trace_error);
    min_eigenvalue = std::min(min_eigenvalue, o.min_eigenvalue);
  }
  bool ok() const {
    return max_hermiticity_error <= 1e-12 && max_trace_error <= 1e-12 && min_eigenvalue >= -1e-10;
  }
};

enum class DopplerMethod {
  automatic,  // spectral evaluation, verified against direct solves, with fallback
  direct      // one dense steady-state solve per velocity node
};

struct DopplerOptions {
  EitDoppler eit = EitDoppler::unshifted;
  DopplerMethod method = DopplerMethod::automatic;
  StateAudit* audit = nullptr;  // when set, every node state is reconstructed and checked
  // State the atoms start from; selects the stationary state when it is not
  // unique. Empty means the unpumped vapor, (|1><1| + |3><3|)/2.
  std::optional<DensityMatrix> history;
};

inline DensityMatrix unpumped_ground_state() {
  Matrix4c rho = Matrix4c::Zero();
  rho(0, 0) = 0.5;
  rho(2, 2) = 0.5;
  return DensityMatrix(rho);
}

namespace detail {

inline AbsorptionPair doppler_average_direct(const DriveSet& d, const LevelScheme& s, const VaporParams& vp,
                                             const DopplerQuadrature& q, const DopplerOptions& opt) {
  Complex sum21 = 0.0, sum43 = 0.0;
  const CoherenceRates rates = s.coherence_rates();
  for (std::size_t i = 0; i < q.size(); ++i) {
    const DriveSet dv = doppler_shifted(d, vp, q.nodes[i], opt.eit);
    const Superoperator op = build_liouvillian(dv, s, rates);
    DensityMatrix rho;
    try {
      rho = steady_state(op);
    } catch (const DegenerateSteadyState&) {
      rho = steady_state_from(op, opt.history ? *opt.history : unpumped_ground_state());
    }
    if (opt.audit != nullptr) opt.audit->record(rho);
    sum21 += q.weights[i] * rho(1, 0);
    sum43 += q.weights[i] * rho(3, 2);
  }
  AbsorptionPair out;
  if (d.omega_1 > 0.0) out.alpha_1 = absorption_prefactor(vp, Probe::field1) * sum21.imag() / d.omega_1;
  if (d.omega_2 > 0.0) out.alpha_2 = absorption_prefactor(vp, Probe::field2) * sum43.imag() / d.omega_2;
  return out;
}

/// Velocity enters L(v) = L(0) + v*G only on the diagonal. With the trace row
/// in place, A(v) = A0 + v*G and x(v) = V diag(1/(1 + v*lambda)) V^-1 A0^-1 b,
/// where M = A0^-1 G = V diag(lambda) V^-1. Each node then costs O(16).
/// Returns std::nullopt when the expansion is not trustworthy.
inline std::optional<AbsorptionPair> doppler_average_spectral(const DriveSet& d, const LevelScheme& s,
                                                              const VaporParams& vp, const DopplerQuadrature& q,
                                                              const DopplerOptions& opt) {
  const CoherenceRates rates = s.coherence_rates();
  const Superoperator op = build_liouvillian(d, s, rates);
  const double scale = op.max_abs();
  if (scale == 0.0) return std::nullopt;

  // d H_ii / d v
  const double k1 = vp.wavenumber_1(), k2 = vp.wavenumber_2();
  const double kc = opt.eit == EitDoppler::raman_locked ? k1 : 0.0;
  const std::array<double, kLevels> dh{0.0, -k1, -k1 + kc, -k1 - k2 + kc};
  Vector16c g;
  for (int j = 0; j < kLevels; ++j)
    for (int i = 0; i < kLevels; ++i) g(vec_index(i, j)) = Complex(0.0, -(dh[i] - dh[j]));

  Matrix16c A = op.L;
  A.row(0).setZero();
  for (int k = 0; k < kLevels; ++k) A(0, vec_index(k, k)) = scale;
  Vector16c b = Vector16c::Zero();
  b(0) = scale;
  Eigen::FullPivLU<Matrix16c> lu(A);
  lu.setThreshold(kRankTolerance);
  if (lu.rank() < kLiouvilleDim) return std::nullopt;
  const Vector16c x0 = lu.solve(b);
  const Matrix16c M = lu.solve(Matrix16c(g.asDiagonal()));
  Eigen::ComplexEigenSolver<Matrix16c> es(M);
  if (es.info() != Eigen::Success) return std::nullopt;
  const Matrix16c& V = es.eigenvectors();
  const auto& lambda = es.eigenvalues();
  Eigen::FullPivLU<Matrix16c> vlu(V);
  if (!vlu.isInvertible()) return std::nullopt;
  const Vector16c cvec = vlu.solve(x0);
  const Matrix16c W = V * cvec.asDiagonal();  // x(v) = W * r(v), r_k = 1/(1 + v lambda_k)

  const int i21 = coherence_index(Probe::field1), i43 = coherence_index(Probe::field2);
  auto evaluate = [&](double v, Vector16c& r) -> bool {
    for (int k = 0; k < kLiouvilleDim; ++k) {
      const Complex den = 1.0 + v * lambda(k);
      if (std::abs(den) < 1e-9) return false;
      r(k) = 1.0 / den;
    }
    return true;
  };

  // Cross-check the expansion against direct solves at a spread of nodes.
  const std::size_t n = q.size();
  std::vector<std::size_t> probes{0, n / 4, n / 2, (3 * n) / 4, n - 1};
  {
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(q.nodes[i]) < std::abs(q.nodes[best])) best = i;
    probes.push_back(best);
  }
  Vector16c r;
  for (std::size_t idx : probes) {
    const double v = q.nodes[idx];
    if (!evaluate(v, r)) return std::nullopt;
    const Vector16c x = W * r;
    Vector16c xd;
    try {
      xd = steady_state(build_liouvillian(doppler_shifted(d, vp, v, opt.eit), s, rates)).vec();
    } catch (const DegenerateSteadyState&) {
      return std::nullopt;
    }
    for (int m : {i21, i43}) {
      if (std::abs(x(m) - xd(m)) > 1e-8 * std::abs(xd(m)) + 1e-12) return std::nullopt;
    }
    const Complex tr = x(vec_index(0, 0)) + x(vec_index(1, 1)) + x(vec_index(2, 2)) + x(vec_index(3, 3));
    if (std::abs(tr - 1.0) > 1e-9) return std::nullopt;
  }

  Complex sum21 = 0.0, sum43 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!evaluate(q.nodes[i], r)) return std::nullopt;
    sum21 += q.weights[i] * (W.row(i21) * r)(0);
    sum43 += q.weights[i] * (W.row(i43) * r)(0);
    if (opt.audit != nullptr) {
      Vector16c x = W * r;
      Matrix4c rho = DensityMatrix::from_vec(x).matrix();
      rho = (0.5 * (rho + rho.adjoint())).eval();
      opt.audit->record(DensityMatrix(rho / rho.trace().real()));
    }
  }
  if (!std::isfinite(sum21.real()) || !std::isfinite(sum21.imag()) || !std::isfinite(sum43.imag()))
    return std::nullopt;
  AbsorptionPair out;
  if (d.omega_1 > 0.0) out.alpha_1 = absorption_prefactor(vp, Probe::field1) * sum21.imag() / d.omega_1;
  if (d.omega_2 > 0.0) out.alpha_2 = absorption_prefactor(vp, Probe::field2) * sum43.imag() / d.omega_2;
  return out;
}

}  // namespace detail

/// Thermal average of both absorption coefficients over `q`, summed in
/// ascending node order.
inline AbsorptionPair doppler_average(const DriveSet& d, const LevelScheme& s, const VaporParams& vp,
                                      const DopplerQuadrature& q, const DopplerOptions& opt = {}) {
  d.validate();
  s.validate();
  vp.validate();
  q.validate();
  if (opt.method == DopplerMethod::automatic && q.size() > 16) {
    if (auto fast = detail::doppler_average_spectral(d, s, vp, q, opt)) return *fast;
  }
  return detail::doppler_average_direct(d, s, vp, q, opt);
}

inline double doppler_average_alpha(const DriveSet& d, const LevelScheme& s, const VaporParams& vp,
                                    const DopplerQuadrature& q, Probe p, const DopplerOptions& opt = {}) {
  if (!(probe_rabi(d, p) > 0.0))
    throw InvalidParameter("doppler_average_alpha: probe Rabi frequency must be > 0");
  return doppler_average(d, s, vp, q, opt)[p];
}

// ---------------------------------------------------------------------------
// Transverse mode profile

struct ModeSample {
  double relative_intensity = 1.0;
  double weight = 1.0;
};

struct ModeProfile {
  std::vector<ModeSample> samples{ModeSample{}};

  static ModeProfile uniform() { return ModeProfile{}; }

  void validate() const {
    if (samples.empty()) throw InvalidParameter("ModeProfile: profile is empty");
    double wsum = 0.0, mean = 0.0;
    for (const auto& s : samples) {
      if (!(s.weight >= 0.0) || !(s.relative_intensity >= 0.0))
        throw InvalidParameter("ModeProfile: weights and intensities must be >= 0");
      wsum += s.weight;
      mean += s.weight * s.relative_intensity;
    }
    if (std::abs(wsum - 1.0) > 1e-12) throw InvalidParameter("ModeProfile: weights must sum to 1");
    if (std::abs(mean - 1.0) > 1e-12) throw InvalidParameter("ModeProfile: weighted mean intensity must be 1");
  }

  /// Rescales raw samples so the weights sum to 1 and the weighted mean intensity is 1.
  static ModeProfile normalized(std::vector<ModeSample> raw) {
    if (raw.empty()) throw InvalidParameter("ModeProfile: profile is empty");
    double wsum = 0.0;
    for (const auto& s : raw) {
      if (!(s.weight >= 0.0) || !(s.relative_intensity >= 0.0))
        throw InvalidParameter("ModeProfile: weights and intensities must be >= 0");
      wsum += s.weight;
    }
    if (!(wsum > 0.0)) throw InvalidParameter("ModeProfile: weights sum to zero");
    double mean = 0.0;
    for (auto& s : raw) {
      s.weight /= wsum;
      mean += s.weight * s.relative_intensity;
    }
    if (!(mean > 0.0)) throw InvalidParameter("ModeProfile: mean intensity is zero");
    for (auto& s : raw) s.relative_intensity /= mean;
    return ModeProfile{std::move(raw)};
  }
};

/// Weighted average of `alpha_of_intensity(I1 * r, I2 * r)` over the profile samples.
template <class Evaluator>
auto profile_average(Evaluator&& alpha_of_intensity, const ModeProfile& profile, double peak_1, double peak_2) {
  if (profile.samples.empty()) throw InvalidParameter("profile_average: profile is empty");
  profile.validate();
  using Result = decltype(alpha_of_intensity(peak_1, peak_2));
  if (profile.samples.size() == 1 && profile.samples.front().relative_intensity == 1.0)
    return alpha_of_intensity(peak_1, peak_2);
  Result acc{};
  for (const auto& s : profile.samples) {
    if (s.weight == 0.0) continue;
    acc += s.weight * alpha_of_intensity(peak_1 * s.relative_intensity, peak_2 * s.relative_intensity);
  }
  return acc;
}

}  // namespace aotx
