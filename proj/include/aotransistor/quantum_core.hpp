#pragma once

// Four-level N-scheme atom driven by three fields: rotating-frame Hamiltonian,
// phenomenological relaxation, Liouvillian superoperator and steady state.
//
// Level map (1-based physics label -> 0-based matrix index):
//   |1> -> 0   lower ground state (F=1), coupled to |2> by field 1 (795 nm)
//   |2> -> 1   D1 excited state, decays to |1> (gamma_21) and |3> (gamma_23)
//   |3> -> 2   upper ground state (F=2), coupled to |2> by the EIT field c
//   |4> -> 3   D2 excited state, coupled to |3> by field 2 (780 nm), decays to |3>
//
// Superoperators act on the column-stacked density matrix:
//   vec(rho)[i + 4*j] = rho(i, j).
//
// All frequencies are angular [rad/s] with hbar = 1.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "aotransistor/errors.hpp"

namespace aotx {

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;
using Matrix16c = Eigen::Matrix<Complex, 16, 16>;
using Vector16c = Eigen::Matrix<Complex, 16, 1>;

inline constexpr int kLevels = 4;
inline constexpr int kLiouvilleDim = kLevels * kLevels;

constexpr int vec_index(int row, int col) noexcept { return row + kLevels * col; }

/// Off-diagonal damping rates gamma_ij (symmetric, i != j), 0-based storage.
struct CoherenceRates {
  double g12 = 0, g13 = 0, g14 = 0, g23 = 0, g24 = 0, g34 = 0;

  double operator()(int i, int j) const {
    if (i > j) std::swap(i, j);
    switch (i * kLevels + j) {
      case 0 * kLevels + 1: return g12;
      case 0 * kLevels + 2: return g13;
      case 0 * kLevels + 3: return g14;
      case 1 * kLevels + 2: return g23;
      case 1 * kLevels + 3: return g24;
      case 2 * kLevels + 3: return g34;
      default: return 0.0;
    }
  }
};

/// Damping of the |1>-|4> coherence. `excited_only` gives gamma_14 = G34/2,
/// the value fixed by the decay of |4> alone. `summed` gives
/// (G12+G23+G34)/2, the same as gamma_24; it is not completely positive
/// and can drive steady states to negative eigenvalues.
enum class Gamma14Rule { excited_only, summed };

inline const char* to_string(Gamma14Rule r) { return r == Gamma14Rule::summed ? "summed" : "excited_only"; }

/// How gamma_gg enters. `lindblad` models it as the dephasing operator
/// sqrt(gamma_gg/2)(|1><1| - |3><3|): rho_13 decays at gamma_gg and every
/// ground-excited coherence picks up gamma_gg/4. `coherence_only` adds
/// gamma_gg to rho_13 alone, which is not completely positive for gamma_gg > 0.
enum class GroundDephasing { lindblad, coherence_only };

inline const char* to_string(GroundDephasing g) {
  return g == GroundDephasing::coherence_only ? "coherence_only" : "lindblad";
}

struct LevelScheme {
  double gamma_21 = 0;  // |2> -> |1> population decay
  double gamma_23 = 0;  // |2> -> |3> population decay
  double gamma_43 = 0;  // |4> -> |3> population decay
  double gamma_gg = 0;  // ground-state coherence decay (rho_13)
  Gamma14Rule gamma_14_rule = Gamma14Rule::excited_only;
  GroundDephasing ground_dephasing = GroundDephasing::lindblad;

  void validate() const {
    for (double r : {gamma_21, gamma_23, gamma_43, gamma_gg}) {
      if (!std::isfinite(r) || r < 0.0)
        throw InvalidParameter("LevelScheme: decay rates must be finite and >= 0");
    }
  }

  /// Soft invariants; never fatal.
  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    if (gamma_gg > 0.1 * gamma_21)
      out.emplace_back("LevelScheme: gamma_gg exceeds 0.1*gamma_21; ground coherence is expected to be weak");
    return out;
  }

  /// gamma_12 = gamma_23 = (G12+G23)/2, gamma_34 = G34/2,
  /// gamma_24 = (G12+G23+G34)/2, gamma_13 = gamma_gg, gamma_14 per gamma_14_rule,
  /// plus the ground_dephasing share on the ground-excited coherences.
  CoherenceRates coherence_rates() const {
    const double excited2 = gamma_21 + gamma_23;
    CoherenceRates r;
    r.g12 = 0.5 * excited2;
    r.g23 = 0.5 * excited2;
    r.g34 = 0.5 * gamma_43;
    r.g14 = gamma_14_rule == Gamma14Rule::summed ? 0.5 * (excited2 + gamma_43) : 0.5 * gamma_43;
    r.g24 = 0.5 * (excited2 + gamma_43);
    r.g13 = gamma_gg;
    if (ground_dephasing == GroundDephasing::lindblad) {
      const double q = 0.25 * gamma_gg;
      r.g12 += q;
      r.g14 += q;
      r.g23 += q;
      r.g34 += q;
    }
    return r;
  }
};

using CoherenceRateFn = std::function<CoherenceRates(const LevelScheme&)>;

inline CoherenceRates standard_coherence_rates(const LevelScheme& s) { return s.coherence_rates(); }

struct DriveSet {
  double omega_1 = 0, omega_2 = 0, omega_c = 0;  // Rabi frequencies, >= 0
  double delta_1 = 0, delta_2 = 0, delta_c = 0;  // detunings, signed

  void validate() const {
    for (double v : {omega_1, omega_2, omega_c, delta_1, delta_2, delta_c}) {
      if (!std::isfinite(v)) throw InvalidParameter("DriveSet: non-finite drive parameter");
    }
    if (omega_1 < 0.0 || omega_2 < 0.0 || omega_c < 0.0)
      throw InvalidParameter("DriveSet: Rabi frequencies must be >= 0");
  }
};

class DensityMatrix {
 public:
  DensityMatrix() : rho_(Matrix4c::Zero()) { rho_(0, 0) = 1.0; }
  explicit DensityMatrix(const Matrix4c& rho) : rho_(rho) {}

  static DensityMatrix pure(int level_index) {
    Matrix4c m = Matrix4c::Zero();
    m(level_index, level_index) = 1.0;
    return DensityMatrix(m);
  }

  static DensityMatrix from_vec(const Vector16c& v) {
    Matrix4c m;
    for (int j = 0; j < kLevels; ++j)
      for (int i = 0; i < kLevels; ++i) m(i, j) = v(vec_index(i, j));
    return DensityMatrix(m);
  }

  Vector16c vec() const {
    Vector16c v;
    for (int j = 0; j < kLevels; ++j)
      for (int i = 0; i < kLevels; ++i) v(vec_index(i, j)) = rho_(i, j);
    return v;
  }

  const Matrix4c& matrix() const noexcept { return rho_; }
  Complex operator()(int i, int j) const { return rho_(i, j); }
  double population(int i) const { return rho_(i, i).real(); }

  Complex trace() const { return rho_.trace(); }
  double hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const {
    const Matrix4c herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// Hermitian within 1e-12, unit trace within 1e-12, eigenvalues >= -1e-10.
  bool is_physical(double herm_tol = 1e-12, double trace_tol = 1e-12, double eig_tol = 1e-10) const {
    return hermiticity_error() <= herm_tol && std::abs(trace() - 1.0) <= trace_tol &&
           min_eigenvalue() >= -eig_tol;
  }

 private:
  Matrix4c rho_;
};

struct Superoperator {
  Matrix16c L = Matrix16c::Zero();

  double max_abs() const { return L.cwiseAbs().maxCoeff(); }

  /// Row vector of the trace functional: tr(rho) = trace_row() * vec(rho).
  static Eigen::Matrix<Complex, 1, 16> trace_row() {
    Eigen::Matrix<Complex, 1, 16> t = Eigen::Matrix<Complex, 1, 16>::Zero();
    for (int k = 0; k < kLevels; ++k) t(vec_index(k, k)) = 1.0;
    return t;
  }

  /// max |tr . L| relative to max |L|; zero for an exactly trace-preserving generator.
  double trace_defect() const {
    const double scale = max_abs();
    if (scale == 0.0) return 0.0;
    return (trace_row() * L).cwiseAbs().maxCoeff() / scale;
  }

  Vector16c apply(const Vector16c& v) const { return L * v; }
};

inline Matrix4c build_hamiltonian(const DriveSet& d) {
  d.validate();
  Matrix4c H = Matrix4c::Zero();
  H(1, 1) = d.delta_1;
  H(2, 2) = d.delta_1 - d.delta_c;
  H(3, 3) = d.delta_1 + d.delta_2 - d.delta_c;
  H(0, 1) = H(1, 0) = -0.5 * d.omega_1;
  H(2, 1) = H(1, 2) = -0.5 * d.omega_c;
  H(2, 3) = H(3, 2) = -0.5 * d.omega_2;
  return H;
}

inline Matrix4c apply_relaxation(const Matrix4c& rho, const LevelScheme& s,
                                 const CoherenceRates& rates) {
  Matrix4c out = Matrix4c::Zero();
  const Complex p2 = rho(1, 1), p4 = rho(3, 3);
  out(1, 1) = -(s.gamma_21 + s.gamma_23) * p2;
  out(0, 0) = s.gamma_21 * p2;
  out(2, 2) = s.gamma_23 * p2 + s.gamma_43 * p4;
  out(3, 3) = -s.gamma_43 * p4;
  for (int i = 0; i < kLevels; ++i)
    for (int j = 0; j < kLevels; ++j)
      if (i != j) out(i, j) = -rates(i, j) * rho(i, j);
  return out;
}

inline Matrix4c apply_relaxation(const DensityMatrix& rho, const LevelScheme& s) {
  s.validate();
  return apply_relaxation(rho.matrix(), s, s.coherence_rates());
}

/// -i[H, rho] + R(rho), evaluated directly on the 4x4 matrix.
inline Matrix4c master_equation_rhs(const Matrix4c& rho, const DriveSet& d, const LevelScheme& s) {
  const Matrix4c H = build_hamiltonian(d);
  const Complex minus_i(0.0, -1.0);
  return minus_i * (H * rho - rho * H) + apply_relaxation(rho, s, s.coherence_rates());
}

inline Superoperator build_liouvillian(const DriveSet& d, const LevelScheme& s,
                                       const CoherenceRates& rates) {
  d.validate();
  s.validate();
  const Matrix4c H = build_hamiltonian(d);
  Superoperator op;
  Matrix16c& L = op.L;
  const Complex minus_i(0.0, -1.0);
  // vec(H rho) = (I kron H) vec(rho); vec(rho H) = (H^T kron I) vec(rho).
  for (int j = 0; j < kLevels; ++j) {
    for (int i = 0; i < kLevels; ++i) {
      const int row = vec_index(i, j);
      for (int k = 0; k < kLevels; ++k) {
        if (H(i, k) != 0.0) L(row, vec_index(k, j)) += minus_i * H(i, k);
        if (H(k, j) != 0.0) L(row, vec_index(i, k)) -= minus_i * H(k, j);
      }
    }
  }
  const int p1 = vec_index(0, 0), p2 = vec_index(1, 1), p3 = vec_index(2, 2), p4 = vec_index(3, 3);
  L(p2, p2) -= s.gamma_21 + s.gamma_23;
  L(p1, p2) += s.gamma_21;
  L(p3, p2) += s.gamma_23;
  L(p3, p4) += s.gamma_43;
  L(p4, p4) -= s.gamma_43;
  for (int i = 0; i < kLevels; ++i)
    for (int j = 0; j < kLevels; ++j)
      if (i != j) L(vec_index(i, j), vec_index(i, j)) -= rates(i, j);
  return op;
}

inline Superoperator build_liouvillian(const DriveSet& d, const LevelScheme& s) {
  return build_liouvillian(d, s, s.coherence_rates());
}

namespace detail {

inline DensityMatrix finish_state(const Vector16c& x) {
  Matrix4c rho = DensityMatrix::from_vec(x).matrix();
  rho = (0.5 * (rho + rho.adjoint())).eval();
  const Complex tr = rho.trace();
  if (!std::isfinite(tr.real()) || std::abs(tr) == 0.0)
    throw SolveFailure("steady_state: non-finite or traceless solution");
  return DensityMatrix(rho / tr.real());
}

}  // namespace detail

/// Relative pivot threshold used to decide that the stationary state is not unique.
inline constexpr double kRankTolerance = 1e-9;

/// Unique stationary state of a trace-preserving Liouvillian. One population
/// equation is replaced by the trace constraint and the 16x16 system is solved
/// by LU with pivoting.
inline DensityMatrix steady_state(const Superoperator& op) {
  const double scale = op.max_abs();
  if (scale == 0.0)
    throw DegenerateSteadyState("steady_state: Liouvillian is identically zero", kLiouvilleDim);
  Matrix16c A = op.L;
  Vector16c b = Vector16c::Zero();
  A.row(0).setZero();
  for (int k = 0; k < kLevels; ++k) A(0, vec_index(k, k)) = scale;
  b(0) = scale;

  Eigen::FullPivLU<Matrix16c> lu(A);
  lu.setThreshold(kRankTolerance);
  if (lu.rank() < kLiouvilleDim) {
    const int null_dim = kLiouvilleDim - lu.rank() + 1;
    throw DegenerateSteadyState(
        "steady_state: stationary state is not unique (null space dimension " +
            std::to_string(null_dim) + ")",
        null_dim);
  }
  const Vector16c x = lu.solve(b);
  if (!x.allFinite()) throw SolveFailure("steady_state: non-finite solution");
  DensityMatrix rho = detail::finish_state(x);
  const double residual = (op.L * rho.vec()).cwiseAbs().maxCoeff();
  if (residual > 1e-10 * scale)
    throw SolveFailure("steady_state: residual " + std::to_string(residual / scale) +
                       " (relative) exceeds 1e-10");
  return rho;
}

/// Long-time limit of exp(L t) rho0 via the spectral projector onto ker(L).
/// Defined for degenerate generators; the result depends on rho0.
inline DensityMatrix steady_state_from(const Superoperator& op, const DensityMatrix& rho0) {
  const double scale = op.max_abs();
  if (scale == 0.0) return rho0;
  Eigen::JacobiSVD<Matrix16c> svd(op.L, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int null_dim = 0;
  for (int k = 0; k < kLiouvilleDim; ++k)
    if (sv(k) <= kRankTolerance * sv(0)) ++null_dim;
  if (null_dim == 0) throw SolveFailure("steady_state_from: Liouvillian has no null space");
  const auto right = svd.matrixV().rightCols(null_dim);
  const auto left = svd.matrixU().rightCols(null_dim);
  const Eigen::MatrixXcd overlap = left.adjoint() * right;
  const Eigen::VectorXcd coeff = overlap.fullPivLu().solve(left.adjoint() * rho0.vec());
  const Vector16c x = right * coeff;
  return detail::finish_state(x);
}

/// Fixed-step classical RK4 on vec(drho/dt) = L vec(rho). Requires dt*|L|max <= 0.1.
inline DensityMatrix evolve(const DriveSet& d, const LevelScheme& s, const DensityMatrix& rho0,
                            double t_final, double dt) {
  if (!(t_final >= 0.0) || !(dt > 0.0) || !std::isfinite(t_final))
    throw InvalidParameter("evolve: require t_final >= 0 and dt > 0");
  const Superoperator op = build_liouvillian(d, s);
  const double scale = op.max_abs();
  if (dt * scale > 0.1 * (1.0 + 1e-12))
    throw InvalidParameter("evolve: step too large, dt*|L|max = " + std::to_string(dt * scale) +
                           " > 0.1");
  Vector16c x = rho0.vec();
  if (scale == 0.0 || t_final == 0.0) return rho0;
  const long steps = static_cast<long>(std::ceil(t_final / dt));
  const double h = t_final / static_cast<double>(steps);
  const Matrix16c& L = op.L;
  for (long n = 0; n < steps; ++n) {
    const Vector16c k1 = L * x;
    const Vector16c k2 = L * (x + 0.5 * h * k1);
    const Vector16c k3 = L * (x + 0.5 * h * k2);
    const Vector16c k4 = L * (x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return DensityMatrix::from_vec(x);
}

}  // namespace aotx
