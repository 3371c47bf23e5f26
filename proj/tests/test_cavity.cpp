#include <gtest/gtest.h>

#include <random>

#include "aotransistor/cavity.hpp"

using namespace aotx;

namespace {

CavityParams test_cavity() {
  CavityParams c;
  c.lambda_cavity = 780.241209686e-9;
  c.q_factor = 1e6;
  c.q_interpretation = QInterpretation::loaded;
  c.overcoupling = 30.0;
  c.mode_area = 0.25e-12;
  c.round_trip_length = 2.0 * constants::pi * 15e-6;
  c.group_index = 2.0;
  c.evanescent_fraction = 0.2;
  return c;
}

}  // namespace

TEST(AddDrop, AnchorValues) {
  const KappaSet k{1.0, 0.0, 30.0, 30.0, 0.0};
  EXPECT_NEAR(through_transmission(k), 1.0 / 3721.0, 1e-12);
  EXPECT_NEAR(drop_transmission(k), 3600.0 / 3721.0, 1e-12);
}

TEST(AddDrop, LosslessIdentity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const KappaSet k{0.0, 0.0, 1e9 * (1e-3 + U(rng)), 1e9 * (1e-3 + U(rng)), 3e9 * (2.0 * U(rng) - 1.0)};
    EXPECT_NEAR(through_transmission(k) + drop_transmission(k), 1.0, 1e-12);
  }
}

TEST(AddDrop, BoundsAndSymmetry) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    KappaSet k{U(rng), 10.0 * U(rng), 1e-3 + U(rng), 1e-3 + U(rng), 5.0 * (2.0 * U(rng) - 1.0)};
    const double T = through_transmission(k), D = drop_transmission(k);
    EXPECT_GE(T, 0.0);
    EXPECT_GE(D, 0.0);
    EXPECT_LE(T + D, 1.0 + 1e-12);
    KappaSet m = k;
    m.delta = -k.delta;
    EXPECT_DOUBLE_EQ(through_transmission(m), T);
    EXPECT_DOUBLE_EQ(drop_transmission(m), D);
  }
}

TEST(AddDrop, StrongExternalLossRoutesToThrough) {
  KappaSet k{1.0, 0.0, 30.0, 30.0, 0.0};
  double prevT = 0.0, prevD = 1.0;
  for (double ke = 610.0; ke < 1e7; ke *= 2.0) {
    k.kappa_e = ke;
    EXPECT_GT(through_transmission(k), prevT);
    EXPECT_LT(drop_transmission(k), prevD);
    prevT = through_transmission(k);
    prevD = drop_transmission(k);
  }
  EXPECT_GT(prevT, 0.9999);
  EXPECT_LT(prevD, 1e-8);
}

TEST(AddDrop, RejectsZeroTotal) {
  EXPECT_THROW(through_transmission(KappaSet{}), InvalidParameter);
  EXPECT_THROW(drop_transmission(KappaSet{0.0, -1.0, 1.0, 1.0, 0.0}), InvalidParameter);
}

// Input power = transmitted power + power dissipated inside the cavity.
TEST(StoredEnergy, PowerConservation) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const KappaSet k{1e8 * U(rng), 1e9 * U(rng), 1e9 * (1e-2 + U(rng)), 1e9 * (1e-2 + U(rng)),
                     1e10 * (2.0 * U(rng) - 1.0)};
    const double p = 1e-11 * (0.1 + U(rng));
    const double u = stored_energy(p, k);
    const double balance = p * (through_transmission(k) + drop_transmission(k)) + (k.kappa_0 + k.kappa_e) * u;
    EXPECT_NEAR(balance / p, 1.0, 1e-12);
  }
}

// Operating-point magnitudes: loaded Q = 1e6 at 780 nm with 30x over-coupling.
TEST(StoredEnergy, DiagnosticsAtTenPicowatts) {
  const CavityParams c = test_cavity();
  const KappaSet k = bare_kappas(c);
  EXPECT_NEAR(k.total(), c.angular_frequency() / 1e6, 1e-6 * k.total());
  const double u = stored_energy(1e-11, k);
  EXPECT_NEAR(u, 4.0 * k.kappa_1 * 1e-11 / (k.total() * k.total()), 1e-12 * u);
  const double I = circulating_intensity(u, c);
  EXPECT_NEAR(I, u * constants::c / (2.0 * c.round_trip_length * c.mode_area), 1e-12 * I);
  EXPECT_GT(I * 1e-4, 0.8);
  EXPECT_LT(I * 1e-4, 20.0);
  const double n = photon_number(u, c.lambda_cavity);
  EXPECT_GT(n, 0.002);
  EXPECT_LT(n, 0.05);
  EXPECT_THROW(stored_energy(-1.0, k), InvalidParameter);
}

// kappa_e = eta (c / n_g) alpha with alpha = N 3 lambda^2 / 2 pi at N = 1e18 m^-3:
// alpha = 2.9049e5 1/m, kappa_e = 0.2 * 1.49896e8 * 2.9049e5 = 8.7087e12 rad/s.
TEST(ExternalLoss, HandEvaluated) {
  const CavityParams c = test_cavity();
  const double lam = 780e-9;
  const double alpha = 1e18 * 3.0 * lam * lam / (2.0 * constants::pi);
  EXPECT_NEAR(alpha, 2.9049e5, 0.0001e5);
  EXPECT_NEAR(kappa_external(alpha, c), 8.7087e12, 0.0002e12);
  EXPECT_EQ(kappa_external(0.0, c), 0.0);
  EXPECT_THROW(kappa_external(-1.0, c), ModelViolation);
}

TEST(QualityFactor, Interpretations) {
  CavityParams c = test_cavity();
  const double w = c.angular_frequency();
  EXPECT_NEAR(kappa_intrinsic(c), w / 1e6 / 61.0, 1e-9 * w);
  c.q_interpretation = QInterpretation::intrinsic;
  EXPECT_NEAR(kappa_intrinsic(c), w / 1e6, 1e-9 * w);
  c.kappa_0_override = 5.0e7;
  EXPECT_DOUBLE_EQ(kappa_intrinsic(c), 5.0e7);
  c.overcoupling = 0.5;
  EXPECT_EQ(c.warnings().size(), 1u);
  c.evanescent_fraction = 1.5;
  EXPECT_THROW(c.validate(), InvalidParameter);
}

TEST(SwitchingTime, Values) {
  EXPECT_NEAR(switching_time(KappaSet{1e10, 0.0, 0.0, 0.0, 0.0}).tau, 100e-12, 1e-24);
  const SwitchingTime a = switching_time(KappaSet{1e9, 1e9, 2e9, 2e9, 0.0});
  const SwitchingTime b = switching_time(KappaSet{2e9, 2e9, 4e9, 4e9, 0.0});
  EXPECT_DOUBLE_EQ(b.tau, 0.5 * a.tau);
  EXPECT_DOUBLE_EQ(a.settle, 3.0 * a.tau);
  const double k0 = 2.0 * constants::pi * constants::c / 780e-9 / 1e6;
  EXPECT_NEAR(switching_time(KappaSet{k0, 0.0, 0.0, 0.0, 0.0}).tau, 0.41e-9, 0.005e-9);
  EXPECT_THROW(switching_time(KappaSet{}), InvalidParameter);
}

// ---------------------------------------------------------------------------
// Self-consistent buildup

namespace {

IntracavityProblem base_problem() {
  IntracavityProblem pb;
  pb.cavity_1 = test_cavity();
  pb.cavity_1.lambda_cavity = 795e-9;
  pb.cavity_2 = test_cavity();
  pb.p_in_1 = 1e-11;
  pb.p_in_2 = 1e-11;
  return pb;
}

double buildup(const CavityParams& c, double p, double ke) {
  KappaSet k = bare_kappas(c);
  k.kappa_e = ke;
  return circulating_intensity(stored_energy(p, k), c);
}

}  // namespace

TEST(FixedPoint, ConstantAbsorptionConvergesImmediately) {
  IntracavityProblem pb = base_problem();
  pb.absorption = [](double, double) { return AbsorptionPair{3.0, 5.0}; };
  const IntracavityState st = self_consistent_intensities(pb);
  EXPECT_LE(st.iterations, 3);
  EXPECT_NEAR(st.intensity_1 / buildup(pb.cavity_1, 1e-11, kappa_external(3.0, pb.cavity_1)), 1.0, 1e-12);
  EXPECT_NEAR(st.intensity_2 / buildup(pb.cavity_2, 1e-11, kappa_external(5.0, pb.cavity_2)), 1.0, 1e-12);
}

// Oracle: 1-D bisection on I - buildup(kappa_e(alpha(I))) = 0.
TEST(FixedPoint, SaturatingAbsorberMatchesBisection) {
  IntracavityProblem pb = base_problem();
  pb.p_in_2 = 0.0;
  const double a0 = 40.0, Is = 2e4;
  auto alpha = [&](double I) { return a0 / (1.0 + I / Is); };
  pb.absorption = [&](double i1, double) { return AbsorptionPair{alpha(i1), 0.0}; };
  pb.fixed_point.tolerance = 1e-12;
  const IntracavityState st = self_consistent_intensities(pb);

  auto g = [&](double I) { return I - buildup(pb.cavity_1, pb.p_in_1, kappa_external(alpha(I), pb.cavity_1)); };
  double lo = 0.0, hi = buildup(pb.cavity_1, pb.p_in_1, 0.0);
  ASSERT_LT(g(lo), 0.0);
  ASSERT_GT(g(hi), 0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  EXPECT_NEAR(st.intensity_1 / (0.5 * (lo + hi)), 1.0, 1e-6);
  EXPECT_EQ(st.intensity_2, 0.0);
}

TEST(FixedPoint, OscillatingMapNeedsDamping) {
  auto flip = [](const std::array<double, 2>& x) { return std::array<double, 2>{2.0 - x[0], 6.0 - x[1]}; };
  FixedPointOptions undamped;
  undamped.damping = 1.0;
  try {
    damped_fixed_point(flip, {0.5, 1.0}, undamped);
    FAIL() << "expected FixedPointDiverged";
  } catch (const FixedPointDiverged& e) {
    EXPECT_NE(e.last[0], e.previous[0]);
    EXPECT_DOUBLE_EQ(e.last[0] + e.previous[0], 2.0);
  }
  const FixedPointResult r = damped_fixed_point(flip, {0.5, 1.0}, FixedPointOptions{});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-12);
  EXPECT_NEAR(r.x[1], 3.0, 1e-12);
}

TEST(FixedPoint, StagingBuildsControlFirst) {
  IntracavityProblem pb = base_problem();
  std::vector<std::pair<double, double>> calls;
  pb.absorption = [&](double i1, double i2) {
    calls.emplace_back(i1, i2);
    return AbsorptionPair{1.0, 1.0};
  };
  pb.first_field = Probe::field2;
  self_consistent_intensities(pb);
  ASSERT_FALSE(calls.empty());
  EXPECT_EQ(calls.front().first, 0.0);
  EXPECT_GT(calls.front().second, 0.0);
  EXPECT_GT(calls.back().first, 0.0);
}

TEST(FixedPoint, TinyNegativeAlphaIsClampedLargeIsNot) {
  IntracavityProblem pb = base_problem();
  pb.alpha_floor = 1e-3;
  pb.absorption = [](double, double) { return AbsorptionPair{-1e-6, 0.0}; };
  EXPECT_NO_THROW(self_consistent_intensities(pb));
  pb.absorption = [](double, double) { return AbsorptionPair{-1.0, 0.0}; };
  EXPECT_THROW(self_consistent_intensities(pb), ModelViolation);
}
