#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace blab;

namespace {

const KernelTable &table_1e4() {
  static const KernelTable t = make_kernels(Potential::soft_sphere(1.0, 1.0), ScalingParams::make(1e4, 0.55, 0.01));
  return t;
}

} // namespace

TEST(Kernels, HyperbolicIdentityOnEveryShell) {
  const auto &t = table_1e4();
  for (const auto &r : t.rows)
    ASSERT_NEAR(r.gamma * r.gamma - r.sigma * r.sigma, 1.0, 1e-12) << "m=" << r.m;
}

TEST(Kernels, TauSolvesItsDefiningRelation) {
  const auto &t = table_1e4();
  const double A = 8.0 * pi * t.a * t.params.n_kappa();
  int low = 0;
  for (const auto &r : t.rows) {
    if (!t.regions.in_low_set(r.p))
      continue;
    ++low;
    EXPECT_NEAR(std::tanh(2.0 * r.nu), -A / (r.p * r.p + A), 1e-12);
    EXPECT_NEAR(r.nu, oracle::tau_direct(r.p, oracle::soft_sphere_a(1.0, 1.0), 1e4, 0.55), 1e-12);
  }
  EXPECT_GT(low, 0);
}

TEST(Kernels, EtaIsTheScaledTransformOutsideTheLowSet) {
  auto pot = Potential::soft_sphere(1.0, 1.0);
  auto prm = ScalingParams::make(1e4, 0.55, 0.01);
  const auto &t = table_1e4();
  auto sol = solve_neumann(pot, {prm.n, prm.kappa, prm.ell});
  const double pref = -std::pow(prm.n, 3 * prm.kappa - 2), S = prm.scale();
  double scale = std::abs(pref * oracle::brute_w_hat(sol, 0.0));
  for (std::int64_t m : {1, 2, 50, 400, 2000}) {
    const KernelRow *r = t.find(m);
    ASSERT_NE(r, nullptr);
    EXPECT_NEAR(r->eta, pref * oracle::brute_w_hat(sol, r->p / S), 1e-8 * scale) << "m=" << m;
    if (!t.regions.in_low_set(r->p))
      EXPECT_EQ(r->nu, r->eta);
  }
  EXPECT_EQ(t.find(7), nullptr); // 7 is not a sum of three squares
}

TEST(Kernels, RegionsAreOrderedAndTagged) {
  const auto &t = table_1e4();
  MomentumRegions reg(t.params);
  EXPECT_LT(reg.t_s, reg.t_l);
  EXPECT_LT(reg.t_l, reg.t_h);
  for (const auto &r : t.rows) {
    Region want = r.p > reg.t_h ? Region::high : r.p > reg.t_l ? Region::mid : r.p >= reg.t_s ? Region::S : Region::low;
    ASSERT_EQ(r.tag, want);
  }
  EXPECT_GT(t.shells->max_momentum(), reg.t_h);
}

TEST(Kernels, CondensateStaysMacroscopic) {
  const auto &t = table_1e4();
  double n0 = n_zero(t);
  EXPECT_GT(n0, 0.0);
  EXPECT_LT(n0, t.params.n);
  double depleted = 0;
  for (const auto &r : t.rows) {
    if (!t.regions.in_low_set(r.p))
      continue;
    depleted += r.sigma * r.sigma * t.shells->r3(r.m);
  }
  EXPECT_NEAR(n0, t.params.n - depleted, 1e-9 * t.params.n);
}

TEST(Kernels, TauIsNegativeAndShrinksWithMomentum) {
  const auto &t = table_1e4();
  double prev = -1e300;
  for (const auto &r : t.rows) {
    if (!t.regions.in_low_set(r.p))
      break;
    EXPECT_LT(r.nu, 0.0);
    EXPECT_GT(r.nu, prev);
    prev = r.nu;
  }
}

TEST(Kernels, ParameterValidation) {
  EXPECT_THROW(ScalingParams::make(1e4, 0.7), ConfigError);
  EXPECT_THROW(ScalingParams::make(1e4, 0.55, 0.2), ConfigError);
  EXPECT_THROW(ScalingParams::make(1e4, 0.55, 0.01, 0.6), ConfigError);
  EXPECT_THROW(ScalingParams::make(0.5, 0.55), ConfigError);
  EXPECT_THROW(tau(0.0, ScalingParams::make(1e4, 0.55), 0.1), ConfigError);
}
