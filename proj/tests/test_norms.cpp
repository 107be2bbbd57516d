#include "blab/norms.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace blab;

TEST(Norms, SigmaLowSetMatchesNaiveTripleLoop) {
  auto prm = ScalingParams::make(1e4, 0.55, 0.01);
  auto t = make_kernels(Potential::soft_sphere(1.0, 1.0), prm);
  auto nr = norm_report(t);
  const double a = oracle::soft_sphere_a(1.0, 1.0);
  const double tl = std::pow(1e4, 0.55 / 2 + 0.01), ts = std::pow(1e4, 0.55 / 2 - 0.01);
  const int K = int(tl / (2 * pi)) + 1;
  double l2 = 0, s2 = 0, sh1 = 0, gs1 = 0, sinf = 0;
  for (int x = -K; x <= K; ++x)
    for (int y = -K; y <= K; ++y)
      for (int z = -K; z <= K; ++z) {
        if (!x && !y && !z)
          continue;
        double p = 2 * pi * std::sqrt(double(x * x + y * y + z * z));
        if (p > tl)
          continue;
        double tau = oracle::tau_direct(p, a, 1e4, 0.55);
        double s = std::sinh(tau), g = std::cosh(tau);
        l2 += s * s;
        if (p >= ts) {
          s2 += s * s;
          sh1 += p * p * s * s;
          gs1 += std::abs(g * s);
          sinf = std::max(sinf, s * s);
        }
      }
  EXPECT_NEAR(nr.sigma_l_l2.value, l2, 1e-12 * l2);
  EXPECT_NEAR(nr.sigma_s_l2.value, s2, 1e-12 * s2);
  EXPECT_NEAR(nr.sigma_s_h1.value, sh1, 1e-12 * sh1);
  EXPECT_NEAR(nr.gs_s_l1.value, gs1, 1e-12 * gs1);
  EXPECT_NEAR(nr.sigma_s_inf2, sinf, 1e-14);
  EXPECT_FALSE(nr.s_empty);
}

TEST(Norms, EtaHighMatchesPointSumPlusTail) {
  auto prm = ScalingParams::make(1e4, 0.55, 0.01);
  auto t = make_kernels(Potential::soft_sphere(1.0, 1.0), prm);
  auto nr = norm_report(t);
  const double th = std::pow(1e4, 1 - 0.55 - 0.01);
  const int K = int(std::sqrt(double(t.shells->max_norm2())));
  double l2 = 0, inf = 0;
  for (int x = -K; x <= K; ++x)
    for (int y = -K; y <= K; ++y)
      for (int z = -K; z <= K; ++z) {
        std::int64_t m = std::int64_t(x) * x + y * y + z * z;
        if (m == 0 || m > t.shells->max_norm2() || 2 * pi * std::sqrt(double(m)) <= th)
          continue;
        double e = t.find(m)->eta;
        l2 += e * e;
        inf = std::max(inf, std::abs(e));
      }
  EXPECT_NEAR(nr.eta_h_l2.value, l2, 1e-12 * l2);
  EXPECT_EQ(nr.eta_h_inf, inf);
  EXPECT_GE(nr.eta_h_l2.tail, 0.0);
  EXPECT_LT(nr.eta_h_l2.tail, 0.05 * l2);
}

TEST(Norms, EmptySRegionReportsGammaOne) {
  // at N = 1e3, kappa = 0.5 no lattice shell falls in P_S
  auto prm = ScalingParams::make(1e3, 0.5, 0.01);
  auto t = make_kernels(Potential::soft_sphere(1.0, 1.0), prm);
  auto nr = norm_report(t);
  ASSERT_TRUE(nr.s_empty);
  EXPECT_EQ(nr.gamma_s_inf2, 1.0);
  EXPECT_EQ(nr.sigma_s_l2.value, 0.0);
}

TEST(Norms, ZeroPotentialGivesZeroNorms) {
  auto t = make_kernels(Potential::soft_sphere(0.0, 1.0), ScalingParams::make(1e4, 0.55, 0.01));
  auto nr = norm_report(t);
  EXPECT_EQ(nr.eta_h_l2.value, 0.0);
  EXPECT_EQ(nr.sigma_l_l2.value, 0.0);
  EXPECT_EQ(n_zero(t), 1e4);
}
