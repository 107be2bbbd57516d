#include "blab/kernels.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace blab;

namespace {

// Lowest eigenvalue of -u'' + V/2 u = lambda u on [0, Lb], u(0) = 0,
// u'(Lb) = u(Lb)/Lb (Neumann for f = u/y). Second-order finite differences,
// inverse iteration at shift 0 with a tridiagonal solve.
double fd_neumann_eigenvalue(const Potential &pot, double lb, int n) {
  const double h = lb / n;
  std::vector<double> lo(n), di(n), up(n);
  for (int i = 1; i <= n; ++i) {
    double y = i * h;
    double q = 0.5 * 0.5 * (pot(y - 0.25 * h) + pot(y + 0.25 * h));
    di[i - 1] = 2.0 / (h * h) + q;
    lo[i - 1] = -1.0 / (h * h);
    up[i - 1] = -1.0 / (h * h);
  }
  // ghost node u_{n+1} = u_{n-1} + 2 h u_n / Lb
  lo[n - 1] = -2.0 / (h * h);
  di[n - 1] -= 2.0 / (h * lb);
  std::vector<double> u(n, 1.0), w(n);
  double lambda = 0.0;
  for (int it = 0; it < 60; ++it) {
    // Thomas solve A w = u
    std::vector<double> c(n), d(n);
    c[0] = up[0] / di[0];
    d[0] = u[0] / di[0];
    for (int i = 1; i < n; ++i) {
      double m = di[i] - lo[i] * c[i - 1];
      c[i] = up[i] / m;
      d[i] = (u[i] - lo[i] * d[i - 1]) / m;
    }
    w[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i)
      w[i] = d[i] - c[i] * w[i + 1];
    double num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
      num += u[i] * w[i];
      den += w[i] * w[i];
    }
    lambda = num / den;
    double nrm = std::sqrt(den);
    for (int i = 0; i < n; ++i)
      u[i] = w[i] / nrm;
  }
  return lambda;
}

} // namespace

TEST(Potential, SoftSphereScatteringLengthMatchesClosedForm) {
  for (double v0 : {0.5, 1.0, 5.0, 50.0}) {
    double k0 = std::sqrt(v0 / 2.0);
    double exact = 1.0 - std::tanh(k0) / k0;
    double a = scattering_length(Potential::soft_sphere(v0, 1.0));
    EXPECT_LT(std::abs(a - exact) / exact, 1e-8) << "V0=" << v0;
  }
}

TEST(Potential, ScatteringLengthBelowBornAndMonotone) {
  double prev = 0.0;
  for (double v0 : {0.1, 1.0, 10.0, 100.0}) {
    auto p = Potential::bump(v0, 1.0);
    double a = scattering_length(p);
    // (1/8 pi) int V = (1/8 pi) 4 pi V0 int r^2 (1-r^2)^3 = V0 * 16/315 / 2
    double born = v0 * (16.0 / 315.0) / 2.0;
    EXPECT_GT(a, prev);
    EXPECT_LT(a, born);
    prev = a;
  }
}

TEST(Potential, ZeroPotentialHasZeroLength) {
  EXPECT_EQ(scattering_length(Potential::soft_sphere(0.0, 1.0)), 0.0);
  auto sol = solve_neumann(Potential::soft_sphere(0.0, 1.0), {1e3, 0.55, 0.25});
  EXPECT_TRUE(sol.trivial());
}

TEST(Potential, FourierHatSoftSphereClosedForm) {
  auto p = Potential::soft_sphere(3.0, 1.5);
  for (double k : {0.0, 0.3, 2.0, 11.0}) {
    double exact = k == 0.0 ? 4.0 * pi * 3.0 * 1.5 * 1.5 * 1.5 / 3.0
                            : 4.0 * pi * 3.0 * (std::sin(k * 1.5) - k * 1.5 * std::cos(k * 1.5)) / (k * k * k);
    EXPECT_NEAR(fourier_hat(p, k), exact, 1e-11 * std::abs(4.0 * pi * 3.0 * 1.125));
  }
}

TEST(Potential, NeumannEigenvalueMatchesFiniteDifferences) {
  auto p = Potential::soft_sphere(2.0, 1.0);
  NeumannGeometry g{1e3, 0.55, 0.25};
  auto sol = solve_neumann(p, g);
  double fd = fd_neumann_eigenvalue(p, g.ball_radius(), 40000);
  EXPECT_NEAR(sol.lambda(), fd, 1e-4 * fd);
  EXPECT_LT(std::abs(sol.boundary_slope()), 1e-10);
  EXPECT_NEAR(sol.f(g.ball_radius()), 1.0, 1e-12);
}

TEST(Potential, WHatMatchesBruteQuadrature) {
  auto p = Potential::soft_sphere(1.0, 1.0);
  auto sol = solve_neumann(p, {1e3, 0.55, 0.25});
  auto wh = sol.w_hat(50.0);
  double ref = oracle::brute_w_hat(sol, 0.0);
  for (double k : {0.0, 0.05, 0.7, 3.0, 20.0})
    EXPECT_NEAR(wh(k), oracle::brute_w_hat(sol, k), 1e-8 * ref) << "k=" << k;
}

TEST(Potential, ParsevalForWHat) {
  auto p = Potential::soft_sphere(1.0, 1.0);
  auto prm = ScalingParams::make(1e4, 0.55, 0.01);
  auto sol = solve_neumann(p, {prm.n, prm.kappa, prm.ell});
  auto c = parseval_check(sol, prm, 20.0);
  EXPECT_LT(c.rel_gap(), 1e-6);
  EXPECT_GE(c.tail, 0.0);
}

TEST(Potential, RejectsBadInput) {
  EXPECT_THROW(Potential::soft_sphere(-1.0, 1.0), ConfigError);
  EXPECT_THROW(Potential::bump(1.0, 0.0), ConfigError);
  EXPECT_THROW(Potential::tabulated({0.0, 1.0}, {1.0, -1.0}), ConfigError);
  // support must sit inside the Neumann ball
  EXPECT_THROW(solve_neumann(Potential::soft_sphere(1.0, 10.0), {1e3, 0.55, 0.25}), ConfigError);
}

TEST(Potential, TabulatedInterpolatesLinearly) {
  auto p = Potential::tabulated({0.0, 0.5, 1.0}, {2.0, 1.0, 0.0});
  EXPECT_DOUBLE_EQ(p(0.25), 1.5);
  EXPECT_DOUBLE_EQ(p(0.75), 0.5);
  EXPECT_EQ(p(1.2), 0.0);
}
