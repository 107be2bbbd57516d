#include "blab/errbounds.hpp"

#include <gtest/gtest.h>

using namespace blab;

namespace {

// Norms that are exact powers of N: ||eta_H||^2 = N^{3k-1}, ||sigma_S||^2 =
// ||gamma sigma||_1 = N^{3k/2}, sup norms = 1.
NormReport power_norms(double n, double k) {
  NormReport r;
  r.eta_h_l2.value = std::pow(n, 3 * k - 1);
  r.eta_h_h1.value = std::pow(n, 1 + k);
  r.eta_h_inf = std::pow(n, 3 * k - 2);
  r.sigma_s_l2.value = std::pow(n, 1.5 * k);
  r.sigma_s_h1.value = std::pow(n, 2.5 * k);
  r.gs_s_l1.value = std::pow(n, 1.5 * k);
  r.sigma_s_inf2 = 1.0;
  r.gamma_s_inf2 = 2.0;
  r.s_empty = false;
  return r;
}

} // namespace

TEST(ErrBounds, LeastSquaresRecoversAPowerLaw) {
  std::vector<double> x{1e3, 1e4, 1e5, 1e6}, y;
  for (double v : x)
    y.push_back(3.0 * std::pow(v, 1.7));
  auto f = fit(x, y);
  EXPECT_NEAR(f.slope, 1.7, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-9);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  EXPECT_THROW(fit({1, 2}, {1, 2}), ConfigError);
  EXPECT_THROW(fit({1, 2, 3}, {1, -2, 3}), ConfigError);
}

TEST(ErrBounds, LogGrid) {
  auto g = log_grid(1e3, 1e6, 7);
  ASSERT_EQ(g.size(), 7u);
  EXPECT_DOUBLE_EQ(g.front(), 1e3);
  EXPECT_NEAR(g.back(), 1e6, 1e-6);
  EXPECT_NEAR(g[2], 1e4, 1e-8);
  EXPECT_THROW(log_grid(1e3, 1e6, 0), ConfigError);
}

TEST(ErrBounds, CompositeBoundsAgainstHandEvaluation) {
  const double n = 1e4, k = 0.55;
  auto prm = ScalingParams::make(n, k, 0.01);
  auto r = power_norms(n, k);
  double el2 = r.eta_h_l2.value, sl2 = r.sigma_s_l2.value, g1 = r.gs_s_l1.value;
  double ei = r.eta_h_inf;
  EXPECT_NEAR(composite_bound(ErrorTermId::EC, r, prm), std::pow(n, k - 1) * el2 * (g1 + sl2), 1e-9);
  double c = std::pow(n, k - 2) * sl2 * el2 * el2;
  EXPECT_NEAR(composite_bound(ErrorTermId::EH_C, r, prm), c, 1e-12 * c);
  double a = std::pow(n, k - 2) * sl2 * (n * ei * ei * el2 + ei * ei * el2 * el2 + el2 * el2);
  EXPECT_NEAR(composite_bound(ErrorTermId::EH_A, r, prm), a, 1e-12 * a);
  EXPECT_EQ(composite_bound_as_printed(ErrorTermId::EM3_M1p, r, prm),
            n * composite_bound(ErrorTermId::EM3_M1p, r, prm));
}

TEST(ErrBounds, SweepFitOnSyntheticNormsHitsTheExactExponent) {
  const double k = 0.55;
  NormSweep sw;
  sw.base = ScalingParams::make(1e4, k, 0.01);
  sw.ns = log_grid(1e3, 1e6, 5);
  for (double n : sw.ns) {
    sw.norms.emplace_back(power_norms(n, k));
    sw.failures.emplace_back();
  }
  auto fits = sweep_fit({ErrorTermId::EC, ErrorTermId::EH_C}, sw);
  // EC: (k-1) + (3k-1) + 3k/2 ; EH_C: (k-2) + 3k/2 + 2(3k-1)
  EXPECT_NEAR(fits[0].fit->slope, 5.5 * k - 2, 1e-9);
  EXPECT_NEAR(fits[1].fit->slope, 8.5 * k - 4, 1e-9);
  EXPECT_TRUE(fits[0].pass()); // 3.025 - 2 = 1.025 <= 5k/2 - eps + 0.1
}

TEST(ErrBounds, EmptyRegionPointsAreExcludedWithAReason) {
  NormSweep sw;
  sw.base = ScalingParams::make(1e4, 0.55, 0.01);
  sw.ns = log_grid(1e3, 1e6, 5);
  for (std::size_t i = 0; i < sw.ns.size(); ++i) {
    auto r = power_norms(sw.ns[i], 0.55);
    r.s_empty = i == 0;
    sw.norms.emplace_back(r);
    sw.failures.emplace_back();
  }
  sw.norms[1].reset();
  sw.failures[1] = "solver failed";
  auto f = sweep_fit({ErrorTermId::EC}, sw)[0];
  EXPECT_NE(f.excluded[0].find("empty region"), std::string::npos);
  EXPECT_NE(f.excluded[1].find("solver failed"), std::string::npos);
  EXPECT_FALSE(f.fit.has_value()); // 3 points left, 4 needed
  EXPECT_FALSE(f.pass());
}

TEST(ErrBounds, TermIdsRoundTrip) {
  for (auto id : all_error_terms())
    EXPECT_EQ(parse_term(term_name(id)), id);
  EXPECT_EQ(all_error_terms().size(), 18u);
  EXPECT_THROW(parse_term("EZ"), ConfigError);
}

TEST(ErrBounds, NormFitsOnSyntheticSweep) {
  const double k = 0.55;
  NormSweep sw;
  sw.base = ScalingParams::make(1e4, k, 0.01);
  sw.ns = log_grid(1e3, 1e6, 4);
  for (double n : sw.ns) {
    sw.norms.emplace_back(power_norms(n, k));
    sw.failures.emplace_back();
  }
  for (const auto &f : norm_fits(sw))
    EXPECT_TRUE(f.pass()) << f.name;
}
