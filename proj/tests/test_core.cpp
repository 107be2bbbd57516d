#include "blab/core.hpp"

#include <gtest/gtest.h>

using blab::Rational;

TEST(Core, RationalParsing) {
  EXPECT_EQ(Rational::parse("7/12"), Rational(7, 12));
  EXPECT_EQ(Rational::parse("0.55"), Rational(11, 20));
  EXPECT_EQ(Rational::parse("-3"), Rational(-3));
  EXPECT_EQ(Rational::parse("14/24"), Rational(7, 12));
  EXPECT_THROW(Rational::parse("1/0"), blab::ConfigError);
  EXPECT_THROW(Rational::parse("abc"), blab::ConfigError);
  EXPECT_EQ(Rational(-4, -6).str(), "2/3");
}

TEST(Core, RationalArithmetic) {
  Rational a(1, 3), b(1, 6);
  EXPECT_EQ(a + b, Rational(1, 2));
  EXPECT_EQ(a - b, Rational(1, 6));
  EXPECT_EQ(a * b, Rational(1, 18));
  EXPECT_EQ(a / b, Rational(2));
  EXPECT_TRUE(b < a);
}

TEST(Core, PairwiseSumIsOrderFixedAndAccurate) {
  std::vector<double> v(1 << 20, 0.1);
  EXPECT_NEAR(blab::pairwise_sum(v), 0.1 * (1 << 20), 1e-6);
  EXPECT_EQ(blab::pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(Core, BudgetCheckThrowsResourceError) {
  auto saved = blab::memory_budget();
  blab::set_memory_budget(1000);
  EXPECT_THROW(blab::check_budget(2000, "x"), blab::ResourceError);
  EXPECT_NO_THROW(blab::check_budget(500, "x"));
  blab::set_memory_budget(saved);
}

TEST(Core, ErrorKindsMapToExitCodes) {
  EXPECT_EQ(int(blab::ConfigError("x").kind()), 2);
  EXPECT_EQ(int(blab::ResourceError("x").kind()), 3);
  EXPECT_EQ(int(blab::SolverError("x").kind()), 4);
}
