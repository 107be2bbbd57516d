#include "blab/lattice.hpp"

#include <gtest/gtest.h>

using namespace blab;

TEST(Lattice, ShellCountsMatchNaiveEnumeration) {
  const std::int64_t M = 10000;
  std::vector<std::uint32_t> naive(M + 1, 0);
  const int K = 100;
  for (int x = -K; x <= K; ++x)
    for (int y = -K; y <= K; ++y)
      for (int z = -K; z <= K; ++z) {
        std::int64_t m = std::int64_t(x) * x + y * y + z * z;
        if (m <= M)
          ++naive[std::size_t(m)];
      }
  auto t = ShellTable::build(M);
  for (std::int64_t m = 0; m <= M; ++m)
    ASSERT_EQ(t.r3(m), naive[std::size_t(m)]) << "m=" << m;
  // the table lists the occupied shells, origin excluded
  std::size_t occupied = 0;
  for (std::int64_t m = 1; m <= M; ++m)
    occupied += naive[std::size_t(m)] > 0;
  EXPECT_EQ(t.size(), occupied);
  EXPECT_EQ(t.norms().front(), 1);
}

TEST(Lattice, FourSquareShellsAreEmpty) {
  auto t = ShellTable::build(200);
  for (std::int64_t m : {7, 15, 28, 60, 112})
    EXPECT_EQ(t.r3(m), 0u);
}

TEST(Lattice, RadialSumEqualsPointSum) {
  const std::int64_t M = 400;
  auto t = ShellTable::build(M);
  auto f = [](double p) { return std::exp(-p * p / 500.0); };
  auto r = radial_sum(t, [&](std::size_t i) { return f(t.radius(i)); }, [](std::size_t) { return true; }, false);
  double naive = 0;
  for (int x = -20; x <= 20; ++x)
    for (int y = -20; y <= 20; ++y)
      for (int z = -20; z <= 20; ++z) {
        std::int64_t m = std::int64_t(x) * x + y * y + z * z;
        if (m >= 1 && m <= M)
          naive += f(2.0 * pi * std::sqrt(double(m)));
      }
  EXPECT_NEAR(r.value, naive, 1e-12 * naive);
}

TEST(Lattice, MajorantTailCoversTheRemainder) {
  // sum over all n != 0 of |p|^-4, split at |n|^2 <= 900
  const std::int64_t M = 900;
  auto t = ShellTable::build(M);
  auto g = [](double p) { return std::pow(p, -4.0); };
  auto r = radial_sum(t, [&](std::size_t i) { return g(t.radius(i)); }, [](std::size_t) { return true; }, g);
  double far = 0;
  const int K = 150;
  for (int x = -K; x <= K; ++x)
    for (int y = -K; y <= K; ++y)
      for (int z = -K; z <= K; ++z) {
        std::int64_t m = std::int64_t(x) * x + y * y + z * z;
        if (m > M && m <= std::int64_t(K) * K)
          far += g(2.0 * pi * std::sqrt(double(m)));
      }
  EXPECT_GE(r.tail, far);
  EXPECT_LT(r.tail, 4.0 * far);
}

TEST(Lattice, SaveLoadRoundTrip) {
  auto dir = std::filesystem::temp_directory_path() / "blab_shell_test";
  std::filesystem::create_directories(dir);
  auto t = ShellTable::build(2000);
  t.save(dir / "s.bin");
  auto u = ShellTable::load(dir / "s.bin", 2000);
  ASSERT_TRUE(u.has_value());
  EXPECT_EQ(u->norms(), t.norms());
  EXPECT_FALSE(ShellTable::load(dir / "s.bin", 2001).has_value());
  std::filesystem::remove_all(dir);
}
