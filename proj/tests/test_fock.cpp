#include "blab/fock.hpp"

#include <gtest/gtest.h>

using namespace blab;
using namespace blab::fock;

namespace {

// Three interlocking pairs share the transfer v, so some triples overlap.
ModeSet degenerate_set() {
  ModeSet s;
  Mom r0{10, 3, -7}, v{1, 2, 0}, w{0, -1, 2};
  Mom r1 = r0 + v - w;
  auto add = [&](Mom k, Tag t, double e) {
    Mode m{k, t, e, std::sinh(e), std::cosh(e)};
    s.modes.push_back(m);
    m.k = -k;
    s.modes.push_back(m);
  };
  add(r0, Tag::H, -0.3);
  add(r0 + v, Tag::H, -0.4);
  add(v, Tag::S, 0.5);
  add(r1, Tag::H, -0.25);
  add(w, Tag::S, 0.35);
  s.finalize();
  return s;
}

std::vector<ModeSet> generic_sets() {
  return {generic_mode_set(1, 1, 1), generic_mode_set(1, 2, 2), generic_mode_set(2, 0, 3)};
}

} // namespace

TEST(Fock, GenericSetsHaveTheRequestedShape) {
  auto g = generic_sets();
  EXPECT_EQ(g[0].size(), 8u);
  EXPECT_EQ(g[1].size(), 10u);
  EXPECT_EQ(g[2].size(), 12u);
  for (const auto &ms : g) {
    EXPECT_TRUE(ms.generic());
    EXPECT_TRUE(ms.hyperbolic());
  }
  EXPECT_FALSE(degenerate_set().generic());
}

TEST(Fock, CubicOperatorOnVacuumByHand) {
  auto ms = generic_mode_set(2, 0, 3);
  auto v = apply_A(ms, FockVector::vacuum(), 4);
  // every pair (r, v) puts eta_r sigma_v / sqrt(N) on the state {r+v, -r, -v}
  std::map<std::array<int, 3>, double> amp;
  for (const auto &p : ms.pairs()) {
    std::array<int, 3> k{p.rv, ms.neg(p.r), ms.neg(p.v)};
    std::sort(k.begin(), k.end());
    amp[k] += ms[p.r].eta * ms[p.v].sigma / std::sqrt(ms.n);
  }
  double want = 0;
  for (const auto &[k, a] : amp)
    want += a * a;
  EXPECT_NEAR(v.norm2(), want, 1e-14);
  EXPECT_EQ(v.size(), amp.size());
  EXPECT_EQ(amp.size(), ms.triples().size());
}

TEST(Fock, LadderOperatorsCommute) {
  State s{{0, 2}, {3, 1}};
  State t = s;
  double c1 = create(t, 0, 10);
  double c2 = annihilate(t, 0);
  EXPECT_DOUBLE_EQ(c1 * c2, 3.0); // a a* = n + 1
  t = s;
  double d1 = annihilate(t, 0);
  double d2 = create(t, 0, 10);
  EXPECT_DOUBLE_EQ(d1 * d2, 2.0); // a* a = n
  EXPECT_EQ(annihilate(t, 5), 0.0);
  State full{{1, 3}};
  EXPECT_THROW(create(full, 1, 3), ResourceError);
}

TEST(Fock, ThetaOperatorIsAProjection) {
  auto ms = degenerate_set();
  auto x = xi(ms, 2).total();
  for (const auto &p : ms.pairs()) {
    auto once = theta_op_apply(ms, p, x);
    auto twice = theta_op_apply(ms, p, once);
    EXPECT_EQ(once.amp, twice.amp);
  }
}

TEST(Fock, CubicHalvesAreAdjoint) {
  auto ms = generic_mode_set(1, 2, 2);
  auto op = make_operator(ms, Family::EC);
  auto x = xi(ms, 3);
  auto a = x.total();
  auto b = apply_A(ms, a, 16);
  double lhs = b.dot(apply_terms(op.op_terms(false), a, 16));
  double rhs = a.dot(apply_terms(op.op_terms(true), b, 16));
  EXPECT_NEAR(lhs, rhs, 1e-14 * std::max(1.0, std::abs(lhs)));
}

TEST(Fock, ThetaConventionsAgainstTheOperator) {
  for (const auto &ms : generic_sets()) {
    auto r = check_theta(ms, 3);
    EXPECT_EQ(r.checks[0].agree, r.checks[0].tuples);
    EXPECT_EQ(r.selected, ThetaConvention::all_i);
  }
  auto r = check_theta(degenerate_set(), 3);
  EXPECT_EQ(r.checks[0].agree, r.checks[0].tuples);
  EXPECT_LT(r.checks[1].agree, r.checks[1].tuples);
  EXPECT_EQ(r.selected, ThetaConvention::all_i);
}

TEST(Fock, NormSeriesAndEveryFamilyOnGenericSets) {
  for (const auto &ms : generic_sets()) {
    auto v = verify(ms, 3);
    EXPECT_TRUE(v.passed());
    for (const auto &o : v.norm_orders)
      EXPECT_LE(o.abs_gap(), 1e-10 * std::max(1.0, std::abs(o.lhs)));
    for (const auto &f : v.families)
      for (std::size_t m = 0; m < f.orders.size(); ++m) {
        EXPECT_LE(f.orders[m].abs_gap(), 1e-9 * std::max(1.0, std::abs(f.orders[m].lhs)))
            << family_name(f.family) << " order " << m;
        EXPECT_EQ(f.pieces[m].residual_count, 0u) << family_name(f.family);
      }
  }
}

TEST(Fock, ThetaMattersForTheNorm) {
  auto ms = generic_mode_set(2, 0, 3);
  auto on = norm_series(ms, 3).total();
  auto off = norm_series(ms, 3, ThetaConvention::all_i, false).total();
  EXPECT_GT(std::abs(on - off), 1e-6);
  EXPECT_NEAR(on, xi(ms, 3).norm2(), 1e-12);
}

TEST(Fock, DegenerateSetFinding) {
  // Identities are not promised here; the outcome is recorded.
  auto v = verify(degenerate_set(), 3);
  EXPECT_FALSE(v.generic);
  EXPECT_TRUE(v.norm_total.holds(1e-10));
}

TEST(Fock, CoefficientsFromAKernelTable) {
  auto pot = Potential::soft_sphere(1.0, 1.0);
  auto t = make_kernels(pot, ScalingParams::make(1e5, 0.55, 0.01));
  auto ms = generic_mode_set(1, 1, 1);
  assign_from_kernels(ms, t, pot);
  EXPECT_FALSE(ms.toy);
  EXPECT_TRUE(ms.hyperbolic());
  EXPECT_TRUE(verify(ms, 2).passed());
}

TEST(Fock, JsonRoundTripAndValidation) {
  auto ms = generic_mode_set(1, 1, 1);
  auto back = ModeSet::from_json(nlohmann::json::parse(ms.to_json().dump()));
  ASSERT_EQ(back.size(), ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    EXPECT_EQ(back[int(i)].k, ms[int(i)].k);
    EXPECT_EQ(back[int(i)].sigma, ms[int(i)].sigma);
  }
  auto bad = nlohmann::json::parse(R"({"modes":[{"k":[1,0,0],"tag":"H","eta":-0.1}]})");
  EXPECT_THROW(ModeSet::from_json(bad), ConfigError);
  auto odd = nlohmann::json::parse(
      R"({"modes":[{"k":[1,0,0],"tag":"H","eta":-0.1},{"k":[-1,0,0],"tag":"H","eta":-0.2}]})");
  EXPECT_THROW(ModeSet::from_json(odd), ConfigError);
  EXPECT_THROW(verify(ms, 7), ConfigError);
}
