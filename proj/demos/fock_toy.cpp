// Brute-force Fock-space check on a small random mode set: the norm of the
// trial state and the E_C expectation against their contraction series.

#include "blab/fock.hpp"

#include <cstdio>

int main() {
  using namespace blab::fock;
  auto ms = generic_mode_set(1, 1, 1);
  std::printf("%zu modes, %zu admissible pairs, %zu triples\n", ms.size(), ms.pairs().size(), ms.triples().size());
  for (const auto &m : ms.modes)
    std::printf("  k = (%3d,%3d,%3d) %s  eta %.3f sigma %.3f\n", m.k[0], m.k[1], m.k[2], tag_name(m.tag), m.eta,
                m.sigma);

  auto v = verify(ms, 3, {Family::EC, Family::EM1});
  std::printf("theta convention: %s\n", convention_name(v.theta.selected));
  for (std::size_t m = 0; m < v.norm_orders.size(); ++m)
    std::printf("||xi_%zu||^2   matrix %.15f  series %.15f\n", m, v.norm_orders[m].lhs, v.norm_orders[m].rhs);
  for (const auto &f : v.families) {
    std::printf("%s\n", family_name(f.family).c_str());
    for (std::size_t m = 0; m < f.orders.size(); ++m) {
      std::printf("  order %zu: matrix %+.3e series %+.3e  [", m, f.orders[m].lhs, f.orders[m].rhs);
      for (std::size_t k = 0; k < f.pieces[m].names.size(); ++k)
        std::printf(" %s=%+.2e", f.pieces[m].names[k].c_str(), f.pieces[m].value[k]);
      std::printf(" ]\n");
    }
  }
  std::printf("all identities hold: %s\n", v.passed() ? "yes" : "no");
}
