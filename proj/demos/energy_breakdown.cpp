// Bogoliubov kernels and the six terms of C_GN at one N, against the
// Lee-Huang-Yang main term.

#include "blab/energy.hpp"
#include "blab/norms.hpp"

#include <cstdio>

int main(int argc, char **argv) {
  using namespace blab;
  double n = argc > 1 ? std::atof(argv[1]) : 1e4;
  auto pot = Potential::soft_sphere(1.0, 1.0);
  auto prm = ScalingParams::make(n, 0.55, 0.01);
  auto t = make_kernels(pot, prm);
  std::printf("N = %g, kappa = 0.55: %zu shells, a = %.10f\n", n, t.size(), t.a);
  std::printf("thresholds t_S = %.3f  t_L = %.3f  t_H = %.3f\n", t.regions.t_s, t.regions.t_l, t.regions.t_h);

  auto nr = norm_report(t);
  auto names = NormReport::names();
  auto vals = nr.values();
  auto tails = nr.tails();
  for (std::size_t i = 0; i < names.size(); ++i)
    std::printf("  %-18s %14.6e  (tail %.1e)\n", names[i].c_str(), vals[i], tails[i]);

  auto e = c_gn_breakdown(t, pot);
  for (std::size_t i = 0; i < e.terms.size(); ++i)
    std::printf("  term %zu %16.8e  tail %.2e%s\n", i + 1, e.terms[i].value, e.terms[i].tail,
                e.terms[i].estimated_tail ? " (estimate)" : "");
  std::printf("C_GN        %16.8e\n", e.c_gn());
  std::printf("4 pi a N^{1+k} (1 + LHY) = %.8e + %.8e\n", e.main.leading, e.main.correction);
  std::printf("N0 = %.3f\n", e.n0);
}
