// Scattering lengths and the Neumann problem for the two built-in profiles.

#include "blab/potential.hpp"

#include <cstdio>

int main() {
  using namespace blab;
  std::printf("%-8s %10s %14s %14s %14s\n", "V0", "profile", "a", "closed form", "lambda(N=1e4)");
  for (double v0 : {0.5, 5.0, 50.0}) {
    for (auto pot : {Potential::soft_sphere(v0, 1.0), Potential::bump(v0, 1.0)}) {
      auto sol = solve_neumann(pot, {1e4, 0.55, 0.25});
      auto cf = closed_form_scattering_length(pot);
      std::printf("%-8g %10s %14.10f %14s %14.6e\n", v0, cf ? "soft" : "bump", sol.scattering_length(),
                  cf ? std::to_string(*cf).c_str() : "-", sol.lambda());
    }
  }
  // lambda ~ 3a / Lb^3 for a small ball: compare
  auto pot = Potential::soft_sphere(1.0, 1.0);
  auto sol = solve_neumann(pot, {1e4, 0.55, 0.25});
  double lb = sol.ball_radius();
  std::printf("\nLb = %.3f: lambda = %.6e, 3a/Lb^3 = %.6e\n", lb, sol.lambda(), 3 * sol.scattering_length() / (lb * lb * lb));
}
