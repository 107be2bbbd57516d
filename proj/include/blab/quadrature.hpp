#pragma once

#include "blab/core.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <vector>

namespace blab {

/// A fixed quadrature rule: nodes and weights, reusable across integrands.
struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;

  template <class F> double integrate(F &&f) const {
    std::vector<double> terms(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      terms[i] = w[i] * f(x[i]);
    return pairwise_sum(terms);
  }
};

/// 20-point Gauss-Legendre on each panel of a composite rule. `breaks` must be
/// increasing; each interval [breaks[i], breaks[i+1]] is split so that no
/// panel is longer than `max_panel`.
inline QuadRule panel_rule(const std::vector<double> &breaks, double max_panel) {
  using G = boost::math::quadrature::gauss<double, 20>;
  // boost stores the non-negative half of the symmetric rule.
  const auto &ax = G::abscissa();
  const auto &aw = G::weights();
  QuadRule rule;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    double lo = breaks[b], hi = breaks[b + 1];
    if (!(hi > lo))
      continue;
    auto npan = static_cast<std::size_t>(std::ceil((hi - lo) / max_panel));
    npan = std::max<std::size_t>(npan, 1);
    double h = (hi - lo) / static_cast<double>(npan);
    for (std::size_t k = 0; k < npan; ++k) {
      double c = lo + (k + 0.5) * h, r = 0.5 * h;
      for (std::size_t i = 0; i < ax.size(); ++i) {
        if (ax[i] == 0.0) {
          rule.x.push_back(c);
          rule.w.push_back(r * aw[i]);
        } else {
          rule.x.push_back(c - r * ax[i]);
          rule.w.push_back(r * aw[i]);
          rule.x.push_back(c + r * ax[i]);
          rule.w.push_back(r * aw[i]);
        }
      }
    }
  }
  return rule;
}

/// Panel length giving at least 8 nodes per oscillation of sin(k r) for all
/// k <= kmax, and never coarser than `base`.
inline double oscillation_panel(double kmax, double base) {
  if (kmax <= 0.0)
    return base;
  double wavelength = 2.0 * pi / kmax;
  // 20 nodes per panel => panel <= 2.5 wavelengths gives 8 nodes/wavelength;
  // we take one wavelength for extra margin on the 1e-10 target.
  return std::min(base, wavelength);
}

/// 4 pi \int r^2 g(r) sinc(k r) dr, the 3-D Fourier transform of a radial
/// profile, evaluated with a precomputed rule.
template <class G>
double radial_fourier(const QuadRule &rule, G &&g, double k) {
  return 4.0 * pi * rule.integrate([&](double r) {
    return r * r * g(r) * sinc(k * r);
  });
}

} // namespace blab
