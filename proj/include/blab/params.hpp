#pragma once

#include "blab/core.hpp"

#include <optional>
#include <string>

namespace blab {

/// (N, kappa, eps, l). N is a real scale so sweeps may use non-integer values.
struct ScalingParams {
  double n = 1e4;
  double kappa = 0.55;
  double eps = 0.01;
  double ell = 0.25;
  // Exact forms when the user supplied them; used by the exponent calculus.
  std::optional<Rational> kappa_q, eps_q;

  static double default_eps(double kappa) {
    return std::min(0.01, (2.0 - 3.0 * kappa) / 8.0);
  }

  static ScalingParams make(double n, double kappa,
                            std::optional<double> eps = std::nullopt,
                            double ell = 0.25) {
    ScalingParams p;
    p.n = n;
    p.kappa = kappa;
    p.eps = eps ? *eps : default_eps(kappa);
    p.ell = ell;
    p.validate();
    return p;
  }

  ScalingParams with_n(double n2) const {
    ScalingParams p = *this;
    p.n = n2;
    p.validate();
    return p;
  }

  double scale() const { return std::pow(n, 1.0 - kappa); } // N^{1-kappa}
  double n_kappa() const { return std::pow(n, kappa); }

  void validate() const {
    auto fail = [](const std::string &m) { throw ConfigError("invalid parameters: " + m); };
    if (!(n > 1.0) || !std::isfinite(n))
      fail("N must be > 1");
    if (!(kappa > 0.0 && kappa < 2.0 / 3.0))
      fail("kappa must lie in (0, 2/3), got " + fmt_double(kappa));
    if (!(eps > 0.0))
      fail("eps must be > 0");
    if (!(3.0 * kappa - 2.0 + 4.0 * eps < 0.0))
      fail("3 kappa - 2 + 4 eps must be < 0 (kappa=" + fmt_double(kappa) +
           ", eps=" + fmt_double(eps) + ")");
    if (!(ell > 0.0 && ell < 0.5))
      fail("l must lie in (0, 1/2)");
    double ts = std::pow(n, kappa / 2 - eps), tl = std::pow(n, kappa / 2 + eps),
           th = std::pow(n, 1 - kappa - eps);
    if (!(ts < tl && tl < th))
      fail("momentum thresholds out of order at N=" + fmt_double(n));
  }

  std::string key() const {
    return "N=" + fmt_double(n) + ",kappa=" + fmt_double(kappa) +
           ",eps=" + fmt_double(eps) + ",l=" + fmt_double(ell);
  }
};

enum class Region { low, S, mid, high };

inline const char *region_name(Region r) {
  switch (r) {
  case Region::low: return "low";
  case Region::S: return "S";
  case Region::mid: return "mid";
  case Region::high: return "high";
  }
  return "?";
}

/// Thresholds t_S^- = N^{k/2-e}, t_L = N^{k/2+e}, t_H = N^{1-k-e}.
struct MomentumRegions {
  double t_s = 0, t_l = 0, t_h = 0;

  explicit MomentumRegions(const ScalingParams &p)
      : t_s(std::pow(p.n, p.kappa / 2 - p.eps)),
        t_l(std::pow(p.n, p.kappa / 2 + p.eps)),
        t_h(std::pow(p.n, 1 - p.kappa - p.eps)) {}

  Region classify(double abs_p) const {
    if (!(abs_p > 0.0))
      throw ConfigError("classify: p = 0 is not in the momentum set");
    if (abs_p > t_h)
      return Region::high;
    if (abs_p > t_l)
      return Region::mid;
    if (abs_p >= t_s)
      return Region::S;
    return Region::low;
  }

  bool in_low_set(double abs_p) const { return abs_p > 0.0 && abs_p <= t_l; }
};

/// tanh(2 tau_p) = -8 pi a N^k / (p^2 + 8 pi a N^k).
inline double tau(double p2, const ScalingParams &prm, double a) {
  if (!(p2 > 0.0))
    throw ConfigError("tau: p = 0 is not in the momentum set");
  double A = 8.0 * pi * a * prm.n_kappa();
  return 0.5 * std::atanh(-A / (p2 + A));
}

} // namespace blab
