#pragma once

#include "blab/norms.hpp"

#include <map>

namespace blab {

enum class ErrorTermId {
  EC,
  EH_A, EH_B, EH_C, EH_D,
  ES_I_II, ES_III, ES_It_IIt, ES_IIIt,
  EM1_M1, EM1_M2, EM1_M3,
  EM2_M1t, EM2_M2t, EM2_M3t,
  EM3_M1p, EM3_M2p, EM3_M3p,
};

inline const std::vector<ErrorTermId> &all_error_terms() {
  using E = ErrorTermId;
  static const std::vector<E> v{E::EC,      E::EH_A,    E::EH_B,    E::EH_C,    E::EH_D,
                                E::ES_I_II, E::ES_III,  E::ES_It_IIt, E::ES_IIIt, E::EM1_M1,
                                E::EM1_M2,  E::EM1_M3,  E::EM2_M1t, E::EM2_M2t, E::EM2_M3t,
                                E::EM3_M1p, E::EM3_M2p, E::EM3_M3p};
  return v;
}

inline std::string term_name(ErrorTermId id) {
  static const char *names[] = {"EC",      "EH_A",    "EH_B",    "EH_C",    "EH_D",
                                "ES_I_II", "ES_III",  "ES_It_IIt", "ES_IIIt", "EM1_M1",
                                "EM1_M2",  "EM1_M3",  "EM2_M1t", "EM2_M2t", "EM2_M3t",
                                "EM3_M1p", "EM3_M2p", "EM3_M3p"};
  return names[static_cast<int>(id)];
}

/// Conventional name of the bound each id transcribes.
inline std::string term_label(ErrorTermId id) {
  static const char *labels[] = {"EC", "A",      "B",       "C",       "D",       "I",
                                 "III", "Itilde", "IIItilde", "M1",     "M2",      "M3",
                                 "M1tilde", "M2tilde", "M3tilde", "M1'", "M2'", "M3'"};
  return labels[static_cast<int>(id)];
}

inline ErrorTermId parse_term(const std::string &s) {
  for (auto id : all_error_terms())
    if (term_name(id) == s)
      return id;
  throw ConfigError("unknown error term id '" + s + "'");
}

namespace detail {
struct BoundInputs {
  double N, k, e;
  double el2;  // ||eta_H||^2
  double einf; // ||eta_H||_inf
  double sl2;  // ||sigma_S||^2
  double g1;   // ||gamma_S sigma_S||_1
  double sinf; // ||sigma_S||_inf
  double ginf; // ||gamma_S||_inf
};

inline BoundInputs inputs(const NormReport &n, const ScalingParams &p) {
  return {p.n,
          p.kappa,
          p.eps,
          n.eta_h_l2.value,
          n.eta_h_inf,
          n.sigma_s_l2.value,
          n.gs_s_l1.value,
          std::sqrt(n.sigma_s_inf2),
          std::sqrt(n.gamma_s_inf2)};
}
} // namespace detail

/// The displayed right-hand side with every constant C set to 1.
inline double composite_bound(ErrorTermId id, const NormReport &norms, const ScalingParams &prm) {
  const auto b = detail::inputs(norms, prm);
  const double N = b.N, k = b.k, e = b.e;
  const double el2 = b.el2, ei = b.einf, sl2 = b.sl2, g1 = b.g1, si = b.sinf, gi = b.ginf;
  const double ei2 = ei * ei, el4 = el2 * el2, sl4 = sl2 * sl2;
  auto P = [N](double x) { return std::pow(N, x); };
  using E = ErrorTermId;
  switch (id) {
  case E::EC:
    return P(k - 1) * el2 * (g1 + sl2);
  case E::EH_A:
    return P(k - 2) * sl2 * (N * ei2 * el2 + ei2 * el4 + el4);
  case E::EH_B:
  case E::EH_D:
    return P(k - 3) * sl4 * el4 * ei2;
  case E::EH_C:
    return P(k - 2) * sl2 * el4;
  case E::ES_I_II:
  case E::ES_It_IIt:
    return P(k - 3 + 2 * e) * sl4 * el4;
  case E::ES_III:
    return P(k - 3) * el2 * ei2 * si * (sl4 * sl2 * si + g1 * g1 * g1 * gi + sl2 * g1 * g1 * si);
  case E::ES_IIIt:
    return P(k - 3) * el2 * ei2 * si * si * g1 * g1 * sl2;
  case E::EM1_M1:
    return P(k - 2) * el2 * (sl4 * ei2 + g1 * g1 + sl2 * g1 * ei);
  case E::EM1_M2:
    return P(k - 3) * el4 * sl4 * (si * si * ei2 + gi * gi + gi * si * ei);
  case E::EM1_M3:
    return P(k - 3) * el2 * ei2 * sl2 * (sl4 * ei2 + g1 * g1 + sl2 * g1 * ei);
  case E::EM2_M1t:
    return P(k - 2) * el2 * (g1 * g1 * ei2 + g1 * sl2 * ei + sl4);
  case E::EM2_M2t:
    return P(k - 3) * el4 * sl4 * (gi * gi * ei2 + ei * si * gi + si * si);
  case E::EM2_M3t:
    return P(k - 3) * el2 * ei2 * sl2 * (g1 * g1 * ei2 + g1 * sl2 * ei + sl4);
  case E::EM3_M1p:
    return P(k - 2) * el2 * (sl4 * ei2 + g1 * g1 + g1 * g1 * ei2 + sl2 * g1 * ei);
  case E::EM3_M2p:
    return P(k - 3) * el4 * sl4 * (si * si * ei2 + gi * gi + gi * gi * ei2 + gi * si * ei);
  case E::EM3_M3p:
    return P(k - 3) * sl2 * el2 * ei2 * (sl4 * ei2 + g1 * g1 + g1 * sl2 * ei);
  }
  throw ConfigError("composite_bound: unknown id");
}

/// The M1' bound with the literal N^{k-1} prefactor instead of N^{k-2}.
inline double composite_bound_as_printed(ErrorTermId id, const NormReport &norms,
                                         const ScalingParams &prm) {
  if (id == ErrorTermId::EM3_M1p)
    return prm.n * composite_bound(id, norms, prm);
  return composite_bound(id, norms, prm);
}

//==============================================================================

struct ExponentFit {
  double slope = 0, intercept = 0, r2 = 0;
  std::vector<double> ns, values;
  bool low_r2() const { return r2 < 0.99; }
};

/// Ordinary least squares of log y against log x.
inline ExponentFit fit(const std::vector<double> &xs, const std::vector<double> &ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw ConfigError("fit: need at least 3 points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw ConfigError("fit: log-log fit needs positive data");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const double n = double(lx.size());
  const double mx = pairwise_sum(lx) / n, my = pairwise_sum(ly) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 1e-24 * std::max(1.0, mx * mx)))
    throw ConfigError("fit: degenerate abscissae");
  ExponentFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  f.ns = xs;
  f.values = ys;
  return f;
}

/// N grid lo..hi with `count` log-spaced points.
inline std::vector<double> log_grid(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || !(hi >= lo))
    throw ConfigError("sweep grid: need count >= 1 and 0 < lo <= hi");
  std::vector<double> g;
  for (int i = 0; i < count; ++i) {
    double t = count == 1 ? 0.0 : double(i) / (count - 1);
    g.push_back(std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo))));
  }
  return g;
}

/// Norms over an N grid; failing points are recorded, not fatal.
struct NormSweep {
  ScalingParams base;
  std::vector<double> ns;
  std::vector<std::optional<NormReport>> norms;
  std::vector<std::string> failures; ///< empty string = success
};

inline NormSweep run_norm_sweep(const Potential &pot, const ScalingParams &base,
                                const std::vector<double> &grid) {
  if (grid.empty())
    throw ConfigError("empty N grid");
  NormSweep s;
  s.base = base;
  s.ns = grid;
  for (double n : grid) {
    try {
      auto prm = base.with_n(n);
      s.norms.emplace_back(norm_report(make_kernels(pot, prm)));
      s.failures.emplace_back();
    } catch (const Error &e) {
      s.norms.emplace_back(std::nullopt);
      s.failures.emplace_back(e.what());
    }
  }
  return s;
}


/// Slope checks on the norm sweep: a band around the predicted exponent for
/// the sums, an upper limit eps + slack for the sup norms.
struct NormFit {
  std::string name;
  double target = 0, tolerance = 0;
  bool upper_only = false;
  std::optional<ExponentFit> fit;
  std::size_t used = 0;
  std::string error;
  bool pass() const {
    if (!fit)
      return false;
    return upper_only ? fit->slope <= target + tolerance : std::abs(fit->slope - target) <= tolerance;
  }
};

inline std::vector<NormFit> norm_fits(const NormSweep &sw, double band = 0.15, double sup_slack = 0.05) {
  const double k = sw.base.kappa, e = sw.base.eps;
  struct Spec {
    std::string name;
    double target;
    bool upper;
    bool needs_s;
    std::function<double(const NormReport &)> get;
  };
  const std::vector<Spec> specs{
      {"eta_H_l2", 3 * k - 1, false, false, [](const NormReport &n) { return n.eta_h_l2.value; }},
      {"eta_H_h1", 1 + k, false, false, [](const NormReport &n) { return n.eta_h_h1.value; }},
      {"sigma_S_l2", 1.5 * k, false, true, [](const NormReport &n) { return n.sigma_s_l2.value; }},
      {"sigma_S_h1", 2.5 * k, false, true, [](const NormReport &n) { return n.sigma_s_h1.value; }},
      {"gamma_sigma_S_l1", 1.5 * k, false, true, [](const NormReport &n) { return n.gs_s_l1.value; }},
      {"sigma_S_inf2", e, true, true, [](const NormReport &n) { return n.sigma_s_inf2; }},
      {"gamma_S_inf2", e, true, true, [](const NormReport &n) { return n.gamma_s_inf2; }},
  };
  std::vector<NormFit> out;
  for (const auto &s : specs) {
    NormFit f;
    f.name = s.name;
    f.target = s.target;
    f.upper_only = s.upper;
    f.tolerance = s.upper ? sup_slack : band;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < sw.ns.size(); ++i) {
      if (!sw.norms[i] || (s.needs_s && sw.norms[i]->s_empty))
        continue;
      double v = s.get(*sw.norms[i]);
      if (v > 0.0 && std::isfinite(v)) {
        xs.push_back(sw.ns[i]);
        ys.push_back(v);
      }
    }
    f.used = xs.size();
    if (xs.size() < 3)
      f.error = "only " + std::to_string(xs.size()) + " usable grid points (need 3)";
    else
      f.fit = fit(xs, ys);
    out.push_back(std::move(f));
  }
  return out;
}

struct TermFit {
  ErrorTermId id;
  std::optional<ExponentFit> fit;
  std::vector<double> ns, values, normalized; ///< all grid points (nan where excluded)
  std::vector<std::string> excluded;          ///< reason per point, empty if used
  double target = 0, tolerance = 0.1;
  double growth = 0;       ///< max normalized / normalized at first used point
  double max_over_min = 0; ///< literal diagnostic
  bool pass() const { return fit && fit->slope <= target + tolerance; }
  bool bounded() const { return fit && growth < 1e2; }
  std::string error;
};

/// Slope of each composite bound against the 5k/2 - eps target.
inline std::vector<TermFit> sweep_fit(const std::vector<ErrorTermId> &ids, const NormSweep &sw,
                                      double tolerance = 0.1) {
  std::vector<TermFit> out;
  const double target = 2.5 * sw.base.kappa - sw.base.eps;
  for (auto id : ids) {
    TermFit tf;
    tf.id = id;
    tf.target = target;
    tf.tolerance = tolerance;
    std::vector<double> xs, ys, zs;
    for (std::size_t i = 0; i < sw.ns.size(); ++i) {
      double n = sw.ns[i];
      tf.ns.push_back(n);
      std::string why;
      double v = std::nan(""), z = std::nan("");
      if (!sw.norms[i]) {
        why = "upstream: " + sw.failures[i];
      } else if (sw.norms[i]->s_empty) {
        why = "empty region: no lattice shells in P_S";
      } else {
        auto prm = sw.base.with_n(n);
        v = composite_bound(id, *sw.norms[i], prm);
        z = v / std::pow(n, target);
        if (!(v > 0.0) || !std::isfinite(v))
          why = "non-positive value";
      }
      tf.values.push_back(v);
      tf.normalized.push_back(z);
      tf.excluded.push_back(why);
      if (why.empty()) {
        xs.push_back(n);
        ys.push_back(v);
        zs.push_back(z);
      }
    }
    if (xs.size() < 4) {
      tf.error = "only " + std::to_string(xs.size()) + " usable grid points (need 4)";
    } else {
      tf.fit = fit(xs, ys);
      tf.growth = *std::max_element(zs.begin(), zs.end()) / zs.front();
      tf.max_over_min = *std::max_element(zs.begin(), zs.end()) / *std::min_element(zs.begin(), zs.end());
    }
    out.push_back(std::move(tf));
  }
  return out;
}

} // namespace blab
