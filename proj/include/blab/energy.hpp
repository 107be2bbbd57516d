#pragma once

#include "blab/autocorr.hpp"
#include "blab/kernels.hpp"

#include <json.hpp>

namespace blab {

inline constexpr double lhy_constant() { return 128.0 / (15.0 * 1.7724538509055160273); }

/// e(rho) = 4 pi a rho^2 [1 + 128/(15 sqrt(pi)) (rho a^3)^{1/2}].
inline double lhy_density(double rho, double a) {
  if (rho < 0.0 || a < 0.0)
    throw ConfigError("lhy_density: density and scattering length must be >= 0");
  return 4.0 * pi * a * rho * rho * (1.0 + lhy_constant() * std::sqrt(rho * a * a * a));
}

inline bool lhy_dilute(double rho, double a) { return rho * a * a * a < 1e-2; }

struct MainTerm {
  double leading = 0.0;    ///< 4 pi a N^{1+k}
  double correction = 0.0; ///< leading * 128/(15 sqrt pi) (a^3 N^{3k-2})^{1/2}
  double total() const { return leading + correction; }
};

inline MainTerm main_term(const ScalingParams &p, double a) {
  MainTerm m;
  m.leading = 4.0 * pi * a * std::pow(p.n, 1.0 + p.kappa);
  m.correction = m.leading * lhy_constant() * std::sqrt(a * a * a * std::pow(p.n, 3.0 * p.kappa - 2.0));
  return m;
}

struct TermValue {
  double value = 0.0;
  double tail = 0.0;
  bool estimated_tail = false; ///< tail from a cutoff comparison, not a bound
};

struct EnergyReport {
  MainTerm main;
  std::array<TermValue, 6> terms;
  int term5_cutoff = 0;
  double n0 = 0.0;

  double c_gn() const {
    double s = 0.0;
    for (const auto &t : terms)
      s += t.value;
    return s;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["main_leading"] = main.leading;
    j["main_correction"] = main.correction;
    j["main_total"] = main.total();
    for (std::size_t i = 0; i < terms.size(); ++i)
      j["term" + std::to_string(i + 1)] = {{"value", terms[i].value},
                                           {"tail", terms[i].tail},
                                           {"tail_kind", terms[i].estimated_tail ? "estimate" : "bound"}};
    j["term5_cutoff"] = term5_cutoff;
    j["C_GN"] = c_gn();
    j["N0"] = n0;
    return j;
  }
};

/// g_m = sigma gamma and F_m = N^k Vhat(2 pi sqrt(m) / N^{1-k}) tables for term 5.
struct Term5Tables {
  std::vector<double> g, f;
};

inline Term5Tables term5_tables(const KernelTable &t, const FourierHat &vh, int K) {
  const std::int64_t K2 = std::int64_t(K) * K;
  if (K2 > t.shells->max_norm2())
    throw ConfigError("term 5: cutoff " + std::to_string(K) + " exceeds the kernel table");
  Term5Tables tb;
  tb.g.assign(std::size_t(K2) + 1, 0.0);
  for (std::size_t i = 0; i < t.size() && t.rows[i].m <= K2; ++i)
    tb.g[std::size_t(t.rows[i].m)] = t.rows[i].sigma * t.rows[i].gamma;
  tb.f.resize(std::size_t(4 * K2) + 1);
  const double S = t.params.scale(), nk = t.params.n_kappa();
  for (std::size_t m = 0; m < tb.f.size(); ++m)
    tb.f[m] = nk * vh(ShellTable::momentum(std::int64_t(m)) / S);
  return tb;
}

/// Integer radius beyond which |sigma gamma| < 1e-8 max.
inline int term5_support(const KernelTable &t) {
  double mx = 0.0;
  for (const auto &r : t.rows)
    mx = std::max(mx, std::abs(r.sigma * r.gamma));
  std::int64_t last = 1;
  for (const auto &r : t.rows)
    if (std::abs(r.sigma * r.gamma) >= 1e-8 * mx)
      last = r.m;
  return int(std::ceil(std::sqrt(double(last))));
}

/// Largest cutoff whose padded grid fits the memory budget.
inline int term5_affordable() {
  int K = 1;
  while (autocorr_bytes(K + 1) <= memory_budget())
    ++K;
  return K;
}

/// The six terms of C_{G_N}. term5_cutoff <= 0 picks the support radius of
/// sigma gamma, capped by the memory budget (then the tail is an estimate from
/// a second, smaller cutoff). An explicit cutoff over budget is an error.
inline EnergyReport c_gn_breakdown(const KernelTable &t, const Potential &pot,
                                   int term5_cutoff = 0, bool term5 = true) {
  const auto &prm = t.params;
  const auto &sh = *t.shells;
  const double S = prm.scale(), nk = prm.n_kappa();
  EnergyReport e;
  e.main = main_term(prm, t.a);
  e.n0 = n_zero(t);
  FourierHat vh(pot, 16.0 * sh.max_momentum() / S);
  auto V = [&](double p) { return nk * vh(p / S); };
  auto row = [&](std::size_t i) -> const KernelRow & { return t.rows[i]; };
  auto all = [](std::size_t) { return true; };
  auto eta = [&](double p) { return t.eta_at ? t.eta_at(p) : 0.0; };
  auto with_tail = [&](auto &&f, auto &&keep, auto &&g) {
    SumResult r = t.eta_at ? radial_sum(sh, f, keep, g) : radial_sum(sh, f, keep, true);
    return TermValue{r.value, r.tail, false};
  };

  e.terms[0] = {0.5 * std::pow(prm.n, 1.0 + prm.kappa) * vh(0.0), 0.0, false};
  e.terms[1] = with_tail([&](std::size_t i) { return row(i).p * row(i).p * row(i).sigma * row(i).sigma; }, all,
                         [&](double p) {
                           double s = std::sinh(eta(p));
                           return p * p * s * s;
                         });
  e.terms[2] = with_tail([&](std::size_t i) { return V(row(i).p) * row(i).sigma * row(i).gamma; }, all,
                         [&](double p) {
                           double x = eta(p);
                           return V(p) * std::sinh(x) * std::cosh(x);
                         });
  {
    auto r = radial_sum(
        sh, [&](std::size_t i) { return V(row(i).p) * row(i).sigma * row(i).sigma; },
        [&](std::size_t i) { return t.in_low_set(i); }, false);
    e.terms[3] = {r.value, 0.0, false};
  }
  if (term5 && !pot.is_zero()) {
    int K = term5_cutoff;
    bool capped = false;
    if (K <= 0) {
      int need = term5_support(t);
      int kmax = int(std::floor(std::sqrt(double(sh.max_norm2()))));
      K = std::min({need, term5_affordable(), kmax});
      capped = K < need;
    }
    auto tb = term5_tables(t, vh, K);
    auto cs = autocorr_conv_sum(tb.g, tb.f, K);
    e.term5_cutoff = K;
    e.terms[4] = {cs.value() / (2.0 * prm.n), 0.0, false};
    if (capped) {
      int K2 = std::max(1, int(0.75 * K));
      auto tb2 = term5_tables(t, vh, K2);
      auto cs2 = autocorr_conv_sum(tb2.g, tb2.f, K2);
      e.terms[4].tail = std::abs(cs.value() - cs2.value()) / (2.0 * prm.n);
      e.terms[4].estimated_tail = true;
    }
  }
  {
    auto sl = radial_sum(
        sh, [&](std::size_t i) { return row(i).sigma * row(i).sigma; },
        [&](std::size_t i) { return t.in_low_set(i); }, false);
    auto inner = with_tail([&](std::size_t i) { return V(row(i).p) * row(i).eta; },
                           [&](std::size_t i) { return !t.in_low_set(i); },
                           [&](double p) { return V(p) * eta(p); });
    e.terms[5] = {-sl.value / prm.n * inner.value, sl.value / prm.n * inner.tail, false};
  }
  return e;
}

//==============================================================================
// Exponent calculus, exact in kappa and eps.

struct ExponentEntry {
  std::string name;
  Rational value;         ///< exponent at the given (kappa, eps)
  Rational slope_kappa;   ///< coefficient of kappa
  Rational offset;        ///< constant term (eps -> 0)
  std::optional<Rational> threshold; ///< kappa where the eps -> 0 exponent vanishes
};

struct ExponentBudget {
  Rational kappa, eps;
  std::vector<ExponentEntry> entries;
  bool old_admissible = false; ///< 9k-5+6e, 21k/4-3+3e all < 0
  bool new_admissible = false; ///< 12k-7+5e < 0
  bool on_boundary = false;    ///< some exponent exactly 0

  const ExponentEntry &at(const std::string &n) const {
    for (const auto &e : entries)
      if (e.name == n)
        return e;
    throw ConfigError("no exponent entry '" + n + "'");
  }
};

inline ExponentBudget exponent_budget(Rational kappa, Rational eps) {
  if (!(kappa > Rational(0)) || !(kappa < Rational(2, 3)))
    throw ConfigError("exponent_budget: kappa must lie in (0, 2/3)");
  if (eps < Rational(0))
    throw ConfigError("exponent_budget: eps must be >= 0");
  ExponentBudget b;
  b.kappa = kappa;
  b.eps = eps;
  auto add = [&](std::string name, Rational a, Rational c, Rational e_coef) {
    ExponentEntry x{std::move(name), a * kappa + c + e_coef * eps, a, c, std::nullopt};
    if (a.num() != 0)
      x.threshold = -c / a;
    b.entries.push_back(x);
  };
  add("-eps", 0, 0, -1);
  add("9k-5+6e", 9, -5, 6);
  add("21k/4-3+3e", Rational(21, 4), -3, 3);
  add("12k-7+5e", 12, -7, 5);
  const Rational z(0);
  b.old_admissible = b.at("9k-5+6e").value < z && b.at("21k/4-3+3e").value < z;
  b.new_admissible = b.at("12k-7+5e").value < z;
  for (const auto &e : b.entries)
    if (e.value == z)
      b.on_boundary = true;
  return b;
}

} // namespace blab
