#pragma once

#include "blab/kernels.hpp"

namespace blab {

/// The named lattice norms. "h1" means sum p^2 (.)^2. Sup norms carry no tail.
struct NormReport {
  SumResult eta_h_l2;     ///< ||eta_H||^2
  SumResult eta_h_h1;     ///< ||eta_H||_{H1}^2
  double eta_h_inf = 0;   ///< ||eta_H||_inf
  SumResult sigma_s_l2;   ///< ||sigma_S||^2
  SumResult sigma_s_h1;   ///< ||sigma_S||_{H1}^2
  SumResult gs_s_l1;      ///< ||gamma_S sigma_S||_1
  double gamma_s_inf2 = 1; ///< ||gamma_S||_inf^2 (1 when S is empty: gamma >= 1)
  double sigma_s_inf2 = 0; ///< ||sigma_S||_inf^2
  SumResult sigma_l_l2;   ///< ||sigma_L||^2
  bool s_empty = true;
  std::size_t s_shells = 0, h_shells = 0;

  static std::vector<std::string> names() {
    return {"eta_H_l2",  "eta_H_h1",  "eta_H_inf",  "sigma_S_l2", "sigma_S_h1",
            "gamma_sigma_S_l1", "gamma_S_inf2", "sigma_S_inf2", "sigma_L_l2"};
  }
  std::vector<double> values() const {
    return {eta_h_l2.value,   eta_h_h1.value, eta_h_inf,    sigma_s_l2.value, sigma_s_h1.value,
            gs_s_l1.value,    gamma_s_inf2,   sigma_s_inf2, sigma_l_l2.value};
  }
  std::vector<double> tails() const {
    return {eta_h_l2.tail, eta_h_h1.tail, 0.0, sigma_s_l2.tail, sigma_s_h1.tail,
            gs_s_l1.tail,  0.0,           0.0, sigma_l_l2.tail};
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    auto v = values();
    auto t = tails();
    auto n = names();
    for (std::size_t i = 0; i < n.size(); ++i)
      j[n[i]] = {{"value", v[i]}, {"tail", t[i]}};
    j["S_empty"] = s_empty;
    j["S_shells"] = s_shells;
    j["H_shells"] = h_shells;
    return j;
  }
};

inline NormReport norm_report(const KernelTable &t) {
  const auto &sh = *t.shells;
  auto is = [&](Region r) { return [&t, r](std::size_t i) { return t.rows[i].tag == r; }; };
  auto in_l = [&](std::size_t i) { return t.in_low_set(i); };
  auto row = [&](std::size_t i) -> const KernelRow & { return t.rows[i]; };
  NormReport n;
  auto l2 = [&](std::size_t i) { return row(i).eta * row(i).eta; };
  auto h1 = [&](std::size_t i) { return row(i).p * row(i).p * row(i).eta * row(i).eta; };
  if (t.eta_at) {
    n.eta_h_l2 = radial_sum(sh, l2, is(Region::high), [&](double p) {
      double e = t.eta_at(p);
      return e * e;
    });
    n.eta_h_h1 = radial_sum(sh, h1, is(Region::high), [&](double p) {
      double e = t.eta_at(p);
      return p * p * e * e;
    });
  } else {
    n.eta_h_l2 = radial_sum(sh, l2, is(Region::high), true);
    n.eta_h_h1 = radial_sum(sh, h1, is(Region::high), true);
  }
  n.sigma_s_l2 = radial_sum(sh, [&](std::size_t i) { return row(i).sigma * row(i).sigma; },
                            is(Region::S), false);
  n.sigma_s_h1 = radial_sum(
      sh, [&](std::size_t i) { return row(i).p * row(i).p * row(i).sigma * row(i).sigma; },
      is(Region::S), false);
  n.gs_s_l1 = radial_sum(sh, [&](std::size_t i) { return std::abs(row(i).gamma * row(i).sigma); },
                         is(Region::S), false);
  n.sigma_l_l2 = radial_sum(sh, [&](std::size_t i) { return row(i).sigma * row(i).sigma; },
                            in_l, false);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto &r = t.rows[i];
    if (r.tag == Region::high) {
      n.eta_h_inf = std::max(n.eta_h_inf, std::abs(r.eta));
      ++n.h_shells;
    } else if (r.tag == Region::S) {
      if (n.s_empty)
        n.gamma_s_inf2 = 0.0;
      n.s_empty = false;
      ++n.s_shells;
      n.gamma_s_inf2 = std::max(n.gamma_s_inf2, r.gamma * r.gamma);
      n.sigma_s_inf2 = std::max(n.sigma_s_inf2, r.sigma * r.sigma);
    }
  }
  return n;
}

} // namespace blab
