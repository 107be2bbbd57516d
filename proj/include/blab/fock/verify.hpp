#pragma once

#include "blab/fock/series.hpp"
#include "blab/kernels.hpp"

namespace blab::fock {

/// Coefficients from a kernel table (tags stay as assigned). Every |k|^2
/// must be an occupied shell of the table.
inline void assign_from_kernels(ModeSet &ms, const KernelTable &t, const Potential &pot) {
  for (auto &m : ms.modes) {
    const KernelRow *row = t.find(norm2(m.k));
    if (!row)
      throw ConfigError("mode set: |k|^2 = " + std::to_string(norm2(m.k)) + " is beyond the kernel table");
    m.eta = row->nu;
    m.sigma = row->sigma;
    m.gamma = row->gamma;
  }
  ms.n = t.params.n;
  ms.n0 = n_zero(t);
  auto nk = t.params.n_kappa(), sc = t.params.scale();
  auto vh = std::make_shared<FourierHat>(pot, 2.0 * pi * std::sqrt(double(t.shells->max_norm2())) * 4.0 / sc);
  ms.coupling.fn = [vh, nk, sc](Mom r) { return nk * (*vh)(2.0 * pi * std::sqrt(double(norm2(r))) / sc); };
  ms.coupling.desc = {{"kind", "kernel_table"}, {"potential", t.potential_id}, {"kappa", t.params.kappa}};
  ms.toy = false;
  ms.finalize();
}

struct ThetaCheck {
  ThetaConvention convention;
  std::size_t tuples = 0, agree = 0;
};

/// Compare both theta readings with the Theta-operator product over every
/// ordered tuple up to m_max. The selected convention is the one that
/// agrees everywhere (the literal all_i reading on ties).
struct ThetaReport {
  std::vector<ThetaCheck> checks;
  ThetaConvention selected = ThetaConvention::all_i;
};

inline ThetaReport check_theta(const ModeSet &ms, int m_max) {
  ThetaReport r;
  for (auto c : {ThetaConvention::all_i, ThetaConvention::i_ne_j}) {
    ThetaCheck ch{c};
    for (int m = 1; m <= m_max; ++m)
      detail::for_each_tuple(ms, m, [&](std::span<const Pair> t) {
        ++ch.tuples;
        ch.agree += theta(ms, t, c) == theta_by_operator(ms, t);
      });
    r.checks.push_back(ch);
  }
  r.selected = r.checks[0].agree == r.checks[0].tuples || r.checks[1].agree != r.checks[1].tuples
                   ? ThetaConvention::all_i
                   : ThetaConvention::i_ne_j;
  return r;
}

struct Identity {
  double lhs = 0, rhs = 0;
  double abs_gap() const { return std::abs(lhs - rhs); }
  double rel_gap() const { return abs_gap() / std::max(std::abs(lhs), 1e-300); }
  bool holds(double tol) const { return abs_gap() <= tol * std::max(1.0, std::abs(lhs)); }
};

struct FamilyCheck {
  Family family;
  std::vector<Identity> orders; ///< matrix vs series, per order
  std::vector<PieceValues> pieces;
  std::vector<Identity> doubling; ///< cubic: creation half vs h.c. half
  std::string note;
  bool holds(double tol) const {
    for (const auto &o : orders)
      if (!o.holds(tol))
        return false;
    for (const auto &d : doubling)
      if (!d.holds(tol))
        return false;
    return true;
  }
};

struct Verification {
  int m_max = 0;
  bool generic = false;
  ThetaReport theta;
  std::vector<Identity> norm_orders; ///< ||xi_m||^2 matrix vs series
  Identity norm_total;
  double norm_theta_off = 0.0; ///< series with theta forced to 1
  std::vector<FamilyCheck> families;
  double norm_tol = 1e-10, family_tol = 1e-9;

  bool passed() const {
    if (!norm_total.holds(norm_tol))
      return false;
    for (const auto &o : norm_orders)
      if (!o.holds(norm_tol))
        return false;
    for (const auto &f : families)
      if (!f.holds(family_tol))
        return false;
    return true;
  }

  nlohmann::ordered_json to_json() const {
    auto id = [](const Identity &i) {
      return nlohmann::ordered_json{{"matrix", i.lhs}, {"series", i.rhs}, {"abs_gap", i.abs_gap()},
                                    {"rel_gap", i.rel_gap()}};
    };
    nlohmann::ordered_json j;
    j["m_max"] = m_max;
    j["generic"] = generic;
    auto &th = j["theta"];
    th["selected"] = convention_name(theta.selected);
    for (const auto &c : theta.checks)
      th[convention_name(c.convention)] = {{"tuples", c.tuples}, {"agree_with_operator", c.agree}};
    j["norm"]["total"] = id(norm_total);
    for (const auto &o : norm_orders)
      j["norm"]["orders"].push_back(id(o));
    j["norm"]["series_theta_off"] = norm_theta_off;
    for (const auto &f : families) {
      nlohmann::ordered_json fj;
      fj["family"] = family_name(f.family);
      for (std::size_t m = 0; m < f.orders.size(); ++m) {
        auto o = id(f.orders[m]);
        o["order"] = m;
        for (std::size_t k = 0; k < f.pieces[m].names.size(); ++k)
          o["pieces"][f.pieces[m].names[k]] = f.pieces[m].value[k];
        o["residual"] = f.pieces[m].residual;
        o["residual_count"] = f.pieces[m].residual_count;
        if (!f.doubling.empty())
          o["hc_pair"] = {{"creation", f.doubling[m].lhs}, {"adjoint", f.doubling[m].rhs}};
        fj["orders"].push_back(o);
      }
      fj["holds"] = f.holds(family_tol);
      if (!f.note.empty())
        fj["note"] = f.note;
      j["families"].push_back(fj);
    }
    j["passed"] = passed();
    return j;
  }
};

inline Verification verify(const ModeSet &ms, int m_max, const std::vector<Family> &fams = all_families()) {
  if (m_max < 0 || m_max > 6)
    throw ConfigError("fock verify: m_max must lie in 0..6");
  Verification v;
  v.m_max = m_max;
  v.generic = ms.generic();
  v.theta = check_theta(ms, m_max);
  const auto conv = v.theta.selected;
  auto x = xi(ms, m_max);
  auto ns = norm_series(ms, m_max, conv);
  for (int m = 0; m <= m_max; ++m)
    v.norm_orders.push_back({x.comp[std::size_t(m)].norm2(), ns.orders[std::size_t(m)]});
  v.norm_total = {x.norm2(), ns.total()};
  v.norm_theta_off = norm_series(ms, m_max, conv, false).total();
  for (auto f : fams) {
    FamilyCheck fc{f, {}, {}, {}, {}};
    auto mo = matrix_orders(ms, f, x);
    fc.pieces = contraction_series(ms, f, m_max, conv);
    for (int m = 0; m <= m_max; ++m) {
      fc.orders.push_back({mo.value[std::size_t(m)], fc.pieces[std::size_t(m)].total()});
      if (is_cubic(f))
        fc.doubling.push_back({mo.creation_half[std::size_t(m)], mo.adjoint_half[std::size_t(m)]});
    }
    fc.note = make_operator(ms, f).note;
    v.families.push_back(std::move(fc));
  }
  return v;
}

} // namespace blab::fock
