#pragma once

#include "blab/lattice.hpp"
#include "blab/params.hpp"
#include "blab/potential.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <ostream>

namespace blab {

/// |p| cutoff of the shell table: max(4 N^{1-k}, 8 t_H).
inline double kernel_cutoff(const ScalingParams &p) {
  return std::max(4.0 * p.scale(), 8.0 * MomentumRegions(p).t_h);
}

inline std::int64_t cutoff_norm2(double pmax) {
  double n = pmax / (2.0 * pi);
  return static_cast<std::int64_t>(std::ceil(n * n));
}

/// eta_p = -N^{3k-2} what_l(|p| / N^{1-k}) per shell.
struct EtaFragment {
  std::vector<double> eta;
  double sup_p2eta = 0.0; ///< sup_p p^2 |eta_p| / N^k
};

inline EtaFragment eta_table(const ScatteringSolution &sol, const ScalingParams &prm,
                             const ShellTable &shells) {
  MomentumRegions reg(prm);
  if (shells.max_momentum() <= reg.t_h)
    throw ConfigError("eta_table: shell cutoff |p|=" + fmt_double(shells.max_momentum()) +
                      " does not reach the high-momentum edge " + fmt_double(reg.t_h));
  EtaFragment out;
  out.eta.assign(shells.size(), 0.0);
  if (sol.trivial())
    return out;
  const double sc = prm.scale(), pref = -std::pow(prm.n, 3 * prm.kappa - 2);
  auto wh = sol.w_hat(shells.max_momentum() / sc);
  parallel_for(shells.size(), [&](std::size_t i) {
    out.eta[i] = pref * wh(shells.radius(i) / sc);
  });
  const double nk = prm.n_kappa();
  for (std::size_t i = 0; i < shells.size(); ++i) {
    double p = shells.radius(i);
    out.sup_p2eta = std::max(out.sup_p2eta, p * p * std::abs(out.eta[i]) / nk);
  }
  return out;
}

/// eta as a function of continuous |p| <= pmax; owns the solution.
inline std::function<double(double)>
eta_function(std::shared_ptr<const ScatteringSolution> sol, const ScalingParams &prm,
             double pmax) {
  if (sol->trivial())
    return [](double) { return 0.0; };
  const double sc = prm.scale(), pref = -std::pow(prm.n, 3 * prm.kappa - 2);
  auto wh = std::make_shared<const ScatteringSolution::WHat>(sol->w_hat(pmax / sc));
  return [sol, wh, sc, pref](double p) { return pref * (*wh)(p / sc); };
}

struct KernelRow {
  std::int64_t m = 0;
  double p = 0;
  Region tag = Region::low;
  double eta = 0, nu = 0, sigma = 0, gamma = 1;
};

/// Per-shell eta, nu, sigma, gamma with region tags. Immutable once built.
class KernelTable {
public:
  ScalingParams params;
  MomentumRegions regions{ScalingParams{}};
  std::string potential_id;
  double a = 0.0;                ///< scattering length
  double sup_p2eta = 0.0;
  double boundary_jump = 0.0;    ///< |eta - tau| at the outermost L shell
  std::shared_ptr<const ShellTable> shells;
  std::vector<KernelRow> rows;
  /// eta at continuous |p| (for tail bounds); empty when not available.
  std::function<double(double)> eta_at;

  std::size_t size() const { return rows.size(); }
  std::uint32_t mult(std::size_t i) const { return shells->multiplicity(i); }
  bool in_low_set(std::size_t i) const { return rows[i].tag == Region::low || rows[i].tag == Region::S; }
  bool region_empty(Region r) const {
    return std::none_of(rows.begin(), rows.end(), [r](const KernelRow &k) { return k.tag == r; });
  }

  /// Row for |n|^2 = m, or nullptr if m is not an occupied shell in the table.
  const KernelRow *find(std::int64_t m) const {
    const auto &ns = shells->norms();
    auto it = std::lower_bound(ns.begin(), ns.end(), m);
    if (it == ns.end() || *it != m)
      return nullptr;
    return &rows[static_cast<std::size_t>(it - ns.begin())];
  }

  void write_csv(std::ostream &os) const {
    os << "norm2,p,multiplicity,region,eta,nu,sigma,gamma\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto &r = rows[i];
      os << r.m << ',' << fmt_double(r.p) << ',' << mult(i) << ',' << region_name(r.tag)
         << ',' << fmt_double(r.eta) << ',' << fmt_double(r.nu) << ','
         << fmt_double(r.sigma) << ',' << fmt_double(r.gamma) << '\n';
    }
  }

  nlohmann::ordered_json metadata() const {
    nlohmann::ordered_json j;
    j["N"] = params.n;
    j["kappa"] = params.kappa;
    j["eps"] = params.eps;
    j["ell"] = params.ell;
    j["potential"] = potential_id;
    j["scattering_length"] = a;
    j["t_S"] = regions.t_s;
    j["t_L"] = regions.t_l;
    j["t_H"] = regions.t_h;
    j["max_norm2"] = shells->max_norm2();
    j["shells"] = rows.size();
    j["sup_p2_eta_over_Nk"] = sup_p2eta;
    j["boundary_jump"] = boundary_jump;
    return j;
  }
};

inline KernelTable build_kernels(const ScalingParams &prm, const EtaFragment &eta, double a,
                                 std::shared_ptr<const ShellTable> shells,
                                 std::string potential_id = {}) {
  if (eta.eta.size() != shells->size())
    throw ConfigError("build_kernels: eta covers " + std::to_string(eta.eta.size()) +
                      " shells, table has " + std::to_string(shells->size()));
  KernelTable t;
  t.params = prm;
  t.regions = MomentumRegions(prm);
  t.potential_id = std::move(potential_id);
  t.a = a;
  t.sup_p2eta = eta.sup_p2eta;
  t.shells = shells;
  t.rows.resize(shells->size());
  parallel_for(shells->size(), [&](std::size_t i) {
    KernelRow &r = t.rows[i];
    r.m = shells->norm2(i);
    r.p = shells->radius(i);
    r.tag = t.regions.classify(r.p);
    r.eta = eta.eta[i];
    if (t.regions.in_low_set(r.p))
      r.nu = a > 0.0 ? tau(r.p * r.p, prm, a) : 0.0;
    else
      r.nu = r.eta;
    r.sigma = std::sinh(r.nu);
    r.gamma = std::cosh(r.nu);
  });
  for (std::size_t i = shells->size(); i-- > 0;)
    if (t.regions.in_low_set(t.rows[i].p)) {
      t.boundary_jump = std::abs(t.rows[i].eta - t.rows[i].nu);
      break;
    }
  return t;
}

/// Convenience: solve, tabulate, and build in one go.
inline KernelTable make_kernels(const Potential &pot, const ScalingParams &prm,
                                double cutoff_scale = 1.0) {
  NeumannGeometry geo{prm.n, prm.kappa, prm.ell};
  auto sol = solve_neumann(pot, geo);
  auto shells = std::make_shared<const ShellTable>(
      build_shells(cutoff_norm2(cutoff_scale * kernel_cutoff(prm))));
  auto eta = eta_table(sol, prm, *shells);
  auto t = build_kernels(prm, eta, sol.scattering_length(), shells, pot.id());
  t.eta_at = eta_function(std::make_shared<const ScatteringSolution>(std::move(sol)), prm,
                          16.0 * shells->max_momentum());
  return t;
}

/// N0 = N - sum_{P_L} sigma^2.
inline double n_zero(const KernelTable &t) {
  std::vector<double> terms;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t.in_low_set(i))
      terms.push_back(t.rows[i].sigma * t.rows[i].sigma * t.mult(i));
  double n0 = t.params.n - pairwise_sum(terms);
  if (!(n0 > 0.0))
    throw SolverError("regime violation: N0 = " + fmt_double(n0) +
                      " <= 0; parameters too extreme for the trial state");
  return n0;
}

} // namespace blab

namespace blab {

/// sum_{p in Lambda*} what_l(|p|/S)^2 against S^3 ||w_l||^2 (Parseval on the
/// unit torus, w supported inside it). The lattice runs to |p| <= factor*S.
struct ParsevalCheck {
  double lattice = 0.0, tail = 0.0, integral = 0.0;
  double rel_gap() const { return std::abs(lattice - integral) / integral; }
};

inline ParsevalCheck parseval_check(const ScatteringSolution &sol, const ScalingParams &prm,
                                    double factor = 40.0) {
  if (sol.trivial())
    return {};
  const double S = prm.scale();
  auto shells = build_shells(cutoff_norm2(factor * S));
  auto wh = sol.w_hat(16.0 * shells.max_momentum() / S);
  std::vector<double> v(shells.size());
  parallel_for(shells.size(), [&](std::size_t i) {
    double x = wh(shells.radius(i) / S);
    v[i] = x * x;
  });
  ParsevalCheck c;
  auto r = radial_sum(
      shells, [&](std::size_t i) { return v[i]; }, [](std::size_t) { return true; },
      [&](double p) {
        double x = wh(p / S);
        return x * x;
      });
  c.lattice = r.value + wh(0.0) * wh(0.0);
  c.tail = r.tail;
  c.integral = S * S * S * sol.w_l2_squared();
  return c;
}

} // namespace blab
