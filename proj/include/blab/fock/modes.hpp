#pragma once

#include "blab/core.hpp"
#include "blab/potential.hpp"

#include <json.hpp>

#include <array>
#include <functional>
#include <map>
#include <random>
#include <set>

namespace blab::fock {

using Mom = std::array<int, 3>;

inline Mom operator+(Mom a, Mom b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Mom operator-(Mom a, Mom b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Mom operator-(Mom a) { return {-a[0], -a[1], -a[2]}; }
inline bool is_zero(Mom a) { return a[0] == 0 && a[1] == 0 && a[2] == 0; }
inline std::int64_t norm2(Mom a) {
  return std::int64_t(a[0]) * a[0] + std::int64_t(a[1]) * a[1] + std::int64_t(a[2]) * a[2];
}

enum class Tag { H, S };

inline const char *tag_name(Tag t) { return t == Tag::H ? "H" : "S"; }

struct Mode {
  Mom k{};
  Tag tag = Tag::H;
  double eta = 0.0;   ///< nu on the mode; eta_r on H tags
  double sigma = 0.0;
  double gamma = 1.0;
};

/// Interaction weight N^k Vhat(r / N^{1-k}) on a lattice vector r, plus a
/// JSON description so that mode-set files round-trip.
struct Coupling {
  std::function<double(Mom)> fn;
  nlohmann::ordered_json desc;
  double operator()(Mom r) const { return fn(r); }

  static Coupling gaussian(double strength, double width) {
    Coupling c;
    c.fn = [strength, width](Mom r) { return strength * std::exp(-double(norm2(r)) / (width * width)); };
    c.desc = {{"kind", "gaussian"}, {"strength", strength}, {"width", width}};
    return c;
  }

  /// N^k Vhat(2 pi |r| / N^{1-k}) for a soft sphere.
  static Coupling soft_sphere(double v0, double radius, double n, double kappa) {
    auto pot = std::make_shared<Potential>(Potential::soft_sphere(v0, radius));
    const double nk = std::pow(n, kappa), sc = std::pow(n, 1.0 - kappa);
    Coupling c;
    c.fn = [pot, nk, sc](Mom r) { return nk * fourier_hat(*pot, 2.0 * pi * std::sqrt(double(norm2(r))) / sc); };
    c.desc = {{"kind", "soft_sphere"}, {"v0", v0}, {"radius", radius}, {"kappa", kappa}};
    return c;
  }

  static Coupling zero() {
    Coupling c;
    c.fn = [](Mom) { return 0.0; };
    c.desc = {{"kind", "zero"}};
    return c;
  }

  static Coupling from_json(const nlohmann::json &j, double n) {
    std::string kind = j.value("kind", "");
    if (kind == "gaussian")
      return gaussian(j.at("strength").get<double>(), j.at("width").get<double>());
    if (kind == "soft_sphere")
      return soft_sphere(j.at("v0").get<double>(), j.at("radius").get<double>(), n,
                         j.at("kappa").get<double>());
    if (kind == "zero")
      return zero();
    throw ConfigError("mode set: unknown coupling kind '" + kind + "'");
  }
};

/// Admissible (r, v): r, r+v tagged H, v tagged S. Indices into ModeSet::modes.
struct Pair {
  int r, v, rv;
};

/// Unordered created triple {r+v, -r, -v}; (r, v) and (-r-v, v) give the same one.
struct Triple {
  std::array<int, 3> modes; ///< sorted mode indices
  int h1, h2, s;            ///< the two H modes and the S mode
  int v;                    ///< mode index of v
  double amplitude;         ///< (eta_r + eta_{r+v}) sigma_v
};

class ModeSet {
public:
  std::vector<Mode> modes;
  double n = 10.0;  ///< free N in the N^{-m/2} prefactors
  double n0 = 10.0; ///< N_0 in the cubic operator
  Coupling coupling = Coupling::gaussian(1.0, 25.0);
  bool toy = true; ///< coefficients not drawn from a kernel table

  std::size_t size() const { return modes.size(); }
  const Mode &operator[](int i) const { return modes[std::size_t(i)]; }

  int index(Mom k) const {
    auto it = lookup_.find(k);
    return it == lookup_.end() ? -1 : it->second;
  }

  int neg(int i) const { return index(-modes[std::size_t(i)].k); }

  const std::vector<Pair> &pairs() const { return pairs_; }
  const std::vector<Triple> &triples() const { return triples_; }

  /// Index into triples() for a pair.
  int triple_of(const Pair &p) const {
    std::array<int, 3> t{p.rv, neg(p.r), neg(p.v)};
    std::sort(t.begin(), t.end());
    for (std::size_t i = 0; i < triples_.size(); ++i)
      if (triples_[i].modes == t)
        return int(i);
    return -1;
  }

  /// gamma^2 - sigma^2 = 1 on every mode.
  bool hyperbolic() const {
    return std::all_of(modes.begin(), modes.end(), [](const Mode &m) {
      return std::abs(m.gamma * m.gamma - m.sigma * m.sigma - 1.0) < 1e-12;
    });
  }

  /// Pairwise distinct momenta in every pair of triples, and no relation
  /// a + b + c = 0 among modes other than the designed triples.
  bool generic() const {
    for (std::size_t i = 0; i < triples_.size(); ++i)
      for (std::size_t j = i + 1; j < triples_.size(); ++j)
        for (int a : triples_[i].modes)
          for (int b : triples_[j].modes)
            if (a == b)
              return false;
    std::set<std::array<int, 3>> designed;
    for (const auto &t : triples_)
      designed.insert(t.modes);
    const int M = int(modes.size());
    for (int a = 0; a < M; ++a)
      for (int b = a; b < M; ++b)
        for (int c = b; c < M; ++c)
          if (is_zero(modes[a].k + modes[b].k + modes[c].k) && !designed.count({a, b, c}))
            return false;
    return true;
  }

  /// Rebuild the lookup, pairs and triples; throws on broken invariants.
  void finalize() {
    lookup_.clear();
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const auto &m = modes[i];
      if (is_zero(m.k))
        throw ConfigError("mode set: zero momentum is not a mode");
      if (!lookup_.emplace(m.k, int(i)).second)
        throw ConfigError("mode set: duplicate momentum");
      if (!std::isfinite(m.eta) || !std::isfinite(m.sigma) || !std::isfinite(m.gamma))
        throw ConfigError("mode set: non-finite coefficient");
    }
    for (std::size_t i = 0; i < modes.size(); ++i) {
      int j = neg(int(i));
      if (j < 0)
        throw ConfigError("mode set: -k missing for a mode (closure under negation)");
      const auto &a = modes[i], &b = modes[std::size_t(j)];
      if (a.tag != b.tag)
        throw ConfigError("mode set: k and -k carry different tags");
      if (a.eta != b.eta || a.sigma != b.sigma || a.gamma != b.gamma)
        throw ConfigError("mode set: coefficients must be even under k -> -k");
    }
    if (!(n > 0.0) || !(n0 > 0.0))
      throw ConfigError("mode set: N and N0 must be positive");
    pairs_.clear();
    triples_.clear();
    const int M = int(modes.size());
    for (int r = 0; r < M; ++r)
      for (int v = 0; v < M; ++v) {
        if (modes[r].tag != Tag::H || modes[v].tag != Tag::S)
          continue;
        int rv = index(modes[r].k + modes[v].k);
        if (rv < 0 || modes[rv].tag != Tag::H)
          continue;
        pairs_.push_back({r, v, rv});
        std::array<int, 3> t{rv, neg(r), neg(v)};
        std::sort(t.begin(), t.end());
        bool seen = std::any_of(triples_.begin(), triples_.end(),
                                [&](const Triple &x) { return x.modes == t; });
        if (!seen)
          triples_.push_back({t, rv, neg(r), neg(v), v,
                              (modes[r].eta + modes[rv].eta) * modes[v].sigma});
      }
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["N"] = n;
    j["N0"] = n0;
    j["coupling"] = coupling.desc;
    j["toy"] = toy;
    auto &arr = j["modes"] = nlohmann::ordered_json::array();
    for (const auto &m : modes) {
      nlohmann::ordered_json e;
      e["k"] = m.k;
      e["tag"] = tag_name(m.tag);
      if (m.tag == Tag::H) {
        e["eta"] = m.eta;
      } else {
        e["sigma"] = m.sigma;
        e["gamma"] = m.gamma;
      }
      arr.push_back(e);
    }
    return j;
  }

  /// H modes: "eta" (sigma, gamma = sinh, cosh). S modes: "nu", or
  /// "sigma" and "gamma" given freely (toy).
  static ModeSet from_json(const nlohmann::json &j) {
    ModeSet s;
    try {
      s.n = j.value("N", 10.0);
      s.n0 = j.value("N0", s.n);
      s.coupling = j.contains("coupling") ? Coupling::from_json(j.at("coupling"), s.n)
                                          : Coupling::gaussian(1.0, 25.0);
      s.toy = j.value("toy", true);
      for (const auto &e : j.at("modes")) {
        Mode m;
        m.k = e.at("k").get<Mom>();
        std::string tag = e.at("tag").get<std::string>();
        if (tag != "H" && tag != "S")
          throw ConfigError("mode set: tag must be H or S, got '" + tag + "'");
        m.tag = tag == "H" ? Tag::H : Tag::S;
        if (e.contains("eta") || e.contains("nu")) {
          m.eta = e.contains("eta") ? e.at("eta").get<double>() : e.at("nu").get<double>();
          m.sigma = std::sinh(m.eta);
          m.gamma = std::cosh(m.eta);
        }
        if (e.contains("sigma"))
          m.sigma = e.at("sigma").get<double>();
        if (e.contains("gamma"))
          m.gamma = e.at("gamma").get<double>();
        s.modes.push_back(m);
      }
    } catch (const nlohmann::json::exception &ex) {
      throw ConfigError(std::string("mode set JSON: ") + ex.what());
    }
    s.finalize();
    return s;
  }

private:
  std::map<Mom, int> lookup_;
  std::vector<Pair> pairs_;
  std::vector<Triple> triples_;
};

/// Random mode set built from `groups` blocks (r0, -r0, r0+v, -r0-v, v, -v)
/// plus `spectator_pairs` pairs +-s that sit in no triple. Retries until the
/// set is generic.
inline ModeSet generic_mode_set(int groups, int spectator_pairs, std::uint64_t seed,
                                double n = 10.0) {
  if (groups < 0 || spectator_pairs < 0 || groups + spectator_pairs == 0)
    throw ConfigError("generic_mode_set: need at least one group or spectator");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> big(-30, 30), small(-6, 6);
  std::uniform_real_distribution<double> eta(0.15, 0.6), nu(0.2, 0.7);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    ModeSet s;
    s.n = s.n0 = n;
    auto add = [&](Mom k, Tag t, double e) {
      Mode m{k, t, 0.0, 0.0, 1.0};
      if (t == Tag::H) {
        m.eta = -e;
        m.sigma = std::sinh(m.eta);
        m.gamma = std::cosh(m.eta);
      } else {
        m.eta = e;
        m.sigma = std::sinh(e);
        m.gamma = std::cosh(e);
      }
      s.modes.push_back(m);
      m.k = -k;
      s.modes.push_back(m);
    };
    for (int g = 0; g < groups; ++g) {
      Mom r0{big(rng), big(rng), big(rng)}, v{small(rng), small(rng), small(rng)};
      add(r0, Tag::H, eta(rng));
      add(r0 + v, Tag::H, eta(rng));
      add(v, Tag::S, nu(rng));
    }
    for (int g = 0; g < spectator_pairs; ++g)
      add({big(rng), big(rng), big(rng)}, g % 2 ? Tag::S : Tag::H, g % 2 ? nu(rng) : eta(rng));
    try {
      s.finalize();
    } catch (const ConfigError &) {
      continue;
    }
    if (s.triples().size() == std::size_t(2 * groups) && s.pairs().size() == std::size_t(4 * groups) &&
        s.generic())
      return s;
  }
  throw SolverError("generic_mode_set: no generic draw found");
}

} // namespace blab::fock
