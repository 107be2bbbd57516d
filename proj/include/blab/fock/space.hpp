#pragma once

#include "blab/fock/modes.hpp"

#include <optional>

namespace blab::fock {

/// Occupation state: (mode, count) sorted by mode, counts > 0.
using State = std::vector<std::pair<int, int>>;

inline int occupation(const State &s, int mode) {
  auto it = std::lower_bound(s.begin(), s.end(), std::pair<int, int>{mode, 0});
  return it != s.end() && it->first == mode ? it->second : 0;
}

inline int particle_number(const State &s) {
  int n = 0;
  for (auto [m, c] : s)
    n += c;
  return n;
}

/// Sparse real vector over occupation states. Ordered map, so iteration
/// and reductions are deterministic.
class FockVector {
public:
  std::map<State, double> amp;

  static FockVector vacuum() {
    FockVector v;
    v.amp[State{}] = 1.0;
    return v;
  }

  std::size_t size() const { return amp.size(); }
  bool empty() const { return amp.empty(); }

  void add(const State &s, double a) {
    if (a == 0.0)
      return;
    amp[s] += a;
  }

  void add(const FockVector &o, double scale = 1.0) {
    for (const auto &[s, a] : o.amp)
      add(s, scale * a);
  }

  double at(const State &s) const {
    auto it = amp.find(s);
    return it == amp.end() ? 0.0 : it->second;
  }

  double dot(const FockVector &o) const {
    const FockVector &small = size() <= o.size() ? *this : o;
    const FockVector &large = size() <= o.size() ? o : *this;
    std::vector<double> t;
    t.reserve(small.size());
    for (const auto &[s, a] : small.amp)
      if (double b = large.at(s); b != 0.0)
        t.push_back(a * b);
    return pairwise_sum(t);
  }

  double norm2() const { return dot(*this); }

  /// Particle numbers present (sorted, unique).
  std::vector<int> sectors() const {
    std::set<int> n;
    for (const auto &[s, a] : amp)
      n.insert(particle_number(s));
    return {n.begin(), n.end()};
  }

  std::size_t approx_bytes() const {
    std::size_t b = 0;
    for (const auto &[s, a] : amp)
      b += 64 + s.size() * sizeof(std::pair<int, int>);
    return b;
  }
};

struct Ladder {
  int mode;
  bool dagger;
};

inline Ladder cr(int m) { return {m, true}; }
inline Ladder an(int m) { return {m, false}; }

/// a*_m: sqrt(n+1) and the raised state; overflow past n_max throws.
inline double create(State &s, int mode, int n_max) {
  auto it = std::lower_bound(s.begin(), s.end(), std::pair<int, int>{mode, 0});
  if (it != s.end() && it->first == mode) {
    if (it->second + 1 > n_max)
      throw ResourceError("fock: occupation of mode " + std::to_string(mode) + " would exceed n_max = " +
                          std::to_string(n_max) + " (truncation)");
    ++it->second;
    return std::sqrt(double(it->second));
  }
  if (n_max < 1)
    throw ResourceError("fock: n_max < 1");
  s.insert(it, {mode, 1});
  return 1.0;
}

/// a_m: sqrt(n) and the lowered state, 0 if unoccupied.
inline double annihilate(State &s, int mode) {
  auto it = std::lower_bound(s.begin(), s.end(), std::pair<int, int>{mode, 0});
  if (it == s.end() || it->first != mode)
    return 0.0;
  double f = std::sqrt(double(it->second));
  if (--it->second == 0)
    s.erase(it);
  return f;
}

/// Apply a word of ladder operators written left to right (rightmost acts first).
inline double apply_word(State &s, std::span<const Ladder> word, int n_max) {
  double f = 1.0;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    f *= it->dagger ? create(s, it->mode, n_max) : annihilate(s, it->mode);
    if (f == 0.0)
      return 0.0;
  }
  return f;
}

/// coef * word, summed over terms, applied to v. Terms are processed in
/// parallel, each into its own vector, and merged in term order.
struct OpTerm {
  double coef;
  std::vector<Ladder> word;
};

inline FockVector apply_terms(const std::vector<OpTerm> &terms, const FockVector &v, int n_max) {
  std::vector<FockVector> part(terms.size());
  std::vector<std::string> err(terms.size());
  parallel_for(terms.size(), [&](std::size_t i) {
    try {
      for (const auto &[s0, a] : v.amp) {
        State s = s0;
        double f = apply_word(s, terms[i].word, n_max);
        if (f != 0.0)
          part[i].add(s, terms[i].coef * f * a);
      }
    } catch (const ResourceError &e) {
      err[i] = e.what();
    }
  });
  for (const auto &e : err)
    if (!e.empty())
      throw ResourceError(e);
  FockVector out;
  for (const auto &p : part)
    out.add(p);
  return out;
}

//==============================================================================
// Theta_{r,v}: diagonal 0/1 projector on occupation states.

inline bool theta_op(const ModeSet &ms, const Pair &p, const State &s) {
  auto occ = [&](Mom k) {
    int i = ms.index(k);
    return i < 0 ? 0 : occupation(s, i);
  };
  const Mom r = ms[p.r].k, v = ms[p.v].k;
  for (auto [m, c] : s) {
    const Mode &md = ms[m];
    if (md.tag == Tag::H && occ(-md.k + v) > 0)
      return false;
    if (md.tag == Tag::S && occ(r - md.k) + occ(-r - v - md.k) > 0)
      return false;
  }
  return true;
}

inline FockVector theta_op_apply(const ModeSet &ms, const Pair &p, const FockVector &v) {
  FockVector out;
  for (const auto &[s, a] : v.amp)
    if (theta_op(ms, p, s))
      out.add(s, a);
  return out;
}

/// A = N^{-1/2} sum eta_r sigma_v a*_{r+v} a*_{-r} a*_{-v} Theta_{r,v}.
inline FockVector apply_A(const ModeSet &ms, const FockVector &v, int n_max) {
  const double pref = 1.0 / std::sqrt(ms.n);
  const auto &pairs = ms.pairs();
  std::vector<FockVector> part(pairs.size());
  std::vector<std::string> err(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const Pair &p = pairs[i];
    const double c = pref * ms[p.r].eta * ms[p.v].sigma;
    const Ladder word[3] = {cr(p.rv), cr(ms.neg(p.r)), cr(ms.neg(p.v))};
    try {
      for (const auto &[s0, a] : v.amp) {
        if (!theta_op(ms, p, s0))
          continue;
        State s = s0;
        double f = apply_word(s, word, n_max);
        part[i].add(s, c * f * a);
      }
    } catch (const ResourceError &e) {
      err[i] = e.what();
    }
  });
  for (const auto &e : err)
    if (!e.empty())
      throw ResourceError(e);
  FockVector out;
  for (const auto &p : part)
    out.add(p);
  return out;
}

/// xi truncated at order m_max, with the components A^m Omega / m!.
struct Xi {
  std::vector<FockVector> comp;
  int n_max = 0;

  FockVector total() const {
    FockVector t;
    for (const auto &c : comp)
      t.add(c);
    return t;
  }
  double norm2() const { return total().norm2(); }
};

inline int default_n_max(int m_max) { return 3 * m_max + 4; }

inline Xi xi(const ModeSet &ms, int m_max, int n_max = 0) {
  if (m_max < 0)
    throw ConfigError("xi: m_max must be >= 0");
  Xi x;
  x.n_max = n_max > 0 ? n_max : default_n_max(m_max);
  x.comp.push_back(FockVector::vacuum());
  for (int m = 1; m <= m_max; ++m) {
    FockVector next = apply_A(ms, x.comp.back(), x.n_max);
    for (auto &[s, a] : next.amp)
      a /= double(m);
    std::size_t bytes = 0;
    for (const auto &c : x.comp)
      bytes += c.approx_bytes();
    try {
      check_budget(bytes + next.approx_bytes(), "Fock basis");
    } catch (const ResourceError &) {
      throw ResourceError("xi: basis exceeds the memory budget at order " + std::to_string(m));
    }
    x.comp.push_back(std::move(next));
  }
  return x;
}

} // namespace blab::fock
