#pragma once

#include "blab/fock/operators.hpp"

namespace blab::fock {

/// Reading of the index range in the theta product. `all_i` lets i run over
/// every triple, `i_ne_j` excludes i = j.
enum class ThetaConvention { all_i, i_ne_j };

inline const char *convention_name(ThetaConvention c) {
  return c == ThetaConvention::all_i ? "all_i" : "i_ne_j";
}

/// theta({r_j, v_j}) = prod_{i,j,k; j != k} prod_{p_i, p_k} [-p_i + v_j != p_k].
inline bool theta(const ModeSet &ms, std::span<const Pair> t, ThetaConvention conv = ThetaConvention::all_i) {
  const std::size_t m = t.size();
  auto hs = [&](const Pair &p) { return std::array<Mom, 2>{-ms[p.r].k, ms[p.rv].k}; };
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k) {
      if (j == k)
        continue;
      const Mom vj = ms[t[j].v].k;
      for (std::size_t i = 0; i < m; ++i) {
        if (conv == ThetaConvention::i_ne_j && i == j)
          continue;
        for (const Mom &pi : hs(t[i]))
          for (const Mom &pk : hs(t[k]))
            if (-pi + vj == pk)
              return false;
      }
    }
  return true;
}

/// Product of Theta evaluations along the creation sequence of the tuple
/// (pair 1 acts first on the vacuum).
inline bool theta_by_operator(const ModeSet &ms, std::span<const Pair> t) {
  State s;
  const int big = 1 << 20;
  for (const Pair &p : t) {
    if (!theta_op(ms, p, s))
      return false;
    create(s, p.rv, big);
    create(s, ms.neg(p.r), big);
    create(s, ms.neg(p.v), big);
  }
  return true;
}

namespace detail {

/// Calls f(tuple) for every ordered m-tuple of admissible pairs.
template <class F> void for_each_tuple(const ModeSet &ms, int m, F &&f) {
  const auto &P = ms.pairs();
  if (m == 0) {
    f(std::span<const Pair>{});
    return;
  }
  if (P.empty())
    return;
  std::vector<std::size_t> idx(std::size_t(m), 0);
  std::vector<Pair> t(static_cast<std::size_t>(m));
  while (true) {
    for (int i = 0; i < m; ++i)
      t[std::size_t(i)] = P[idx[std::size_t(i)]];
    f(std::span<const Pair>(t));
    int i = m - 1;
    while (i >= 0 && ++idx[std::size_t(i)] == P.size())
      idx[std::size_t(i--)] = 0;
    if (i < 0)
      return;
  }
}

} // namespace detail

/// ||xi||^2 = sum_m (2^m m!)^{-1} N^{-m} sum theta prod (eta_r + eta_{r+v})^2 sigma_v^2,
/// truncated at m_max. Per-order terms in `orders`.
struct NormSeries {
  std::vector<double> orders;
  double total() const { return pairwise_sum(orders); }
};

inline NormSeries norm_series(const ModeSet &ms, int m_max, ThetaConvention conv = ThetaConvention::all_i,
                              bool use_theta = true) {
  if (m_max < 0)
    throw ConfigError("norm_series: m_max must be >= 0");
  NormSeries out;
  double fact = 1.0;
  for (int m = 0; m <= m_max; ++m) {
    if (m > 0)
      fact *= 2.0 * m;
    std::vector<double> terms;
    detail::for_each_tuple(ms, m, [&](std::span<const Pair> t) {
      if (use_theta && !theta(ms, t, conv))
        return;
      double w = 1.0;
      for (const Pair &p : t) {
        double a = (ms[p.r].eta + ms[p.rv].eta) * ms[p.v].sigma;
        w *= a * a;
      }
      terms.push_back(w);
    });
    out.orders.push_back(pairwise_sum(terms) / (fact * std::pow(ms.n, m)));
  }
  return out;
}

/// xi_m written through the theta-restricted creation sum: a map from the
/// multiset of created modes to its amplitude, together with the triples
/// that built it.
struct SeriesState {
  double amp = 0.0;
  std::vector<std::array<int, 3>> triples; ///< one entry per created triple
  bool repeated = false;                   ///< some mode created twice
};

using SeriesOrder = std::map<std::vector<int>, SeriesState>;

inline SeriesOrder series_component(const ModeSet &ms, int m, ThetaConvention conv = ThetaConvention::all_i) {
  SeriesOrder out;
  double fact = 1.0;
  for (int i = 2; i <= m; ++i)
    fact *= i;
  const double pref = std::pow(ms.n, -0.5 * m) / fact;
  detail::for_each_tuple(ms, m, [&](std::span<const Pair> t) {
    if (!theta(ms, t, conv))
      return;
    double w = pref;
    std::vector<int> key;
    std::vector<std::array<int, 3>> tri;
    for (const Pair &p : t) {
      w *= ms[p.r].eta * ms[p.v].sigma;
      std::array<int, 3> c{p.rv, ms.neg(p.r), ms.neg(p.v)};
      key.insert(key.end(), c.begin(), c.end());
      std::sort(c.begin(), c.end());
      tri.push_back(c);
    }
    std::sort(key.begin(), key.end());
    bool rep = std::adjacent_find(key.begin(), key.end()) != key.end();
    // a*...a* Omega carries prod sqrt(n!) on the normalized occupation state
    if (rep) {
      for (std::size_t i = 0; i < key.size();) {
        std::size_t j = i;
        while (j < key.size() && key[j] == key[i])
          ++j;
        for (std::size_t c = 2; c <= j - i; ++c)
          w *= std::sqrt(double(c));
        i = j;
      }
    }
    auto &s = out[key];
    if (s.triples.empty())
      s.triples = tri;
    s.amp += w;
    s.repeated = rep;
  });
  return out;
}

inline FockVector to_fock(const SeriesOrder &so) {
  FockVector v;
  for (const auto &[key, s] : so) {
    State st;
    for (int k : key) {
      if (!st.empty() && st.back().first == k)
        ++st.back().second;
      else
        st.push_back({k, 1});
    }
    v.add(st, s.amp);
  }
  return v;
}

//==============================================================================
// Contraction series.

struct PieceValues {
  std::vector<std::string> names;
  std::vector<double> value; ///< per piece
  double residual = 0.0;     ///< contractions that fit no named piece
  std::size_t residual_count = 0;
  double total() const { return pairwise_sum(value) + residual; }
};

namespace detail {

/// Index of the triple of a series state containing `mode`, or -1.
inline int triple_containing(const SeriesState &s, int mode) {
  for (std::size_t i = 0; i < s.triples.size(); ++i)
    for (int m : s.triples[i])
      if (m == mode)
        return int(i);
  return -1;
}

inline bool contains(const std::array<int, 3> &t, int mode) {
  return std::find(t.begin(), t.end(), mode) != t.end();
}

/// Remove one copy of each of `out` from a sorted multiset, then add `in`.
inline std::optional<std::vector<int>> contract(const std::vector<int> &key, const std::vector<int> &out,
                                                const std::vector<int> &in) {
  std::vector<int> k = key;
  for (int o : out) {
    auto it = std::find(k.begin(), k.end(), o);
    if (it == k.end())
      return std::nullopt;
    k.erase(it);
  }
  k.insert(k.end(), in.begin(), in.end());
  std::sort(k.begin(), k.end());
  return k;
}

/// Piece index for a quartic contraction of ket state `ket` into bra `bra`;
/// -1 means residual.
inline int classify(const ModeSet &ms, Family f, const Summand &s, const SeriesState &bra,
                    const SeriesState &ket) {
  switch (f) {
  case Family::EH1:
  case Family::EH2: {
    int kz = triple_containing(ket, s.annihilated[0]), kw = triple_containing(ket, s.annihilated[1]);
    int bx = triple_containing(bra, s.created[0]), by = triple_containing(bra, s.created[1]);
    if (kz == kw && bx == by)
      return 0;
    if (kz != kw && bx != by)
      return 1;
    return -1;
  }
  case Family::ES1:
    if (s.p_eq_q && !s.r_zero)
      return 0;
    if (s.r_zero)
      return 1;
    return 2;
  case Family::ES2:
    if (s.p_eq_q)
      return 0;
    if (s.p_r_eq_minus_q)
      return 1;
    return 2;
  default: {
    auto pick = [&](const std::vector<int> &legs, Tag t) { return ms[legs[0]].tag == t ? legs[0] : legs[1]; };
    int zh = pick(s.annihilated, Tag::H), zs = pick(s.annihilated, Tag::S);
    int xh = pick(s.created, Tag::H), xs = pick(s.created, Tag::S);
    int KH = triple_containing(ket, zh), KS = triple_containing(ket, zs);
    int BH = triple_containing(bra, xh), BS = triple_containing(bra, xs);
    if (KH < 0 || KS < 0 || BH < 0 || BS < 0)
      return -1;
    if (KH == KS && BH == BS)
      return 0;
    if (KH == KS || BH == BS)
      return -1;
    const auto &kt = ket.triples[std::size_t(KH)];
    int other = -1;
    for (int m : kt)
      if (m != zh && ms[m].tag == Tag::H)
        other = m;
    if (other < 0)
      return -1;
    if (contains(bra.triples[std::size_t(BH)], other))
      return 1;
    if (contains(bra.triples[std::size_t(BS)], other))
      return 2;
    return -1;
  }
  }
}

} // namespace detail

/// Order-m term of the contraction series: quartic families pair xi_m with
/// xi_m, the cubic one pairs xi_m with xi_{m-1} (twice, for the h.c.).
inline PieceValues contraction_order(const ModeSet &ms, const OperatorSpec &op, const SeriesOrder &bra,
                                     const SeriesOrder &ket) {
  PieceValues pv;
  pv.names = piece_names(op.family);
  std::vector<std::vector<double>> acc(pv.names.size());
  std::vector<double> res;
  for (const auto &[kkey, ks] : ket)
    for (const auto &s : op.terms) {
      if (s.adjoint)
        continue;
      if (!s.annihilated.empty() && s.annihilated[0] == s.annihilated[1])
        continue;
      auto bkey = detail::contract(kkey, s.annihilated, s.created);
      if (!bkey)
        continue;
      auto it = bra.find(*bkey);
      if (it == bra.end())
        continue;
      const SeriesState &bs = it->second;
      double c = s.coef * bs.amp * ks.amp;
      int piece;
      if (is_cubic(op.family)) {
        c *= 2.0;
        std::array<int, 3> t{s.created[0], s.created[1], s.created[2]};
        std::sort(t.begin(), t.end());
        piece = std::find(bs.triples.begin(), bs.triples.end(), t) != bs.triples.end() ? 0 : -1;
      } else {
        piece = detail::classify(ms, op.family, s, bs, ks);
      }
      if (piece < 0)
        res.push_back(c);
      else
        acc[std::size_t(piece)].push_back(c);
    }
  for (auto &a : acc)
    pv.value.push_back(pairwise_sum(a));
  pv.residual = pairwise_sum(res);
  pv.residual_count = res.size();
  return pv;
}

/// Per-order pieces for m = 0..m_max (order 0 is empty for every family).
inline std::vector<PieceValues> contraction_series(const ModeSet &ms, Family f, int m_max,
                                                   ThetaConvention conv = ThetaConvention::all_i) {
  auto op = make_operator(ms, f);
  std::vector<SeriesOrder> comp;
  for (int m = 0; m <= m_max; ++m)
    comp.push_back(series_component(ms, m, conv));
  std::vector<PieceValues> out;
  for (int m = 0; m <= m_max; ++m) {
    if (is_cubic(f)) {
      if (m == 0) {
        PieceValues z;
        z.names = piece_names(f);
        z.value.assign(z.names.size(), 0.0);
        out.push_back(z);
      } else {
        out.push_back(contraction_order(ms, op, comp[std::size_t(m)], comp[std::size_t(m - 1)]));
      }
    } else {
      out.push_back(contraction_order(ms, op, comp[std::size_t(m)], comp[std::size_t(m)]));
    }
  }
  return out;
}

/// Matrix side, order by order: <xi_m, O xi_m> for quartic families and
/// <xi_m, C xi_{m-1}> + <xi_{m-1}, C* xi_m> for the cubic one.
struct MatrixOrders {
  std::vector<double> value;
  std::vector<double> creation_half, adjoint_half; ///< cubic only
};

inline MatrixOrders matrix_orders(const ModeSet &ms, Family f, const Xi &x) {
  auto op = make_operator(ms, f);
  MatrixOrders out;
  const int M = int(x.comp.size()) - 1;
  auto cre = op.op_terms(false), adj = op.op_terms(true);
  for (int m = 0; m <= M; ++m) {
    const auto &xm = x.comp[std::size_t(m)];
    if (is_cubic(f)) {
      double c = 0.0, h = 0.0;
      if (m > 0) {
        const auto &xl = x.comp[std::size_t(m - 1)];
        c = xm.dot(apply_terms(cre, xl, x.n_max));
        h = xl.dot(apply_terms(adj, xm, x.n_max));
      }
      out.creation_half.push_back(c);
      out.adjoint_half.push_back(h);
      out.value.push_back(c + h);
    } else {
      out.value.push_back(xm.dot(apply_terms(cre, xm, x.n_max)));
    }
  }
  return out;
}

} // namespace blab::fock
