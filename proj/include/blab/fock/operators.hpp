#pragma once

#include "blab/fock/space.hpp"

namespace blab::fock {

enum class Family { EC, EH1, EH2, ES1, ES2, EM1, EM2, EM3 };

inline const std::vector<Family> &all_families() {
  static const std::vector<Family> v{Family::EC,  Family::EH1, Family::EH2, Family::ES1,
                                     Family::ES2, Family::EM1, Family::EM2, Family::EM3};
  return v;
}

inline std::string family_name(Family f) {
  static const char *n[] = {"EC", "EH1", "EH2", "ES1", "ES2", "EM1", "EM2", "EM3"};
  return n[int(f)];
}

inline Family parse_family(const std::string &s) {
  for (auto f : all_families())
    if (family_name(f) == s)
      return f;
  throw ConfigError("unknown operator family '" + s + "'");
}

/// Names of the contraction pieces a family splits into.
inline std::vector<std::string> piece_names(Family f) {
  switch (f) {
  case Family::EC: return {"EC"};
  case Family::EH1: return {"A", "B"};
  case Family::EH2: return {"C", "D"};
  case Family::ES1: return {"I", "II", "III"};
  case Family::ES2: return {"It", "IIt", "IIIt"};
  case Family::EM1: return {"M1", "M2", "M3"};
  case Family::EM2: return {"M1t", "M2t", "M3t"};
  case Family::EM3: return {"M1p", "M2p", "M3p"};
  }
  return {};
}

inline bool is_cubic(Family f) { return f == Family::EC; }

/// One summand of an operator: coefficient, the written word, and the
/// labels needed to sort it into a contraction piece.
struct Summand {
  double coef = 0.0;
  std::vector<Ladder> word;     ///< written left to right
  std::vector<int> created;     ///< modes of the creators in the word
  std::vector<int> annihilated; ///< modes of the annihilators in the word
  bool p_eq_q = false, r_zero = false, p_r_eq_minus_q = false;
  bool adjoint = false; ///< h.c. half of the cubic operator
};

struct OperatorSpec {
  Family family;
  std::vector<Summand> terms;
  std::string note; ///< set when the momentum constraints leave no term

  std::vector<OpTerm> op_terms(bool adjoint_half) const {
    std::vector<OpTerm> t;
    for (const auto &s : terms)
      if (s.adjoint == adjoint_half)
        t.push_back({s.coef, s.word});
    return t;
  }
};

namespace detail {

struct Coef {
  const ModeSet &ms;
  double s(int i) const { return ms[i].sigma; }
  double g(int i) const { return ms[i].gamma; }
};

} // namespace detail

/// alpha(p, r) = N^k (Vhat(r) + Vhat(p)) (g_r g_p s_{p+r} + s_r s_p g_{p+r}).
inline double alpha(const ModeSet &ms, int p, int r, int pr) {
  detail::Coef c{ms};
  return (ms.coupling(ms[r].k) + ms.coupling(ms[p].k)) *
         (c.g(r) * c.g(p) * c.s(pr) + c.s(r) * c.s(p) * c.g(pr));
}

/// Quartic coefficients; p, q, p+r, q+r are mode indices and r the transfer.
inline double beta1(const ModeSet &ms, int p, int q, int pr, int qr, Mom r) {
  detail::Coef c{ms};
  return ms.coupling(r) * ((c.g(p) * c.g(q) * c.g(pr) * c.g(qr) - 1.0) + c.s(p) * c.s(pr) * c.s(q) * c.s(qr) +
                           c.g(p) * c.g(pr) * c.s(q) * c.s(qr));
}

inline double beta2(const ModeSet &ms, int p, int q, int pr, int qr, Mom r) {
  detail::Coef c{ms};
  return ms.coupling(r) * c.g(pr) * c.g(qr) * c.s(p) * c.s(q);
}

inline double zeta1(const ModeSet &ms, int p, int q, int pr, int qr, Mom r) {
  detail::Coef c{ms};
  return ms.coupling(r) * (c.s(p) * c.s(pr) * c.s(q) * c.s(qr) + c.g(p) * c.g(q) * c.g(pr) * c.g(qr) +
                           c.g(p) * c.g(pr) * c.s(q) * c.s(qr));
}

inline double zeta2(const ModeSet &ms, int p, int q, int pr, int qr, Mom r) {
  return beta2(ms, p, q, pr, qr, r);
}

inline double phi1(const ModeSet &ms, int p, int q, int pr, int qr, Mom r) {
  detail::Coef c{ms};
  return ms.coupling(r) * (c.s(p) * c.s(q) * c.s(pr) * c.s(qr) + c.g(p) * c.g(q) * c.g(pr) * c.g(qr) +
                           2.0 * c.g(p) * c.g(pr) * c.s(q) * c.s(qr));
}

inline double phi2(const ModeSet &ms, int p, int q, int pr, int qr, Mom r) {
  detail::Coef c{ms};
  return ms.coupling(r) * (c.g(pr) * c.g(qr) * c.s(p) * c.s(q) + c.g(p) * c.g(qr) * c.s(pr) * c.s(q) +
                           c.g(pr) * c.g(q) * c.s(p) * c.s(qr) + c.g(p) * c.g(q) * c.s(pr) * c.s(qr));
}

inline double phi3(const ModeSet &ms, int p, int q, int pr, int qr, Mom r) {
  detail::Coef c{ms};
  return ms.coupling(r) * (c.s(p) * c.s(pr) * c.s(q) * c.s(qr) + c.g(p) * c.g(q) * c.g(pr) * c.g(qr) +
                           c.g(p) * c.g(pr) * c.s(q) * c.s(qr) + c.s(q) * c.s(pr) * c.g(p) * c.g(qr));
}

/// Resolve an operator's momentum sums over the mode set. Transfers r for
/// which some leg leaves the mode set contribute nothing to expectations in
/// states supported on the modes, so they are dropped.
inline OperatorSpec make_operator(const ModeSet &ms, Family f) {
  OperatorSpec op{f, {}, {}};
  const int M = int(ms.size());
  const double N = ms.n;
  auto tag = [&](int i) { return ms[i].tag; };

  if (f == Family::EC) {
    const double pref = std::sqrt(ms.n0) / N;
    for (int p = 0; p < M; ++p)
      for (int r = 0; r < M; ++r) {
        if (tag(p) != Tag::H || tag(r) != Tag::S)
          continue;
        int pr = ms.index(ms[p].k + ms[r].k);
        if (pr < 0 || tag(pr) != Tag::H)
          continue;
        double a = pref * alpha(ms, p, r, pr);
        int mp = ms.neg(p), mr = ms.neg(r);
        Summand c;
        c.coef = a;
        c.word = {cr(pr), cr(mp), cr(mr)};
        c.created = {pr, mp, mr};
        op.terms.push_back(c);
        Summand h;
        h.coef = a;
        h.word = {an(mr), an(mp), an(pr)};
        h.annihilated = {mr, mp, pr};
        h.adjoint = true;
        op.terms.push_back(h);
      }
    if (op.terms.empty())
      op.note = "no admissible (p, r) in the mode set";
    return op;
  }

  // Tag pattern of (p, q, p+r, q+r), the transfer range, the prefactor, the
  // coefficient and the word shape.
  Tag tp, tq, tpr, tqr;
  bool nonzero_r, pair_shape; // pair_shape: a*_{p+r} a*_{-p} a_{q+r} a_{-q}
  double pref;
  double (*coef)(const ModeSet &, int, int, int, int, Mom);
  switch (f) {
  case Family::EH1: tp = tq = tpr = tqr = Tag::H; nonzero_r = false; pair_shape = false; pref = 0.5 / N; coef = beta1; break;
  case Family::EH2: tp = tq = tpr = tqr = Tag::H; nonzero_r = true; pair_shape = true; pref = 1.0 / N; coef = beta2; break;
  case Family::ES1: tp = tq = tpr = tqr = Tag::S; nonzero_r = false; pair_shape = false; pref = 0.5 / N; coef = zeta1; break;
  case Family::ES2: tp = tq = tpr = tqr = Tag::S; nonzero_r = true; pair_shape = true; pref = 1.0 / N; coef = zeta2; break;
  case Family::EM1: tp = tq = Tag::H; tpr = tqr = Tag::S; nonzero_r = false; pair_shape = false; pref = 1.0 / N; coef = phi1; break;
  case Family::EM2: tp = tq = Tag::H; tpr = tqr = Tag::S; nonzero_r = true; pair_shape = true; pref = 1.0 / N; coef = phi2; break;
  case Family::EM3: tp = Tag::S; tq = Tag::H; tpr = Tag::S; tqr = Tag::H; nonzero_r = false; pair_shape = false; pref = 1.0 / N; coef = phi3; break;
  default: throw ConfigError("make_operator: bad family");
  }
  for (int p = 0; p < M; ++p) {
    if (tag(p) != tp)
      continue;
    for (int pr = 0; pr < M; ++pr) {
      if (tag(pr) != tpr)
        continue;
      const Mom r = ms[pr].k - ms[p].k;
      if (nonzero_r && is_zero(r))
        continue;
      for (int q = 0; q < M; ++q) {
        if (tag(q) != tq)
          continue;
        int qr = ms.index(ms[q].k + r);
        if (qr < 0 || tag(qr) != tqr)
          continue;
        Summand s;
        s.coef = pref * coef(ms, p, q, pr, qr, r);
        if (pair_shape) {
          int mp = ms.neg(p), mq = ms.neg(q);
          s.word = {cr(pr), cr(mp), an(qr), an(mq)};
          s.created = {pr, mp};
          s.annihilated = {qr, mq};
        } else {
          s.word = {cr(p), cr(qr), an(q), an(pr)};
          s.created = {p, qr};
          s.annihilated = {q, pr};
        }
        s.p_eq_q = p == q;
        s.r_zero = is_zero(r);
        s.p_r_eq_minus_q = pr == ms.neg(q);
        op.terms.push_back(std::move(s));
      }
    }
  }
  if (op.terms.empty())
    op.note = "momentum constraints leave no term on this mode set";
  return op;
}

/// <a, O b> from the literal operator, both halves for the cubic one.
inline double matrix_element(const OperatorSpec &op, const FockVector &a, const FockVector &b, int n_max) {
  double s = a.dot(apply_terms(op.op_terms(false), b, n_max));
  if (is_cubic(op.family))
    s += a.dot(apply_terms(op.op_terms(true), b, n_max));
  return s;
}

inline double expectation(const OperatorSpec &op, const FockVector &v, int n_max) {
  return matrix_element(op, v, v, n_max);
}

} // namespace blab::fock
