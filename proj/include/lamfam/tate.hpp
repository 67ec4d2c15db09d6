#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lamfam/cyclotomic.hpp"
#include "lamfam/elliptic.hpp"
#include "lamfam/padic.hpp"

namespace lamfam {

/// p^v * unit in Q_{p^2}^x.
struct PadicNumber {
  int v = 0;
  PadicElem unit;

  static PadicNumber from(const PadicElem& x) {
    if (x.is_zero()) throw DomainError("zero has no valuation");
    const int v = x.valuation();
    return {v, x.divide_by_p(v)};
  }
  friend PadicNumber operator*(const PadicNumber& a, const PadicNumber& b) { return {a.v + b.v, a.unit * b.unit}; }
  PadicNumber pow(std::int64_t e) const { return {static_cast<int>(v * e), unit.pow_signed(e)}; }
  PadicNumber conj() const { return {v, unit.conj()}; }
};

/// Coefficients of q j(q) = E4^3 / prod (1 - q^n)^24 = 1 + 744 q + 196884 q^2 + ...
/// up to q^terms, mod p^W.
inline std::vector<PadicElem> j_series(std::uint32_t p, int W, int terms) {
  const PadicElem z(p, W);
  const std::size_t n = static_cast<std::size_t>(terms) + 1;
  auto mul = [&](const std::vector<PadicElem>& a, const std::vector<PadicElem>& b) {
    std::vector<PadicElem> r(n, z);
    for (std::size_t i = 0; i < n; ++i)
      if (!a[i].is_zero())
        for (std::size_t k = 0; i + k < n; ++k) r[i + k] += a[i] * b[k];
    return r;
  };
  std::vector<PadicElem> e4(n, z);
  e4[0] = z.one_like();
  for (std::size_t m = 1; m < n; ++m) {
    std::int64_t s3 = 0;
    for (std::size_t d = 1; d <= m; ++d)
      if (m % d == 0) s3 += static_cast<std::int64_t>(d * d * d);
    e4[m] = z.scalar(240) * z.scalar(s3);
  }
  auto num = mul(mul(e4, e4), e4);
  // divide by prod (1 - q^m)^24 = multiply by prod (1 - q^m)^{-24} = prod (sum_k q^{mk})^24
  for (std::size_t m = 1; m < n; ++m)
    for (int r = 0; r < 24; ++r)
      for (std::size_t i = m; i < n; ++i) num[i] += num[i - m];
  return num;
}

/// p^v j(q) for q of valuation exactly v.
inline PadicElem scaled_j(const PadicElem& q) {
  const int v = q.valuation();
  if (v < 1 || q.is_zero()) throw NotMultiplicative("Tate parameter must have positive valuation");
  const int W = q.precision();
  const auto c = j_series(q.prime(), W, (W + v - 1) / v);
  PadicElem F = q.zero_like(), pw = q.one_like();
  for (const auto& a : c) {
    F += a * pw;
    pw *= q;
  }
  return F * q.divide_by_p(v).inverse();
}

namespace detail {

inline int vp_big(BigInt x, std::uint32_t p) {
  if (x == 0) throw DomainError("valuation of 0");
  int v = 0;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

inline PadicElem rational_to_padic(const Rational& r, std::uint32_t p, int N) {
  const PadicElem shape(p, N, 0);
  const BigInt mod(shape.modulus());
  auto red = [&](const BigInt& x) {
    BigInt m = x % mod;
    if (m < 0) m += mod;
    return static_cast<std::int64_t>(m);
  };
  if (denominator(r) % p == 0) throw DomainError("rational not p-integral");
  return shape.scalar(red(numerator(r))) * shape.scalar(red(denominator(r))).inverse();
}

}  // namespace detail

/// -ord_p(j), or NotMultiplicative when j is p-integral.
inline int tate_valuation(const Rational& j, std::uint32_t p) {
  if (j == 0) throw NotMultiplicative("j = 0 is p-integral");
  const int v = detail::vp_big(denominator(j), p) - (numerator(j) % p == 0 ? detail::vp_big(numerator(j), p) : 0);
  if (v <= 0) throw NotMultiplicative("ord_p(j) = " + std::to_string(-v) + " >= 0: potentially good reduction");
  return v;
}

/// p^v j as a p-adic unit mod p^N, v = -ord_p(j).
inline PadicElem scaled_j_value(const Rational& j, std::uint32_t p, int N) {
  const int v = tate_valuation(j, p);
  return detail::rational_to_padic(j * Rational(BigInt(detail::checked_pow(p, v))), p, N);
}

/// q_E with j(q_E) = j, by the fixed point q = j^{-1} (q j(q)). The result has
/// absolute precision N + v so that q_E / p^v is known mod p^N.
inline PadicElem tate_period(const Rational& j, std::uint32_t p, int N) {
  const int v = tate_valuation(j, p);
  const int W = N + v;
  const PadicElem inv_j = scaled_j_value(j, p, W).inverse().times_p(v).with_precision(W);
  const auto c = j_series(p, W, (W + v - 1) / v);
  auto F = [&](const PadicElem& q) {
    PadicElem s = q.zero_like(), pw = q.one_like();
    for (const auto& a : c) {
      s += a * pw;
      pw *= q;
    }
    return s;
  };
  PadicElem q = inv_j;
  for (int it = 0; it <= W / v + 2; ++it) {
    const PadicElem next = inv_j * F(q);
    if (next == q) return q;
    q = next;
  }
  throw NoConvergence("Tate period fixed point");
}

struct TateCurve {
  std::uint32_t p = 0;
  int N = 0;
  Rational j;
  PadicElem q;   // q_E to absolute precision N + ord_p(q_E)
  int alpha = 1;  // a_p(E): +1 split, -1 non-split
  int vq() const { return q.valuation(); }
};

inline Rational j_invariant(const Weierstrass& E) {
  const BigInt c4 = E.c4();
  return Rational(c4 * c4 * c4) / Rational(E.discriminant());
}

inline TateCurve tate_curve(const Weierstrass& E, std::uint32_t p, int N) {
  const auto red = E.reduction(p);
  if (red != Weierstrass::Reduction::Split && red != Weierstrass::Reduction::NonSplit)
    throw NotMultiplicative("curve does not have multiplicative reduction at " + std::to_string(p));
  TateCurve T;
  T.p = p;
  T.N = N;
  T.j = j_invariant(E);
  T.q = tate_period(T.j, p, N);
  T.alpha = red == Weierstrass::Reduction::Split ? 1 : -1;
  return T;
}

/// Branch of the p-adic logarithm on Q_{p^2}^x killing roots of unity and q_E:
///   log_qE(p^e w) = log<w> - (e / ord_p(q_E)) log<w_q>.
inline PadicElem log_qE(const PadicNumber& u, const PadicElem& qE) {
  const PadicNumber Q = PadicNumber::from(qE);
  const int N = std::min(u.unit.precision(), Q.unit.precision());
  const PadicElem lu = plog(one_unit_part(u.unit.with_precision(N)));
  if (u.v == 0) return lu;
  const PadicElem lq = plog(one_unit_part(Q.unit.with_precision(N)));
  std::int64_t m = Q.v;
  int t = 0;
  while (m % static_cast<std::int64_t>(qE.prime()) == 0) {
    m /= qE.prime();
    ++t;
  }
  const PadicElem corr = (lq * lq.scalar(u.v)).divide_by_p(t) * lq.scalar(m).inverse();
  return lu.with_precision(corr.precision()) - corr;
}

inline PadicElem log_E(const PadicNumber& u, const TateCurve& E) { return log_qE(u, E.q); }

/// Coefficients a4, a6 of the Tate curve y^2 + xy = x^3 + a4 x + a6.
inline std::pair<PadicElem, PadicElem> tate_coefficients(const PadicElem& q) {
  const int W = q.precision();
  const int terms = W / std::max(1, q.valuation()) + 1;
  auto s = [&](int k) {
    PadicElem r = q.zero_like(), qn = q;
    for (int n = 1; n <= terms; ++n) {
      r += q.scalar(n).pow(static_cast<std::uint64_t>(k)) * qn * (q.one_like() - qn).inverse();
      qn *= q;
    }
    return r;
  };
  const PadicElem s3 = s(3), s5 = s(5);
  const PadicElem a4 = -(s3 * q.scalar(5));
  const PadicElem a6 = -(s3 * q.scalar(5) + s5 * q.scalar(7)) * q.scalar(12).inverse();
  return {a4, a6};
}

/// Phi_Tate(u) = (X(u,q), Y(u,q)) for a unit u with 1 - u a unit.
inline std::pair<PadicElem, PadicElem> tate_point(const PadicElem& u, const PadicElem& q) {
  if (!u.is_unit() || !(u.one_like() - u).is_unit()) throw DomainError("tate_point needs u and 1 - u to be units");
  const int W = q.precision();
  const int terms = W / std::max(1, q.valuation()) + 1;
  const PadicElem one = u.one_like(), ui = u.inverse();
  auto xt = [&](const PadicElem& z) { return z * ((one - z) * (one - z)).inverse(); };
  auto yt = [&](const PadicElem& z) { return z * z * ((one - z) * (one - z) * (one - z)).inverse(); };
  auto yneg = [&](const PadicElem& w) { return -(w * ((one - w) * (one - w) * (one - w)).inverse()); };
  PadicElem X = xt(u), Y = yt(u), s1 = u.zero_like(), qn = q.with_precision(u.precision()) * one;
  for (int n = 1; n <= terms; ++n) {
    X += xt(qn * u) + xt(qn * ui);
    Y += yt(qn * u) + yneg(qn * ui);
    s1 += one.scalar(n) * qn * (one - qn).inverse();
    qn *= q;
  }
  return {X - s1.scalar(2) * s1, Y + s1};
}

/// y^2 + xy - x^3 - a4 x - a6 at Phi_Tate(u); zero on the curve.
inline PadicElem tate_residual(const PadicElem& u, const PadicElem& q) {
  const auto [X, Y] = tate_point(u, q);
  const auto [a4, a6] = tate_coefficients(q);
  return Y * Y + X * Y - X * X * X - a4 * X - a6;
}

struct HeegnerPointData {
  PadicNumber u;
  std::optional<PadicNumber> u_frob;
  bool quadratic = false;
  int phi1_p = 1;  // phi_1(p) when phi is quadratic
};

struct HeegnerLogs {
  PadicElem plus, minus;
};

/// log_E(P +- alpha P^Frob) in multiplicative notation on u-coordinates.
inline HeegnerLogs heegner_combine(const HeegnerPointData& P, int alpha, const TateCurve& E) {
  if (!P.u_frob) throw MissingFrobenius("Heegner point without its Frobenius image");
  if (alpha != 1 && alpha != -1) throw DomainError("alpha must be +-1");
  const PadicElem l = log_E(P.u, E), lf = log_E(*P.u_frob, E);
  if (P.quadratic && lf != l * l.scalar(P.phi1_p))
    throw InconsistencyFound("Frobenius image is not phi_1(p) P for a quadratic phi");
  return {log_E(P.u * P.u_frob->pow(alpha), E), log_E(P.u * P.u_frob->pow(-alpha), E)};
}

}  // namespace lamfam
