#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lamfam/group_ring.hpp"
#include "lamfam/padic_matrix.hpp"
#include "lamfam/series.hpp"

namespace lamfam {

/// Truncated q-expansion a_0 + a_1 q + ... + a_Q q^Q over a coefficient ring C
/// (PadicElem, CycloInt, CycloPadic, RampedElem, LambdaSeries, ColSeries,
/// GroupRingElem). C must provide +, -, *, ==, zero_like() and is_zero().
///
/// The character handle returns, for a prime l, the ring element
/// <l>_R chi(l) l^{-1} that multiplies a_{n/l} in T_l. For l | N the
/// convention chi(l) = 0 is applied before the handle is consulted.
template <class C>
class QExpansion {
 public:
  using EllTerm = std::function<C(std::int64_t)>;

  QExpansion() = default;
  explicit QExpansion(std::vector<C> coeffs, std::int64_t level = 1) : a_(std::move(coeffs)), level_(level) {
    if (a_.size() < 2) throw CapExhausted("q-expansion needs cap Q >= 1");
    zero_ = a_[0].zero_like();
  }

  static QExpansion zero(const C& shape, int Q, std::int64_t level = 1) {
    if (Q < 1) throw CapExhausted("q-expansion needs cap Q >= 1");
    return QExpansion(std::vector<C>(static_cast<std::size_t>(Q) + 1, shape.zero_like()), level);
  }

  int cap() const { return static_cast<int>(a_.size()) - 1; }
  std::int64_t level() const { return level_; }
  void set_level(std::int64_t N) { level_ = N; }
  std::optional<int> weight() const { return weight_; }
  void set_weight(std::optional<int> k) { weight_ = k; }
  const C& zero_elem() const { return zero_; }
  const std::vector<C>& coefficients() const { return a_; }

  bool has_character() const { return static_cast<bool>(ell_term_); }
  void set_character(EllTerm t) { ell_term_ = std::move(t); }
  const EllTerm& character() const { return ell_term_; }
  /// The T_l coefficient of a_{n/l}; zero when l divides the level.
  C ell_term(std::int64_t ell) const {
    if (level_ % ell == 0) return zero_;
    if (!ell_term_) throw DomainError("q-expansion carries no character handle");
    return ell_term_(ell);
  }

  const C& operator[](std::int64_t n) const {
    if (n < 0 || n > cap()) throw CapExhausted("coefficient a_" + std::to_string(n) + " beyond cap " + std::to_string(cap()));
    return a_[static_cast<std::size_t>(n)];
  }
  void set(std::int64_t n, C c) {
    if (n < 0 || n > cap()) throw CapExhausted("coefficient a_" + std::to_string(n) + " beyond cap " + std::to_string(cap()));
    a_[static_cast<std::size_t>(n)] = std::move(c);
  }
  void add_to(std::int64_t n, const C& c) { a_.at(static_cast<std::size_t>(n)) += c; }

  QExpansion truncate(int Q) const {
    if (Q > cap()) throw CapExhausted("cannot extend cap " + std::to_string(cap()) + " to " + std::to_string(Q));
    QExpansion r = *this;
    r.a_.resize(static_cast<std::size_t>(Q) + 1);
    return r;
  }

  /// Coefficient-wise image under a ring map; metadata other than the
  /// character handle is kept.
  template <class F>
  auto map(F f) const -> QExpansion<decltype(f(std::declval<const C&>()))> {
    using D = decltype(f(std::declval<const C&>()));
    std::vector<D> b;
    b.reserve(a_.size());
    for (const auto& c : a_) b.push_back(f(c));
    QExpansion<D> r(std::move(b), level_);
    r.set_weight(weight_);
    return r;
  }

  bool is_zero() const {
    for (const auto& c : a_)
      if (!c.is_zero()) return false;
    return true;
  }

  friend QExpansion operator+(const QExpansion& x, const QExpansion& y) {
    check(x, y);
    QExpansion r = x;
    for (std::size_t n = 0; n < r.a_.size(); ++n) r.a_[n] = r.a_[n] + y.a_[n];
    return r;
  }
  friend QExpansion operator-(const QExpansion& x, const QExpansion& y) {
    check(x, y);
    QExpansion r = x;
    for (std::size_t n = 0; n < r.a_.size(); ++n) r.a_[n] = r.a_[n] - y.a_[n];
    return r;
  }
  template <class S>
  QExpansion scaled(const S& s) const {
    QExpansion r = *this;
    for (auto& c : r.a_) c = c * s;
    return r;
  }

  /// Equal caps and equal coefficients.
  friend bool operator==(const QExpansion& x, const QExpansion& y) {
    if (x.cap() != y.cap()) return false;
    for (std::size_t n = 0; n < x.a_.size(); ++n)
      if (!(x.a_[n] == y.a_[n])) return false;
    return true;
  }
  friend bool operator!=(const QExpansion& x, const QExpansion& y) { return !(x == y); }

 private:
  static void check(const QExpansion& x, const QExpansion& y) {
    if (x.cap() != y.cap()) throw CapMismatch("q-expansions with caps " + std::to_string(x.cap()) + " and " + std::to_string(y.cap()));
  }

  std::vector<C> a_;
  C zero_;
  std::int64_t level_ = 1;
  std::optional<int> weight_;
  EllTerm ell_term_;
};

/// First index where two expansions differ, or -1; compares up to the
/// smaller cap.
template <class C>
std::int64_t first_difference(const QExpansion<C>& x, const QExpansion<C>& y) {
  const int Q = std::min(x.cap(), y.cap());
  for (int n = 0; n <= Q; ++n)
    if (!(x[n] == y[n])) return n;
  return -1;
}

// ---- Hecke operators ----

/// a_n(T_l xi) = a_{nl}(xi) + [l | n] t_l a_{n/l}(xi), with t_l the ring
/// element <l>_R chi(l) l^{-1} (zero for l | N). Output cap floor(Q/l).
template <class C>
QExpansion<C> hecke_T(std::int64_t ell, const QExpansion<C>& xi, const C& t_ell) {
  if (!detail::is_prime(static_cast<std::uint64_t>(ell))) throw DomainError(std::to_string(ell) + " is not prime");
  const int Q = xi.cap() / static_cast<int>(ell);
  if (Q < 1) throw CapExhausted("T_" + std::to_string(ell) + " leaves no coefficients at cap " + std::to_string(xi.cap()));
  std::vector<C> b;
  b.reserve(static_cast<std::size_t>(Q) + 1);
  for (int n = 0; n <= Q; ++n) {
    C c = xi[static_cast<std::int64_t>(n) * ell];
    if (n % ell == 0 && !t_ell.is_zero()) c = c + t_ell * xi[n / ell];
    b.push_back(std::move(c));
  }
  QExpansion<C> r(std::move(b), xi.level());
  r.set_weight(xi.weight());
  r.set_character(xi.character());
  return r;
}

/// T_l using the expansion's own character handle; U_l when l | N.
template <class C>
QExpansion<C> hecke_T(std::int64_t ell, const QExpansion<C>& xi) {
  return hecke_T(ell, xi, xi.ell_term(ell));
}

/// chi(l) l^{k-1}: the classical weight-k term, equal to the specialization
/// of <l> chi(l) l^{-1} at [u] -> u^k when chi absorbs omega^{k-1}.
inline PadicElem classical_ell_term(const PadicElem& chi_ell, std::int64_t ell, int k) {
  return chi_ell * chi_ell.scalar(ell).pow_signed(k - 1);
}

/// U_p: a_n -> a_{np}. Output cap floor(Q/p).
template <class C>
QExpansion<C> hecke_U(std::int64_t p, const QExpansion<C>& xi) {
  const int Q = xi.cap() / static_cast<int>(p);
  if (Q < 1) throw CapExhausted("U_" + std::to_string(p) + " leaves no coefficients at cap " + std::to_string(xi.cap()));
  std::vector<C> b;
  for (int n = 0; n <= Q; ++n) b.push_back(xi[static_cast<std::int64_t>(n) * p]);
  QExpansion<C> r(std::move(b), xi.level());
  r.set_weight(xi.weight());
  return r;
}

/// V_p: a_n -> a_{n/p} (zero when p does not divide n). Output cap pQ.
template <class C>
QExpansion<C> hecke_V(std::int64_t p, const QExpansion<C>& xi) {
  const int Q = xi.cap() * static_cast<int>(p);
  QExpansion<C> r = QExpansion<C>::zero(xi.zero_elem(), Q, xi.level() * p);
  for (int n = 0; n <= xi.cap(); ++n) r.set(static_cast<std::int64_t>(n) * p, xi[n]);
  r.set_weight(xi.weight());
  return r;
}

/// (1 - V_p U_p) xi: zeroes the coefficients at multiples of p.
template <class C>
QExpansion<C> p_deplete(std::int64_t p, const QExpansion<C>& xi) {
  QExpansion<C> r = xi;
  for (std::int64_t n = 0; n <= xi.cap(); n += p) r.set(n, xi.zero_elem());
  return r;
}

// ---- ordinary projector ----

/// A finite U_p-stable span of q-expansions with the matrix of U_p on it:
/// U_p(basis_j) = sum_i U(i, j) basis_i.
struct UpSpan {
  std::int64_t p = 0;
  std::vector<QExpansion<PadicElem>> basis;
  PadicMatrix U;
};

/// Coordinates of xi in the span, fitted on all coefficients 0..min cap.
inline std::vector<PadicElem> span_coordinates(const std::vector<QExpansion<PadicElem>>& basis, const QExpansion<PadicElem>& xi) {
  if (basis.empty()) throw RankDeficient("empty span");
  int Q = xi.cap();
  for (const auto& b : basis) Q = std::min(Q, b.cap());
  std::vector<std::vector<PadicElem>> cols;
  for (const auto& b : basis) cols.push_back(std::vector<PadicElem>(b.coefficients().begin(), b.coefficients().begin() + Q + 1));
  std::vector<PadicElem> rhs(xi.coefficients().begin(), xi.coefficients().begin() + Q + 1);
  return solve(PadicMatrix::from_columns(cols), rhs);
}

inline QExpansion<PadicElem> span_combination(const UpSpan& S, const std::vector<PadicElem>& x) {
  QExpansion<PadicElem> r = QExpansion<PadicElem>::zero(S.basis.at(0).zero_elem(), S.basis[0].cap(), S.basis[0].level());
  for (std::size_t j = 0; j < S.basis.size(); ++j) r = r + S.basis[j].scaled(x.at(j));
  return r;
}

/// Build the U_p matrix of a span by fitting U_p(b_j) on the truncated
/// expansions; the fit must be consistent on all surviving coefficients.
inline UpSpan make_up_span(std::int64_t p, std::vector<QExpansion<PadicElem>> basis) {
  UpSpan S;
  S.p = p;
  const std::size_t n = basis.size();
  if (n == 0) throw RankDeficient("empty span");
  S.U = PadicMatrix(n, n, basis[0].zero_elem());
  std::vector<QExpansion<PadicElem>> short_basis;
  const int Q = basis[0].cap() / static_cast<int>(p);
  for (const auto& b : basis) short_basis.push_back(b.truncate(Q));
  for (std::size_t j = 0; j < n; ++j) {
    auto x = span_coordinates(short_basis, hecke_U(p, basis[j]));
    for (std::size_t i = 0; i < n; ++i) S.U(i, j) = x[i];
  }
  S.basis = std::move(basis);
  return S;
}

/// Smallest iteration count n for which U^{n!} is certified to stabilise on
/// the unit-root part mod p^N: needs (p-1) p^{N-1} | n!.
inline int ord_iteration_cap(std::uint32_t p, int N) {
  int n = static_cast<int>(p) - 1;
  while (detail::vp_factorial(static_cast<std::uint64_t>(n), p) < N - 1) ++n;
  return n + 1;
}

/// e = lim U^{n!} on the span, computed as M_n = M_{n-1}^n until M_n is
/// idempotent mod the working precision. Agreement of two successive
/// iterates is not enough: U^{25!} = U^{26!} mod 5^8 without either being e.
inline PadicMatrix ord_matrix(const PadicMatrix& U, int max_iter) {
  PadicMatrix M = U;
  for (int n = 2; n <= max_iter; ++n) {
    M = M.pow(static_cast<std::uint64_t>(n));
    if (M * M == M) return M;
  }
  throw NoConvergence("U_p^{n!} not stable after n = " + std::to_string(max_iter));
}

/// e^ord(xi) for xi in the span.
inline QExpansion<PadicElem> ord_project(const UpSpan& S, const QExpansion<PadicElem>& xi, int max_iter) {
  auto x = span_coordinates(S.basis, xi);
  PadicMatrix E = ord_matrix(S.U, max_iter);
  return span_combination(S, E.apply(x));
}

inline QExpansion<PadicElem> ord_project(const UpSpan& S, const QExpansion<PadicElem>& xi) {
  const PadicElem& z = S.basis.at(0).zero_elem();
  return ord_project(S, xi, ord_iteration_cap(z.prime(), z.precision()));
}

/// e^ord without an ingested span: certified only when some U_p^m kills the
/// truncated input (then the limit is 0); otherwise NoConvergence.
template <class C>
QExpansion<C> ord_project(std::int64_t p, const QExpansion<C>& xi, int max_iter = 7) {
  QExpansion<C> y = xi;
  for (int m = 1; m <= max_iter; ++m) {
    if (y.cap() < p) break;
    y = hecke_U(p, y);
    if (y.is_zero()) {
      QExpansion<C> r = QExpansion<C>::zero(xi.zero_elem(), xi.cap(), xi.level());
      r.set_weight(xi.weight());
      return r;
    }
  }
  throw NoConvergence("U_p-iterates of the input do not vanish within the cap; supply an ordinary span");
}

// ---- products ----

/// Cauchy product with coefficients combined through `mul` (a ring map
/// R1 x R2 -> R1 (x) R2). Output cap = min of the caps.
template <class A, class B, class Mul>
auto family_product(const QExpansion<A>& x, const QExpansion<B>& y, Mul mul) -> QExpansion<decltype(mul(x[0], y[0]))> {
  using D = decltype(mul(x[0], y[0]));
  const int Q = std::min(x.cap(), y.cap());
  const D zero = mul(x.zero_elem(), y.zero_elem());
  std::vector<D> c(static_cast<std::size_t>(Q) + 1, zero);
  for (int i = 0; i <= Q; ++i) {
    if (x[i].is_zero()) continue;
    for (int j = 0; i + j <= Q; ++j) {
      if (y[j].is_zero()) continue;
      c[static_cast<std::size_t>(i + j)] = c[static_cast<std::size_t>(i + j)] + mul(x[i], y[j]);
    }
  }
  return QExpansion<D>(std::move(c), std::lcm(x.level(), y.level()));
}

/// Product over the completed tensor product of two Iwasawa-type rings.
template <class C>
QExpansion<IwasawaSeries<C>> family_product(const QExpansion<IwasawaSeries<C>>& x, const QExpansion<IwasawaSeries<C>>& y) {
  const LayoutPtr big = tensor_layout({x.zero_elem().layout(), y.zero_elem().layout()});
  const std::size_t off = x.zero_elem().layout()->nvars();
  return family_product(x, y, [&](const IwasawaSeries<C>& a, const IwasawaSeries<C>& b) {
    return embed_part(a, big, 0) * embed_part(b, big, off);
  });
}

/// Product over the group algebra of the product group.
inline QExpansion<GroupRingElem> family_product(const QExpansion<GroupRingElem>& x, const QExpansion<GroupRingElem>& y) {
  return family_product(x, y, [](const GroupRingElem& a, const GroupRingElem& b) { return GroupRingElem::tensor(a, b); });
}

template <class C>
QExpansion<C> product(const QExpansion<C>& x, const QExpansion<C>& y) {
  return family_product(x, y, [](const C& a, const C& b) { return a * b; });
}

}  // namespace lamfam
