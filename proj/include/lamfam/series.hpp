#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lamfam/cyclo_padic.hpp"
#include "lamfam/padic.hpp"
#include "lamfam/ramified.hpp"

namespace lamfam {

/// Which concrete coefficient ring a series layout models. Specialization
/// at a Weight depends on it.
enum class RingKind { Generic, Lambda, LambdaCol, GroupAlgebra, Triple };

/// Variables, degree caps and the graded-lex monomial list of a truncation.
class SeriesLayout {
 public:
  static constexpr std::size_t kMaxMonomials = 2'000'000;

  SeriesLayout(std::vector<std::string> vars, std::vector<int> caps, int total_cap = -1,
               RingKind kind = RingKind::Generic, int col_a = 0)
      : vars_(std::move(vars)), caps_(std::move(caps)), total_cap_(total_cap), kind_(kind), col_a_(col_a) {
    if (vars_.size() != caps_.size() || vars_.empty()) throw CapMismatch("variables and caps differ in length");
    for (std::size_t i = 0; i < vars_.size(); ++i)
      for (std::size_t j = i + 1; j < vars_.size(); ++j)
        if (vars_[i] == vars_[j]) throw CapMismatch("duplicate variable " + vars_[i]);
    std::size_t box = 1;
    strides_.resize(caps_.size());
    for (std::size_t i = caps_.size(); i-- > 0;) {
      if (caps_[i] < 0) throw CapMismatch("negative cap");
      strides_[i] = box;
      box *= static_cast<std::size_t>(caps_[i]) + 1;
      if (box > kMaxMonomials) throw CapOverflow("truncation box exceeds " + std::to_string(kMaxMonomials));
    }
    std::vector<int> e(caps_.size(), 0);
    for (std::size_t idx = 0; idx < box; ++idx) {
      std::size_t r = idx;
      int tot = 0;
      for (std::size_t i = 0; i < caps_.size(); ++i) {
        e[i] = static_cast<int>(r / strides_[i]);
        r %= strides_[i];
        tot += e[i];
      }
      if (total_cap_ < 0 || tot <= total_cap_) monos_.push_back(e);
    }
    std::stable_sort(monos_.begin(), monos_.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
      int ta = 0, tb = 0;
      for (int x : a) ta += x;
      for (int x : b) tb += x;
      if (ta != tb) return ta < tb;
      return a > b;
    });
    box_index_.assign(box, -1);
    for (std::size_t m = 0; m < monos_.size(); ++m) box_index_[box_offset(monos_[m])] = static_cast<int>(m);
  }

  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<int>& caps() const { return caps_; }
  int total_cap() const { return total_cap_; }
  RingKind kind() const { return kind_; }
  int col_a() const { return col_a_; }
  std::size_t size() const { return monos_.size(); }
  std::size_t nvars() const { return vars_.size(); }
  const std::vector<int>& monomial(std::size_t m) const { return monos_[m]; }

  int var_index(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return static_cast<int>(i);
    throw CapMismatch("unknown variable " + name);
  }

  /// Index of the monomial with exponents e, or -1 if it is truncated away.
  int index_of(const std::vector<int>& e) const {
    int tot = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] < 0 || e[i] > caps_[i]) return -1;
      tot += e[i];
    }
    if (total_cap_ >= 0 && tot > total_cap_) return -1;
    return box_index_[box_offset(e)];
  }

  bool same_as(const SeriesLayout& o) const {
    return vars_ == o.vars_ && caps_ == o.caps_ && total_cap_ == o.total_cap_ && col_a_ == o.col_a_;
  }

 private:
  std::size_t box_offset(const std::vector<int>& e) const {
    std::size_t off = 0;
    for (std::size_t i = 0; i < e.size(); ++i) off += strides_[i] * static_cast<std::size_t>(e[i]);
    return off;
  }

  std::vector<std::string> vars_;
  std::vector<int> caps_;
  int total_cap_;
  RingKind kind_;
  int col_a_;
  std::vector<std::size_t> strides_;
  std::vector<std::vector<int>> monos_;
  std::vector<int> box_index_;
};

using LayoutPtr = std::shared_ptr<const SeriesLayout>;

inline LayoutPtr make_layout(std::vector<std::string> vars, std::vector<int> caps, int total_cap = -1,
                             RingKind kind = RingKind::Generic, int col_a = 0) {
  return std::make_shared<const SeriesLayout>(std::move(vars), std::move(caps), total_cap, kind, col_a);
}

/// Truncated power series with coefficients in C (PadicElem or RampedElem).
/// exact() stays true while no nonzero term has been truncated away, so the
/// series is a polynomial known in full.
template <class C>
class IwasawaSeries {
 public:
  IwasawaSeries() = default;

  IwasawaSeries(LayoutPtr layout, const C& zero) : layout_(std::move(layout)), coeffs_(layout_->size(), zero.zero_like()) {}

  static IwasawaSeries constant(LayoutPtr layout, const C& c) {
    IwasawaSeries s(std::move(layout), c);
    s.coeffs_[0] = c;
    return s;
  }

  static IwasawaSeries variable(LayoutPtr layout, const std::string& name, const C& one) {
    IwasawaSeries s(layout, one);
    std::vector<int> e(layout->nvars(), 0);
    e[static_cast<std::size_t>(layout->var_index(name))] = 1;
    int idx = layout->index_of(e);
    if (idx < 0) throw CapOverflow("variable " + name + " truncated by caps");
    s.coeffs_[static_cast<std::size_t>(idx)] = one;
    return s;
  }

  const LayoutPtr& layout() const { return layout_; }
  const std::vector<C>& coefficients() const { return coeffs_; }
  IwasawaSeries zero_like() const { return IwasawaSeries(layout_, coeffs_.at(0)); }
  IwasawaSeries one_like() const { return constant(layout_, coeffs_.at(0).one_like()); }
  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (!c.is_zero()) return false;
    return true;
  }
  bool exact() const { return exact_; }
  /// Smallest total degree dropped by a product, INT_MAX if none.
  int truncation_order() const { return trunc_order_; }
  void mark_inexact() { exact_ = false; }

  const C& coeff(const std::vector<int>& e) const {
    int idx = layout_->index_of(e);
    if (idx < 0) throw CapOverflow("monomial outside caps");
    return coeffs_[static_cast<std::size_t>(idx)];
  }
  void set_coeff(const std::vector<int>& e, const C& c) {
    int idx = layout_->index_of(e);
    if (idx < 0) throw CapOverflow("monomial outside caps");
    coeffs_[static_cast<std::size_t>(idx)] = c;
  }
  void set_coeff_index(std::size_t idx, const C& c) { coeffs_.at(idx) = c; }

  IwasawaSeries& operator+=(const IwasawaSeries& b) { return *this = *this + b; }
  IwasawaSeries& operator-=(const IwasawaSeries& b) { return *this = *this - b; }
  IwasawaSeries& operator*=(const IwasawaSeries& b) { return *this = *this * b; }

  IwasawaSeries operator-() const {
    IwasawaSeries r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }
  friend IwasawaSeries operator+(const IwasawaSeries& a, const IwasawaSeries& b) {
    check(a, b);
    IwasawaSeries r = a;
    for (std::size_t i = 0; i < r.coeffs_.size(); ++i) r.coeffs_[i] += b.coeffs_[i];
    r.exact_ = a.exact_ && b.exact_;
    r.trunc_order_ = std::min(a.trunc_order_, b.trunc_order_);
    return r;
  }
  friend IwasawaSeries operator-(const IwasawaSeries& a, const IwasawaSeries& b) { return a + (-b); }

  friend IwasawaSeries operator*(const IwasawaSeries& a, const IwasawaSeries& b) {
    check(a, b);
    const SeriesLayout& L = *a.layout_;
    IwasawaSeries r(a.layout_, a.coeffs_[0]);
    r.exact_ = a.exact_ && b.exact_;
    r.trunc_order_ = std::min(a.trunc_order_, b.trunc_order_);
    std::vector<int> e(L.nvars());
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      if (a.coeffs_[i].is_zero()) continue;
      const auto& ei = L.monomial(i);
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
        if (b.coeffs_[j].is_zero()) continue;
        const auto& ej = L.monomial(j);
        int tot = 0;
        for (std::size_t v = 0; v < e.size(); ++v) {
          e[v] = ei[v] + ej[v];
          tot += e[v];
        }
        int idx = L.index_of(e);
        if (idx < 0) {
          C prod = a.coeffs_[i] * b.coeffs_[j];
          if (!prod.is_zero()) {
            r.exact_ = false;
            r.trunc_order_ = std::min(r.trunc_order_, tot);
          }
          continue;
        }
        r.coeffs_[static_cast<std::size_t>(idx)] += a.coeffs_[i] * b.coeffs_[j];
      }
    }
    return r;
  }

  template <class S>
  IwasawaSeries scaled(const S& c) const {
    IwasawaSeries r = *this;
    for (auto& x : r.coeffs_) x = x * c;
    return r;
  }

  friend bool operator==(const IwasawaSeries& a, const IwasawaSeries& b) {
    check(a, b);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      if (a.coeffs_[i] != b.coeffs_[i]) return false;
    return true;
  }
  friend bool operator!=(const IwasawaSeries& a, const IwasawaSeries& b) { return !(a == b); }

  /// Evaluate by substituting point[v] for variable v; V must accept C via embed.
  template <class V, class Embed>
  V evaluate(const std::vector<V>& point, Embed embed) const {
    const SeriesLayout& L = *layout_;
    if (point.size() != L.nvars()) throw CapMismatch("point has wrong number of coordinates");
    std::vector<std::vector<V>> powers(L.nvars());
    for (std::size_t v = 0; v < L.nvars(); ++v) {
      powers[v].push_back(point[v].one_like());
      for (int d = 1; d <= L.caps()[v]; ++d) powers[v].push_back(powers[v].back() * point[v]);
    }
    V sum = point[0].zero_like();
    for (std::size_t m = 0; m < coeffs_.size(); ++m) {
      if (coeffs_[m].is_zero()) continue;
      V term = embed(coeffs_[m]);
      const auto& e = L.monomial(m);
      for (std::size_t v = 0; v < e.size(); ++v)
        if (e[v]) term = term * powers[v][static_cast<std::size_t>(e[v])];
      sum = sum + term;
    }
    return sum;
  }

 private:
  static void check(const IwasawaSeries& a, const IwasawaSeries& b) {
    if (!a.layout_ || !b.layout_ || !(a.layout_ == b.layout_ || a.layout_->same_as(*b.layout_)))
      throw CapMismatch("series live in different truncations");
  }

  LayoutPtr layout_;
  std::vector<C> coeffs_;
  bool exact_ = true;
  int trunc_order_ = INT_MAX;
};

using LambdaSeries = IwasawaSeries<PadicElem>;
using ColSeries = IwasawaSeries<RampedElem>;

/// Finite-order character of Z_p^r with values in p^level-th roots of unity:
/// c |-> zeta^{sum e_i c_i}.
struct FiniteTwist {
  int level = 0;
  std::vector<std::int64_t> exponents;

  bool trivial() const {
    for (auto e : exponents)
      if (e != 0) return false;
    return true;
  }
};

/// A point of weight space.
///   Arithmetic:   T |-> eps(1+p) (1+p)^k - 1 on Lambda.
///   GroupAlgebra: [u] |-> eps(u) u^k on W_K, eps given on (u1, u2).
///   Triple:       (x, y, z) on Lambda_f x W_K x W_K.
struct Weight {
  enum class Kind { Arithmetic, GroupAlgebra, Triple };
  Kind kind = Kind::Arithmetic;
  int k = 1;
  FiniteTwist eps;
  std::vector<Weight> parts;

  static Weight arithmetic(int k) { return Weight{Kind::Arithmetic, k, {}, {}}; }
  static Weight arithmetic(int k, FiniteTwist e) { return Weight{Kind::Arithmetic, k, std::move(e), {}}; }
  static Weight group(int k, FiniteTwist e = {}) { return Weight{Kind::GroupAlgebra, k, std::move(e), {}}; }
  static Weight triple(Weight x, Weight y, Weight z) {
    return Weight{Kind::Triple, x.k, {}, {std::move(x), std::move(y), std::move(z)}};
  }
  bool classical() const { return k >= 2; }
};

/// T-value of an arithmetic weight with trivial twist.
inline PadicElem lambda_point(std::uint32_t p, int N, int k) {
  return PadicElem(p, N, 1 + static_cast<std::int64_t>(p)).pow_signed(k) - PadicElem(p, N, 1);
}

/// T-value of an arithmetic weight with twist, in Z_{p^2}[zeta_{p^m}].
inline CycloPadic lambda_point_twisted(std::uint32_t p, int N, int k, const FiniteTwist& eps) {
  const std::int64_t e = eps.exponents.empty() ? 0 : eps.exponents[0];
  PadicElem base = PadicElem(p, N, 1 + static_cast<std::int64_t>(p)).pow_signed(k);
  CycloPadic z = CycloPadic::zeta_power(base, eps.level, e);
  return z * base - CycloPadic(base.one_like(), eps.level);
}

/// X-value of weight k in Lambda_Col, X = (T - p)/(p^a gamma):
/// X = B gamma^{p-2} with B = (1+p)((1+p)^{k-1} - 1)/p^{a+1}.
inline RampedElem col_point(std::uint32_t p, int N, int a, int k) {
  if (a > 0 && (k - 1) % static_cast<int>(detail::checked_pow(p, a)) != 0)
    throw WeightOutOfRadius("k = " + std::to_string(k) + " is not 1 mod p^" + std::to_string(a));
  const int W = N + a + 1;
  PadicElem onep(p, W, 1 + static_cast<std::int64_t>(p));
  PadicElem A = onep * (onep.pow_signed(k - 1) - onep.one_like());
  PadicElem B = A.divide_by_p(a + 1).with_precision(N);
  return RampedElem::monomial(B, static_cast<int>(p) - 2);
}

/// Evaluate a PadicElem series at a point, certifying precision against the
/// truncation: every dropped monomial has valuation >= the returned bound.
inline PadicElem specialize_at(const LambdaSeries& x, const std::vector<PadicElem>& point) {
  PadicElem v = x.evaluate(point, [](const PadicElem& c) { return c; });
  if (x.exact()) return v;
  const SeriesLayout& L = *x.layout();
  long bound = v.precision();
  int minval = INT_MAX;
  for (std::size_t i = 0; i < L.nvars(); ++i) {
    int vi = point[i].valuation();
    minval = std::min(minval, vi);
    bound = std::min<long>(bound, static_cast<long>(L.caps()[i] + 1) * vi);
  }
  if (L.total_cap() >= 0) bound = std::min<long>(bound, static_cast<long>(L.total_cap() + 1) * minval);
  return v.with_precision(static_cast<int>(std::max<long>(bound, 0)));
}

/// Same for Lambda_Col-type series with a RampedElem point; the bound is
/// measured in powers of gamma and converted per component.
inline RampedElem specialize_at(const ColSeries& x, const std::vector<RampedElem>& point) {
  RampedElem v = x.evaluate(point, [](const RampedElem& c) { return c; });
  if (x.exact()) return v;
  const SeriesLayout& L = *x.layout();
  const long e = static_cast<long>(point[0].prime()) - 1;
  long bound = e * v.precision();
  long minval = LONG_MAX;
  for (std::size_t i = 0; i < L.nvars(); ++i) {
    long vi = point[i].valuation_units(e * v.precision());
    minval = std::min(minval, vi);
    bound = std::min(bound, static_cast<long>(L.caps()[i] + 1) * vi);
  }
  if (L.total_cap() >= 0) bound = std::min(bound, static_cast<long>(L.total_cap() + 1) * minval);
  std::vector<PadicElem> comps = v.components();
  for (std::size_t j = 0; j < comps.size(); ++j) {
    long need = bound - static_cast<long>(j);
    int cert = need <= 0 ? 0 : static_cast<int>((need + e - 1) / e);
    comps[j] = comps[j].with_precision(std::min(cert, comps[j].precision()));
  }
  return RampedElem::from_components(std::move(comps));
}

/// Specialize a one-variable Lambda series at an arithmetic weight with
/// trivial twist.
inline PadicElem specialize(const LambdaSeries& x, const Weight& w) {
  const SeriesLayout& L = *x.layout();
  if (L.kind() != RingKind::Lambda || L.nvars() != 1) throw DomainError("specialize expects a one-variable Lambda series");
  if (!w.eps.trivial()) throw DomainError("twisted weights need specialize_twisted");
  const PadicElem& c0 = x.coefficients()[0];
  return specialize_at(x, {lambda_point(c0.prime(), c0.precision(), w.k)});
}

inline CycloPadic specialize_twisted(const LambdaSeries& x, const Weight& w) {
  const PadicElem& c0 = x.coefficients()[0];
  CycloPadic t = lambda_point_twisted(c0.prime(), c0.precision(), w.k, w.eps);
  return x.evaluate(std::vector<CycloPadic>{t}, [&](const PadicElem& c) { return CycloPadic(c, w.eps.level); });
}

/// Specialize a Lambda_Col series at weight k; requires k = 1 mod p^a.
inline RampedElem specialize(const ColSeries& x, const Weight& w) {
  const SeriesLayout& L = *x.layout();
  if (L.kind() != RingKind::LambdaCol || L.nvars() != 1) throw DomainError("specialize expects a Lambda_Col series");
  const RampedElem& c0 = x.coefficients()[0];
  return specialize_at(x, {col_point(c0.prime(), c0.precision(), L.col_a(), w.k)});
}

/// Layout of the completed tensor product: variables concatenated.
inline LayoutPtr tensor_layout(const std::vector<LayoutPtr>& parts, int total_cap = -1, RingKind kind = RingKind::Generic) {
  std::vector<std::string> vars;
  std::vector<int> caps;
  for (const auto& L : parts) {
    vars.insert(vars.end(), L->variables().begin(), L->variables().end());
    caps.insert(caps.end(), L->caps().begin(), L->caps().end());
  }
  return make_layout(std::move(vars), std::move(caps), total_cap, kind);
}

/// Image of a series under the inclusion of one tensor factor.
template <class C>
IwasawaSeries<C> embed_part(const IwasawaSeries<C>& x, const LayoutPtr& big, std::size_t offset) {
  const SeriesLayout& L = *x.layout();
  IwasawaSeries<C> r(big, x.coefficients()[0]);
  std::vector<int> e(big->nvars(), 0);
  for (std::size_t m = 0; m < L.size(); ++m) {
    const C& c = x.coefficients()[m];
    if (c.is_zero()) continue;
    std::fill(e.begin(), e.end(), 0);
    const auto& em = L.monomial(m);
    for (std::size_t v = 0; v < em.size(); ++v) e[offset + v] = em[v];
    int idx = big->index_of(e);
    if (idx < 0) {
      r.mark_inexact();
      continue;
    }
    r.set_coeff_index(static_cast<std::size_t>(idx), c);
  }
  if (!x.exact()) r.mark_inexact();
  return r;
}

/// a_1 (x) a_2 (x) ... as a series in the concatenated variables.
template <class C>
IwasawaSeries<C> embed_tensor(const std::vector<IwasawaSeries<C>>& parts, int total_cap = -1) {
  if (parts.empty()) throw CapMismatch("embed_tensor of nothing");
  std::vector<LayoutPtr> layouts;
  for (const auto& s : parts) layouts.push_back(s.layout());
  LayoutPtr big = tensor_layout(layouts, total_cap);
  std::size_t offset = 0;
  IwasawaSeries<C> r = IwasawaSeries<C>::constant(big, parts[0].coefficients()[0].one_like());
  for (const auto& s : parts) {
    r = r * embed_part(s, big, offset);
    offset += s.layout()->nvars();
  }
  return r;
}

/// Formal derivative of a one-variable series.
inline LambdaSeries formal_derivative(const LambdaSeries& x) {
  const SeriesLayout& L = *x.layout();
  if (L.nvars() != 1) throw DomainError("formal_derivative expects one variable");
  LambdaSeries r(x.layout(), x.coefficients()[0]);
  for (int n = 1; n <= L.caps()[0]; ++n) {
    const PadicElem& c = x.coeff({n});
    r.set_coeff({n - 1}, c * c.scalar(n));
  }
  if (!x.exact()) r.mark_inexact();
  return r;
}

/// Derivative along a line.
///   KLine: d/dk F((1+p)^k - 1) = log(1+p) (1+p)^k F'((1+p)^k - 1).
///   AtZero: d/dT F at T = 0, i.e. the linear coefficient.
enum class LineKind { KLine, AtZero };

inline PadicElem derivative_at(const LambdaSeries& x, LineKind line, int k = 0) {
  const SeriesLayout& L = *x.layout();
  if (L.nvars() != 1) throw DomainError("derivative_at expects a series restricted to one variable");
  const PadicElem& c0 = x.coefficients()[0];
  if (line == LineKind::AtZero) return L.caps()[0] >= 1 ? x.coeff({1}) : c0.zero_like();
  const std::uint32_t p = c0.prime();
  const int N = c0.precision();
  PadicElem t = lambda_point(p, N, k);
  PadicElem d = formal_derivative(x).evaluate(std::vector<PadicElem>{t}, [](const PadicElem& c) { return c; });
  if (!x.exact()) {
    // dropped terms n c_n t^{n-1}, n > cap: valuation >= (n-1) v(t) - v_p(n)
    long bound = LONG_MAX;
    const int vt = t.valuation();
    for (int n = L.caps()[0] + 1; n <= L.caps()[0] + 64; ++n)
      bound = std::min<long>(bound, static_cast<long>(n - 1) * vt - detail::floor_log(static_cast<std::uint64_t>(n), p));
    if (bound < N) d = d.with_precision(static_cast<int>(std::max<long>(bound, 0)));
  }
  const PadicElem onep = PadicElem(p, d.precision(), 1 + static_cast<std::int64_t>(p));
  return plog(onep) * onep.pow_signed(k) * d;
}

}  // namespace lamfam
