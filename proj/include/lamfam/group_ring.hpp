#pragma once

#include <map>
#include <string>
#include <vector>

#include "lamfam/cyclo_padic.hpp"
#include "lamfam/padic.hpp"
#include "lamfam/series.hpp"

namespace lamfam {

/// Z_p-coordinates on W_K = 1 + pZ_{p^2} (rank 2, basis u1 = 1+p, u2 = 1+p delta)
/// or on 1 + pZ_p (rank 1, basis 1+p), obtained from plog.
class UnitCoordinates {
 public:
  /// Coordinates are produced to precision N + extra; units passed to
  /// coords() must carry precision >= input_precision().
  UnitCoordinates(std::uint32_t p, int N, int rank, int extra = 0)
      : p_(p), rank_(rank), cprec_(N + extra) {
    if (rank != 1 && rank != 2) throw DomainError("unit coordinates of rank 1 or 2 only");
    const int W = cprec_ + 2;
    l1_ = plog(PadicElem(p, W, 1 + static_cast<std::int64_t>(p)));
    if (rank == 2) l2_ = plog(PadicElem(p, W, 1, p));
  }

  std::uint32_t prime() const { return p_; }
  int rank() const { return rank_; }
  int coord_precision() const { return cprec_; }
  int input_precision() const { return cprec_ + 2; }

  /// log of the i-th basis element, at precision coord_precision() + 2.
  const PadicElem& basis_log(int i) const { return i == 0 ? l1_ : l2_; }

  std::vector<PadicElem> coords(const PadicElem& u) const {
    if (u.precision() < input_precision())
      throw PrecisionLoss("unit known to " + std::to_string(u.precision()) + " digits, need " + std::to_string(input_precision()));
    PadicElem L = plog(u.with_precision(input_precision()));
    if (rank_ == 1) {
      if (!L.in_zp()) throw DomainError("unit not in 1 + pZ_p");
      return {(L.divide_by_p(1) * l1_.divide_by_p(1).inverse()).with_precision(cprec_)};
    }
    PadicElem A = PadicElem::from_residues(p_, L.precision(), L.c0(), 0);
    PadicElem B = PadicElem::from_residues(p_, L.precision(), L.c1(), 0);
    PadicElem x2 = PadicElem::from_residues(p_, l2_.precision(), l2_.c0(), 0);
    PadicElem y2 = PadicElem::from_residues(p_, l2_.precision(), l2_.c1(), 0);
    PadicElem c2 = B.divide_by_p(1) * y2.divide_by_p(1).inverse();
    PadicElem c1 = (A - c2 * x2).divide_by_p(1) * l1_.divide_by_p(1).inverse();
    return {c1.with_precision(cprec_), c2.with_precision(cprec_)};
  }

  /// u1^{c1} u2^{c2}.
  PadicElem element(const std::vector<PadicElem>& c) const {
    PadicElem s = c.at(0) * l1_;
    if (rank_ == 2) s += c.at(1) * l2_;
    return pexp(s);
  }

 private:
  std::uint32_t p_;
  int rank_;
  int cprec_;
  PadicElem l1_, l2_;
};

/// Continuous character of Z_p^r: [c] |-> zeta^{sum e_i c_i} exp(sum c_i L_i),
/// with L_i in pZ_{p^2} and zeta a primitive p^level-th root of unity.
struct CoordinateCharacter {
  std::vector<PadicElem> logs;
  FiniteTwist twist;

  std::size_t rank() const { return logs.size(); }

  static CoordinateCharacter concat(const std::vector<CoordinateCharacter>& parts) {
    CoordinateCharacter r;
    for (const auto& c : parts) {
      r.logs.insert(r.logs.end(), c.logs.begin(), c.logs.end());
      if (!c.twist.trivial()) {
        if (r.twist.level != 0 && r.twist.level != c.twist.level) throw DomainError("mixed twist levels");
        r.twist.level = c.twist.level;
      }
    }
    for (const auto& c : parts) {
      std::vector<std::int64_t> e = c.twist.exponents;
      e.resize(c.logs.size(), 0);
      r.twist.exponents.insert(r.twist.exponents.end(), e.begin(), e.end());
    }
    return r;
  }
};

/// [u] |-> eps(u) u^k on the group with coordinates uc.
inline CoordinateCharacter weight_character(const Weight& w, const UnitCoordinates& uc) {
  if (w.kind == Weight::Kind::Triple) throw DomainError("use triple_character for composite weights");
  CoordinateCharacter c;
  const PadicElem kk = uc.basis_log(0).scalar(w.k);
  for (int i = 0; i < uc.rank(); ++i) c.logs.push_back(uc.basis_log(i) * kk);
  c.twist = w.eps;
  c.twist.exponents.resize(static_cast<std::size_t>(uc.rank()), 0);
  return c;
}

/// Finite formal sum of group elements of Z_p^r (in coordinates, kept modulo
/// p^cprec) with Z_{p^2} coefficients: an exact model of the group algebra.
class GroupRingElem {
 public:
  using Key = std::vector<std::uint64_t>;

  GroupRingElem() = default;
  GroupRingElem(std::uint32_t p, int rank, int cprec, PadicElem zero) : p_(p), rank_(rank), cprec_(cprec), zero_(zero.zero_like()) {
    mod_ = detail::checked_pow(p, cprec);
  }

  static GroupRingElem group_like(const std::vector<PadicElem>& coords, const PadicElem& coef) {
    GroupRingElem r(coef.prime(), static_cast<int>(coords.size()), coords.at(0).precision(), coef);
    Key k;
    for (const auto& c : coords) {
      if (!c.in_zp()) throw DomainError("group coordinates must lie in Z_p");
      k.push_back(c.with_precision(r.cprec_).c0());
    }
    r.add_term(k, coef);
    return r;
  }

  bool is_null() const { return p_ == 0; }
  std::uint32_t prime() const { return p_; }
  int rank() const { return rank_; }
  int coord_precision() const { return cprec_; }
  const std::map<Key, PadicElem>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  GroupRingElem zero_like() const { return GroupRingElem(p_, rank_, cprec_, zero_); }
  GroupRingElem one_like() const {
    GroupRingElem r = zero_like();
    r.add_term(Key(static_cast<std::size_t>(rank_), 0), zero_.one_like());
    return r;
  }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Key& k, const PadicElem& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_.emplace(k, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  GroupRingElem operator-() const {
    GroupRingElem r = *this;
    for (auto& [k, c] : r.terms_) c = -c;
    return r;
  }
  friend GroupRingElem operator+(const GroupRingElem& a, const GroupRingElem& b) {
    if (a.is_null()) return b;
    if (b.is_null()) return a;
    check(a, b);
    GroupRingElem r = a;
    for (const auto& [k, c] : b.terms_) r.add_term(k, c);
    return r;
  }
  friend GroupRingElem operator-(const GroupRingElem& a, const GroupRingElem& b) { return a + (-b); }
  friend GroupRingElem operator*(const GroupRingElem& a, const GroupRingElem& b) {
    if (a.is_null()) return b.zero_like();
    if (b.is_null()) return a.zero_like();
    check(a, b);
    GroupRingElem r = a.zero_like();
    Key k(static_cast<std::size_t>(a.rank_));
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) {
        for (std::size_t i = 0; i < k.size(); ++i) k[i] = detail::addmod(ka[i], kb[i], a.mod_);
        r.add_term(k, ca * cb);
      }
    return r;
  }
  friend GroupRingElem operator*(const GroupRingElem& a, const PadicElem& s) {
    GroupRingElem r = a.zero_like();
    for (const auto& [k, c] : a.terms_) r.add_term(k, c * s);
    return r;
  }
  GroupRingElem& operator+=(const GroupRingElem& b) { return *this = *this + b; }

  friend bool operator==(const GroupRingElem& a, const GroupRingElem& b) {
    if (a.is_null() || b.is_null()) return (a.is_null() || a.is_zero()) && (b.is_null() || b.is_zero());
    GroupRingElem d = a - b;
    return d.is_zero();
  }
  friend bool operator!=(const GroupRingElem& a, const GroupRingElem& b) { return !(a == b); }

  /// Element of the group algebra of the product group.
  static GroupRingElem tensor(const GroupRingElem& a, const GroupRingElem& b) {
    if (a.p_ != b.p_ || a.cprec_ != b.cprec_) throw CapMismatch("tensor of incompatible group rings");
    GroupRingElem r(a.p_, a.rank_ + b.rank_, a.cprec_, a.zero_);
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) {
        Key k = ka;
        k.insert(k.end(), kb.begin(), kb.end());
        r.add_term(k, ca * cb);
      }
    return r;
  }

  /// Specialization along a character with trivial finite part.
  PadicElem specialize(const CoordinateCharacter& w) const {
    if (!w.twist.trivial()) throw DomainError("twisted specialization needs specialize_twisted");
    if (static_cast<int>(w.rank()) != rank_) throw CapMismatch("character rank differs from group rank");
    PadicElem sum = zero_;
    for (const auto& [k, c] : terms_) sum += c * pexp(exponent(k, w));
    return sum;
  }

  CycloPadic specialize_twisted(const CoordinateCharacter& w) const {
    if (static_cast<int>(w.rank()) != rank_) throw CapMismatch("character rank differs from group rank");
    const int m = w.twist.level;
    const std::uint64_t order = m == 0 ? 1 : detail::checked_pow(p_, m);
    if (m > cprec_) throw PrecisionLoss("twist level exceeds coordinate precision");
    CycloPadic sum(zero_, m);
    for (const auto& [k, c] : terms_) {
      std::uint64_t e = 0;
      for (std::size_t i = 0; i < k.size(); ++i) {
        std::int64_t ei = i < w.twist.exponents.size() ? w.twist.exponents[i] : 0;
        std::uint64_t eim = static_cast<std::uint64_t>(((ei % static_cast<std::int64_t>(order)) + static_cast<std::int64_t>(order)) % static_cast<std::int64_t>(order));
        e = (e + detail::mulmod(k[i] % order, eim, order)) % order;
      }
      PadicElem val = c * pexp(exponent(k, w));
      sum += CycloPadic::zeta_power(val, m, static_cast<std::int64_t>(e)) * val;
    }
    return sum;
  }

  /// Image in the power series ring: [c] |-> prod_i (1 + S_i)^{c_i}.
  LambdaSeries to_series(const LayoutPtr& layout) const {
    if (static_cast<int>(layout->nvars()) != rank_) throw CapMismatch("layout rank differs from group rank");
    LambdaSeries s(layout, zero_);
    s.mark_inexact();
    const auto& caps = layout->caps();
    for (const auto& [k, c] : terms_) {
      std::vector<std::vector<PadicElem>> binoms(static_cast<std::size_t>(rank_));
      for (int i = 0; i < rank_; ++i) binoms[static_cast<std::size_t>(i)] = binomials(k[static_cast<std::size_t>(i)], caps[static_cast<std::size_t>(i)]);
      for (std::size_t m = 0; m < layout->size(); ++m) {
        const auto& e = layout->monomial(m);
        PadicElem t = c;
        for (int i = 0; i < rank_; ++i) t *= binoms[static_cast<std::size_t>(i)][static_cast<std::size_t>(e[static_cast<std::size_t>(i)])];
        s.set_coeff_index(m, s.coefficients()[m] + t);
      }
    }
    return s;
  }

 private:
  static void check(const GroupRingElem& a, const GroupRingElem& b) {
    if (a.p_ != b.p_ || a.rank_ != b.rank_ || a.cprec_ != b.cprec_) throw CapMismatch("incompatible group rings");
  }

  PadicElem exponent(const Key& k, const CoordinateCharacter& w) const {
    PadicElem s = w.logs.at(0).zero_like();
    for (std::size_t i = 0; i < k.size(); ++i)
      s += PadicElem::from_residues(p_, cprec_, k[i], 0) * w.logs[i];
    return s;
  }

  /// C(c, n) for n <= D with c in Z_p known mod p^cprec.
  std::vector<PadicElem> binomials(std::uint64_t c, int D) const {
    std::vector<PadicElem> out;
    PadicElem cc = PadicElem::from_residues(p_, cprec_, c, 0);
    PadicElem prod = cc.one_like();
    std::uint64_t unit = 1;
    int v = 0;
    const int target = zero_.precision();
    for (int n = 0; n <= D; ++n) {
      if (n > 0) {
        prod *= cc - cc.scalar(n - 1);
        std::uint64_t m = static_cast<std::uint64_t>(n);
        while (m % p_ == 0) {
          m /= p_;
          ++v;
        }
        unit = detail::mulmod(unit, m, mod_);
      }
      PadicElem b = prod.divide_by_p(v) * PadicElem::from_residues(p_, cprec_ - v, unit, 0).inverse();
      if (b.precision() < target) throw PrecisionLoss("group coordinates too coarse for degree " + std::to_string(D));
      out.push_back(b.with_precision(target));
    }
    return out;
  }

  std::uint32_t p_ = 0;
  int rank_ = 0;
  int cprec_ = 0;
  std::uint64_t mod_ = 1;
  PadicElem zero_;
  std::map<Key, PadicElem> terms_;
};

/// Number of extra coordinate digits needed to expand group elements to
/// series of degree D without losing precision.
inline int coordinate_extra_digits(std::uint32_t p, int D) { return 2 + detail::vp_factorial(static_cast<std::uint64_t>(D), p); }

}  // namespace lamfam
