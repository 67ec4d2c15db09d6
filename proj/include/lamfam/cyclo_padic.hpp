#pragma once

#include <string>
#include <vector>

#include "lamfam/padic.hpp"

namespace lamfam {

/// Z_{p^2}[zeta] with zeta a primitive p^m-th root of unity, stored on the
/// power basis 1, zeta, ..., zeta^{phi(p^m)-1}. Used for finite-order twists
/// of weights; m = 0 degenerates to Z_{p^2}.
class CycloPadic {
 public:
  CycloPadic() = default;

  CycloPadic(const PadicElem& c, int level) : level_(level) {
    coeffs_.assign(degree_for(c.prime(), level), c.zero_like());
    coeffs_[0] = c;
  }

  /// zeta^e.
  static CycloPadic zeta_power(const PadicElem& shape, int level, std::int64_t e) {
    CycloPadic r(shape.zero_like(), level);
    if (level == 0) {
      r.coeffs_[0] = shape.one_like();
      return r;
    }
    const std::int64_t order = static_cast<std::int64_t>(detail::checked_pow(shape.prime(), level));
    std::int64_t k = ((e % order) + order) % order;
    std::vector<PadicElem> big(static_cast<std::size_t>(order), shape.zero_like());
    big[static_cast<std::size_t>(k)] = shape.one_like();
    r.coeffs_ = reduce(big, shape.prime(), level);
    return r;
  }

  bool is_null() const { return coeffs_.empty(); }
  int level() const { return level_; }
  const std::vector<PadicElem>& coeffs() const { return coeffs_; }

  CycloPadic zero_like() const { return CycloPadic(coeffs_.at(0).zero_like(), level_); }
  CycloPadic one_like() const { return CycloPadic(coeffs_.at(0).one_like(), level_); }
  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (!c.is_zero()) return false;
    return true;
  }

  bool is_scalar() const {
    for (std::size_t i = 1; i < coeffs_.size(); ++i)
      if (!coeffs_[i].is_zero()) return false;
    return true;
  }

  CycloPadic operator-() const {
    CycloPadic r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }
  friend CycloPadic operator+(const CycloPadic& x, const CycloPadic& y) {
    if (x.is_null()) return y;
    if (y.is_null()) return x;
    check(x, y);
    CycloPadic r = x;
    for (std::size_t i = 0; i < r.coeffs_.size(); ++i) r.coeffs_[i] += y.coeffs_[i];
    return r;
  }
  friend CycloPadic operator-(const CycloPadic& x, const CycloPadic& y) { return x + (-y); }
  friend CycloPadic operator*(const CycloPadic& x, const CycloPadic& y) {
    if (x.is_null()) return y.zero_like();
    if (y.is_null()) return x.zero_like();
    check(x, y);
    const std::size_t n = x.coeffs_.size();
    std::vector<PadicElem> big(2 * n, x.coeffs_[0].zero_like());
    for (std::size_t i = 0; i < n; ++i) {
      if (x.coeffs_[i].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) big[i + j] += x.coeffs_[i] * y.coeffs_[j];
    }
    CycloPadic r;
    r.level_ = x.level_;
    r.coeffs_ = reduce(big, x.coeffs_[0].prime(), x.level_);
    return r;
  }
  friend CycloPadic operator*(const CycloPadic& x, const PadicElem& c) {
    CycloPadic r = x;
    for (auto& v : r.coeffs_) v *= c;
    return r;
  }
  CycloPadic& operator+=(const CycloPadic& y) { return *this = *this + y; }
  CycloPadic& operator*=(const CycloPadic& y) { return *this = *this * y; }

  friend bool operator==(const CycloPadic& x, const CycloPadic& y) {
    if (x.is_null() || y.is_null()) return (x.is_null() || x.is_zero()) && (y.is_null() || y.is_zero());
    check(x, y);
    for (std::size_t i = 0; i < x.coeffs_.size(); ++i)
      if (x.coeffs_[i] != y.coeffs_[i]) return false;
    return true;
  }
  friend bool operator!=(const CycloPadic& x, const CycloPadic& y) { return !(x == y); }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < coeffs_.size(); ++i) s += (i ? ", " : "") + coeffs_[i].to_string();
    return s + "}";
  }

 private:
  static std::size_t degree_for(std::uint32_t p, int level) {
    return level == 0 ? 1 : static_cast<std::size_t>(detail::checked_pow(p, level - 1) * (p - 1));
  }

  static void check(const CycloPadic& x, const CycloPadic& y) {
    if (x.level_ != y.level_) throw DomainError("mixing cyclotomic levels");
  }

  /// Reduce a polynomial modulo Phi_{p^m}(x) = sum_{i<p} x^{i p^{m-1}}.
  static std::vector<PadicElem> reduce(std::vector<PadicElem> big, std::uint32_t p, int level) {
    const std::size_t deg = degree_for(p, level);
    if (level == 0) {
      PadicElem s = big[0].zero_like();
      for (const auto& c : big) s += c;
      return {s};
    }
    const std::size_t step = static_cast<std::size_t>(detail::checked_pow(p, level - 1));
    // x^{j} for j >= deg: x^{deg} = -sum_{i<p-1} x^{i*step}
    for (std::size_t j = big.size(); j-- > deg;) {
      if (big[j].is_zero()) continue;
      PadicElem c = big[j];
      big[j] = c.zero_like();
      const std::size_t shift = j - deg;
      for (std::size_t i = 0; i + 1 < p; ++i) big[shift + i * step] -= c;
    }
    big.resize(deg);
    return big;
  }

  int level_ = 0;
  std::vector<PadicElem> coeffs_;
};

}  // namespace lamfam
