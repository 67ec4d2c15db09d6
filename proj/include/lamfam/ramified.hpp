#pragma once

#include <string>
#include <vector>

#include "lamfam/padic.hpp"

namespace lamfam {

/// Element of Z_{p^2}[gamma] with gamma^{p-1} = p, stored on gamma^0..gamma^{p-2}.
class RampedElem {
 public:
  RampedElem() = default;

  explicit RampedElem(const PadicElem& base) : comps_(base.prime() - 1, base.zero_like()) { comps_[0] = base; }

  /// gamma^j times c.
  static RampedElem monomial(const PadicElem& c, int j) {
    const int e = static_cast<int>(c.prime()) - 1;
    RampedElem r(c.zero_like());
    r.comps_[static_cast<std::size_t>(j % e)] = c.times_p(j / e);
    return r;
  }

  static RampedElem from_components(std::vector<PadicElem> comps) {
    if (comps.empty() || comps.size() + 1 != comps[0].prime()) throw DomainError("RampedElem needs p-1 components");
    RampedElem r;
    r.comps_ = std::move(comps);
    return r;
  }

  bool is_null() const { return comps_.empty(); }
  std::uint32_t prime() const { return comps_.empty() ? 0 : comps_[0].prime(); }
  const std::vector<PadicElem>& components() const { return comps_; }
  const PadicElem& component(int j) const { return comps_.at(static_cast<std::size_t>(j)); }

  int precision() const {
    int n = comps_.empty() ? 0 : comps_[0].precision();
    for (const auto& c : comps_) n = std::min(n, c.precision());
    return n;
  }

  RampedElem zero_like() const { return RampedElem(comps_.at(0).zero_like()); }
  RampedElem one_like() const { return RampedElem(comps_.at(0).one_like()); }
  bool is_zero() const {
    for (const auto& c : comps_)
      if (!c.is_zero()) return false;
    return true;
  }

  /// True when all gamma-components beyond the constant one vanish.
  bool is_unramified() const {
    for (std::size_t j = 1; j < comps_.size(); ++j)
      if (!comps_[j].is_zero()) return false;
    return true;
  }

  PadicElem to_unramified() const {
    if (!is_unramified()) throw DomainError("RampedElem has nonzero gamma-components");
    return comps_.at(0);
  }

  /// Valuation measured in units of v(gamma) = 1/(p-1); returns limit if zero.
  long valuation_units(long limit) const {
    const long e = static_cast<long>(prime()) - 1;
    long v = limit;
    for (std::size_t j = 0; j < comps_.size(); ++j)
      if (!comps_[j].is_zero()) v = std::min(v, e * comps_[j].valuation() + static_cast<long>(j));
    return v;
  }

  RampedElem operator-() const {
    RampedElem r = *this;
    for (auto& c : r.comps_) c = -c;
    return r;
  }
  friend RampedElem operator+(const RampedElem& x, const RampedElem& y) {
    if (x.is_null()) return y;
    if (y.is_null()) return x;
    RampedElem r = x;
    for (std::size_t j = 0; j < r.comps_.size(); ++j) r.comps_[j] += y.comps_.at(j);
    return r;
  }
  friend RampedElem operator-(const RampedElem& x, const RampedElem& y) { return x + (-y); }
  friend RampedElem operator*(const RampedElem& x, const RampedElem& y) {
    if (x.is_null()) return y.zero_like();
    if (y.is_null()) return x.zero_like();
    const std::size_t e = x.comps_.size();
    RampedElem r = x.zero_like();
    for (std::size_t i = 0; i < e; ++i) {
      if (x.comps_[i].is_zero()) continue;
      for (std::size_t j = 0; j < e; ++j) {
        if (y.comps_[j].is_zero()) continue;
        PadicElem t = x.comps_[i] * y.comps_[j];
        if (i + j >= e) r.comps_[i + j - e] += t.times_p(1);
        else r.comps_[i + j] += t;
      }
    }
    return r;
  }
  friend RampedElem operator*(const RampedElem& x, const PadicElem& c) {
    RampedElem r = x;
    for (auto& v : r.comps_) v *= c;
    return r;
  }
  RampedElem& operator+=(const RampedElem& y) { return *this = *this + y; }
  RampedElem& operator-=(const RampedElem& y) { return *this = *this - y; }
  RampedElem& operator*=(const RampedElem& y) { return *this = *this * y; }

  friend bool operator==(const RampedElem& x, const RampedElem& y) {
    if (x.is_null() || y.is_null()) return (x.is_null() || x.is_zero()) && (y.is_null() || y.is_zero());
    for (std::size_t j = 0; j < x.comps_.size(); ++j)
      if (x.comps_[j] != y.comps_.at(j)) return false;
    return true;
  }
  friend bool operator!=(const RampedElem& x, const RampedElem& y) { return !(x == y); }

  RampedElem with_precision(int n) const {
    RampedElem r = *this;
    for (auto& c : r.comps_) c = c.with_precision(std::min(n, c.precision()));
    return r;
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t j = 0; j < comps_.size(); ++j) s += (j ? ", " : "") + comps_[j].to_string();
    return s + "]";
  }

 private:
  std::vector<PadicElem> comps_;
};

/// Coefficients c_n = C(s, n) (p^a gamma)^n for n = 0..D, given s' = p^a s.
/// Each c_n is a single gamma-monomial with integral coefficient.
inline std::vector<RampedElem> binom_series(const PadicElem& s_scaled, int a, int D) {
  const std::uint32_t p = s_scaled.prime();
  const int e = static_cast<int>(p) - 1;
  const PadicElem step = PadicElem(p, s_scaled.precision(), 1).times_p(a).with_precision(s_scaled.precision());
  std::vector<RampedElem> out;
  out.reserve(static_cast<std::size_t>(D) + 1);
  PadicElem prod = s_scaled.one_like();
  std::uint64_t unit_fact = 1;
  int vfact = 0;
  for (int n = 0; n <= D; ++n) {
    if (n > 0) {
      prod *= s_scaled - step.scalar(n - 1) * step;
      std::uint64_t m = static_cast<std::uint64_t>(n);
      while (m % p == 0) {
        m /= p;
        ++vfact;
      }
      unit_fact = detail::mulmod(unit_fact, m, prod.modulus());
    }
    // v_p(n!) <= floor(n/(p-1)), so b_n = prod p^{floor(n/e) - v_p(n!)} / unit is integral.
    PadicElem b = prod.times_p(n / e - vfact).with_precision(s_scaled.precision());
    b *= PadicElem::from_residues(p, b.precision(), unit_fact % b.modulus(), 0).inverse();
    out.push_back(RampedElem::monomial(b, n % e));
  }
  return out;
}

/// Result of evaluating a truncated series together with its certificate.
struct CertifiedValue {
  PadicElem value;
  int certified_precision;
};

/// sum_{n <= D} C(s, n) t^n at t = (1+p)^k - 1 with p^a | k, s' = p^a s.
/// The tail beyond D has valuation >= (D+1) - floor((D+1)/(p-1)).
inline CertifiedValue binom_eval(const PadicElem& s_scaled, int a, int D, std::int64_t k, int requested) {
  const std::uint32_t p = s_scaled.prime();
  const int e = static_cast<int>(p) - 1;
  if (k < 0) throw DomainError("binom_eval expects k >= 0");
  if (a > 0 && detail::vp(static_cast<std::uint64_t>(k), p, 64) < a) throw WeightOutOfRadius("p^a does not divide k");
  const int tail = (D + 1) - (D + 1) / e;
  const int P = s_scaled.precision();
  const int W = P + a + 1;
  PadicElem t = PadicElem(p, W, 1 + static_cast<std::int64_t>(p)).pow(static_cast<std::uint64_t>(k)) - PadicElem(p, W, 1);
  // z = t / p^{a+1} is integral since p^a | k.
  PadicElem z = t.divide_by_p(a + 1);
  auto coeffs = binom_series(s_scaled, a, D);
  PadicElem sum = s_scaled.zero_like(), zpow = z.one_like();
  for (int n = 0; n <= D; ++n) {
    if (n > 0) zpow *= z;
    const RampedElem& c = coeffs[static_cast<std::size_t>(n)];
    // c_n = b_n gamma^{n mod e}; the term is b_n z^n p^{n - floor(n/e)}.
    const int shift = n - n / e;
    if (shift >= P) continue;
    sum += c.component(n % e) * zpow.with_precision(P - shift).times_p(shift);
  }
  const int cert = std::min(P, tail);
  if (cert < requested) throw PrecisionLoss("cap D=" + std::to_string(D) + " certifies only " + std::to_string(cert) + " digits");
  return {sum.with_precision(cert), cert};
}

}  // namespace lamfam
