#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lamfam/errors.hpp"

namespace lamfam {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

namespace detail {

inline int euler_phi(int n) {
  int r = n;
  for (int q = 2; q * q <= n; ++q) {
    if (n % q) continue;
    while (n % q == 0) n /= q;
    r -= r / q;
  }
  if (n > 1) r -= r / n;
  return r;
}

inline int moebius(int n) {
  int r = 1;
  for (int q = 2; q * q <= n; ++q) {
    if (n % q) continue;
    n /= q;
    if (n % q == 0) return 0;
    r = -r;
  }
  return n > 1 ? -r : r;
}

/// Coefficients of the n-th cyclotomic polynomial, lowest degree first:
/// prod_{d | n} (x^d - 1)^{mu(n/d)}, multiplying first and dividing after.
inline std::shared_ptr<const std::vector<std::int64_t>> cyclotomic_polynomial(int n) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const std::vector<std::int64_t>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  std::vector<std::int64_t> num{1};
  std::vector<int> dens;
  for (int d = 1; d <= n; ++d) {
    if (n % d) continue;
    const int m = moebius(n / d);
    if (m == 1) {
      std::vector<std::int64_t> r(num.size() + static_cast<std::size_t>(d), 0);
      for (std::size_t i = 0; i < num.size(); ++i) {
        r[i + static_cast<std::size_t>(d)] += num[i];
        r[i] -= num[i];
      }
      num = std::move(r);
    } else if (m == -1) {
      dens.push_back(d);
    }
  }
  for (int d : dens) {
    // divide by x^d - 1: q_i = -(num_i - q_{i-d}) read from the bottom
    const std::size_t dd = static_cast<std::size_t>(d);
    std::vector<std::int64_t> q(num.size() - dd, 0);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = -num[i] + (i >= dd ? q[i - dd] : 0);
    num = std::move(q);
  }
  auto ptr = std::make_shared<const std::vector<std::int64_t>>(std::move(num));
  cache.emplace(n, ptr);
  return ptr;
}

inline std::int64_t floor_mod_cyc(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace detail

/// Element of Q(zeta_n) (or Z[zeta_n] when T is an integer type) on the power
/// basis 1, zeta, ..., zeta^{phi(n)-1}. Equality is exact.
template <class T>
class CycloNumber {
 public:
  CycloNumber() = default;

  explicit CycloNumber(int n, T c = T(0)) : n_(n), phi_(detail::cyclotomic_polynomial(n)) {
    c_.assign(static_cast<std::size_t>(detail::euler_phi(n)), T(0));
    c_[0] = c;
  }

  static CycloNumber zeta_power(int n, std::int64_t e) {
    std::vector<T> big(static_cast<std::size_t>(n), T(0));
    big[static_cast<std::size_t>(detail::floor_mod_cyc(e, n))] = T(1);
    return from_exponent_counts(n, big);
  }

  /// sum_e counts[e] zeta^e for e = 0..n-1.
  static CycloNumber from_exponent_counts(int n, std::vector<T> counts) {
    CycloNumber r(n);
    r.c_ = reduce(std::move(counts), *r.phi_);
    return r;
  }

  int order() const { return n_; }
  CycloNumber zero_like() const { return CycloNumber(n_); }
  CycloNumber one_like() const { return CycloNumber(n_, T(1)); }
  const std::vector<T>& coeffs() const { return c_; }

  bool is_zero() const {
    for (const auto& x : c_)
      if (x != T(0)) return false;
    return true;
  }
  bool is_scalar() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (c_[i] != T(0)) return false;
    return true;
  }
  const T& scalar_part() const { return c_.at(0); }

  CycloNumber operator-() const {
    CycloNumber r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend CycloNumber operator+(const CycloNumber& a, const CycloNumber& b) {
    check(a, b);
    CycloNumber r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
    return r;
  }
  friend CycloNumber operator-(const CycloNumber& a, const CycloNumber& b) { return a + (-b); }
  friend CycloNumber operator*(const CycloNumber& a, const CycloNumber& b) {
    check(a, b);
    std::vector<T> big(2 * a.c_.size(), T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == T(0)) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) big[i + j] += a.c_[i] * b.c_[j];
    }
    CycloNumber r = a;
    r.c_ = reduce(std::move(big), *a.phi_);
    return r;
  }
  friend CycloNumber operator*(const CycloNumber& a, const T& s) {
    CycloNumber r = a;
    for (auto& x : r.c_) x *= s;
    return r;
  }
  CycloNumber& operator+=(const CycloNumber& b) { return *this = *this + b; }
  CycloNumber& operator-=(const CycloNumber& b) { return *this = *this - b; }
  CycloNumber& operator*=(const CycloNumber& b) { return *this = *this * b; }

  friend bool operator==(const CycloNumber& a, const CycloNumber& b) { return a.n_ == b.n_ && a.c_ == b.c_; }
  friend bool operator!=(const CycloNumber& a, const CycloNumber& b) { return !(a == b); }

  /// Complex conjugation zeta -> zeta^{-1}.
  CycloNumber conj() const {
    std::vector<T> big(static_cast<std::size_t>(n_), T(0));
    for (std::size_t i = 0; i < c_.size(); ++i) big[static_cast<std::size_t>(detail::floor_mod_cyc(-static_cast<std::int64_t>(i), n_))] += c_[i];
    return from_exponent_counts(n_, std::move(big));
  }

  /// Galois action zeta -> zeta^a, gcd(a, n) = 1.
  CycloNumber galois(std::int64_t a) const {
    if (std::gcd(detail::floor_mod_cyc(a, n_), static_cast<std::int64_t>(n_)) != 1) throw DomainError("Galois exponent not prime to the order");
    std::vector<T> big(static_cast<std::size_t>(n_), T(0));
    for (std::size_t i = 0; i < c_.size(); ++i)
      big[static_cast<std::size_t>(detail::floor_mod_cyc(a * static_cast<std::int64_t>(i), n_))] += c_[i];
    return from_exponent_counts(n_, std::move(big));
  }

  /// Image in Q(zeta_m) for n | m.
  CycloNumber lift(int m) const {
    if (m % n_ != 0) throw DomainError("cannot lift Q(zeta_" + std::to_string(n_) + ") to Q(zeta_" + std::to_string(m) + ")");
    std::vector<T> big(static_cast<std::size_t>(m), T(0));
    const std::int64_t step = m / n_;
    for (std::size_t i = 0; i < c_.size(); ++i) big[static_cast<std::size_t>(static_cast<std::int64_t>(i) * step % m)] += c_[i];
    return CycloNumber<T>::from_exponent_counts(m, std::move(big));
  }

  /// Value under zeta -> exp(2 pi i / n); for display and sanity checks only.
  std::complex<double> complex_value() const {
    std::complex<double> s = 0;
    const double tau = 6.283185307179586476925286766559;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == T(0)) continue;
      s += static_cast<double>(c_[i]) * std::polar(1.0, tau * static_cast<double>(i) / n_);
    }
    return s;
  }

  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == T(0)) continue;
      if (!first) os << " + ";
      first = false;
      os << "(" << c_[i] << ")";
      if (i > 0) os << "*z" << n_ << "^" << i;
    }
    if (first) os << "0";
    return os.str();
  }

 private:
  static void check(const CycloNumber& a, const CycloNumber& b) {
    if (a.n_ != b.n_) throw DomainError("mixing cyclotomic fields of order " + std::to_string(a.n_) + " and " + std::to_string(b.n_));
  }

  static std::vector<T> reduce(std::vector<T> big, const std::vector<std::int64_t>& phi) {
    const std::size_t deg = phi.size() - 1;
    for (std::size_t i = big.size(); i-- > deg;) {
      if (big[i] == T(0)) continue;
      const T c = big[i];
      for (std::size_t j = 0; j <= deg; ++j)
        if (phi[j] != 0) big[i - deg + j] -= c * T(phi[j]);
    }
    big.resize(deg, T(0));
    return big;
  }

  int n_ = 1;
  std::shared_ptr<const std::vector<std::int64_t>> phi_;
  std::vector<T> c_;
};

using CycloInt = CycloNumber<std::int64_t>;
using CycloRational = CycloNumber<Rational>;

template <class T>
CycloRational to_rational(const CycloNumber<T>& x) {
  std::vector<Rational> big(static_cast<std::size_t>(x.order()), Rational(0));
  for (std::size_t i = 0; i < x.coeffs().size(); ++i) big[i] = Rational(x.coeffs()[i]);
  return CycloRational::from_exponent_counts(x.order(), std::move(big));
}

}  // namespace lamfam
