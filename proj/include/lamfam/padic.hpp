#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lamfam/errors.hpp"

namespace lamfam {

namespace detail {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

/// Residues are kept below 2^62 so that a sum of two never overflows.
constexpr u64 kModulusLimit = u64{1} << 62;

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline u64 checked_pow(u64 p, int n) {
  u64 r = 1;
  for (int i = 0; i < n; ++i) {
    if (r > kModulusLimit / p) throw PrecisionLoss("p^" + std::to_string(n) + " exceeds 62 bits");
    r *= p;
  }
  return r;
}

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>((u128)a * b % m); }

inline u64 addmod(u64 a, u64 b, u64 m) {
  u64 s = a + b;
  return s >= m ? s - m : s;
}

inline u64 submod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + m - b; }

inline u64 reduce_signed(i64 v, u64 m) {
  i64 r = v % static_cast<i64>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

inline i64 floor_mod_i64(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline u64 powmod(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

/// Inverse of a modulo m; a must be coprime to m.
inline u64 invmod(u64 a, u64 m) {
  __int128 t = 0, nt = 1, r = m, nr = a % m;
  while (nr != 0) {
    __int128 q = r / nr;
    __int128 tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1) throw NonUnit("residue not invertible");
  if (t < 0) t += m;
  return static_cast<u64>(t);
}

/// v_p(n) for n > 0; returns cap when n == 0.
inline int vp(u64 n, u64 p, int cap) {
  if (n == 0) return cap;
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return std::min(v, cap);
}

inline int vp_factorial(u64 n, u64 p) {
  int v = 0;
  while (n) {
    n /= p;
    v += static_cast<int>(n);
  }
  return v;
}

/// Largest e with p^e <= n (n >= 1).
inline int floor_log(u64 n, u64 p) {
  int e = 0;
  u64 q = 1;
  while (q <= n / p) {
    q *= p;
    ++e;
  }
  return e;
}

inline std::uint32_t smallest_nonresidue(std::uint32_t p) {
  for (std::uint32_t d = 2; d < p; ++d)
    if (powmod(d, (p - 1) / 2, p) == p - 1) return d;
  throw DomainError("no quadratic non-residue mod " + std::to_string(p));
}

}  // namespace detail

/// Element of Z_{p^2} = Z_p[delta]/(delta^2 - d) modulo p^N, where d is the
/// smallest positive non-residue mod p. Elements of Z_p have c1() == 0.
///
/// A default-constructed element is a null placeholder: it acts as 0 in
/// additions and is replaced by the other operand's ring on first use.
class PadicElem {
 public:
  using u64 = detail::u64;
  using i64 = detail::i64;

  PadicElem() = default;

  PadicElem(std::uint32_t p, int precision, i64 a0 = 0, i64 a1 = 0) : p_(p), prec_(precision) {
    if (p < 3 || !detail::is_prime(p)) throw DomainError("p must be an odd prime, got " + std::to_string(p));
    if (precision < 0) throw PrecisionLoss("negative precision");
    d_ = detail::smallest_nonresidue(p);
    mod_ = detail::checked_pow(p, precision);
    a0_ = detail::reduce_signed(a0, mod_);
    a1_ = detail::reduce_signed(a1, mod_);
  }

  /// num/den with den prime to p.
  static PadicElem from_rational(std::uint32_t p, int precision, i64 num, i64 den) {
    PadicElem n(p, precision, num);
    PadicElem d(p, precision, den);
    return n * d.inverse();
  }

  static PadicElem from_residues(std::uint32_t p, int precision, u64 r0, u64 r1) {
    PadicElem x(p, precision);
    x.a0_ = r0 % x.mod_;
    x.a1_ = r1 % x.mod_;
    return x;
  }

  /// Little-endian base-p digits, each list of length <= precision.
  static PadicElem from_digits(std::uint32_t p, int precision, const std::vector<std::uint32_t>& d0,
                               const std::vector<std::uint32_t>& d1) {
    auto value = [&](const std::vector<std::uint32_t>& ds) {
      if (static_cast<int>(ds.size()) > precision) throw DomainError("more digits than precision");
      u64 v = 0;
      for (std::size_t i = ds.size(); i-- > 0;) {
        if (ds[i] >= p) throw DomainError("digit out of range");
        v = v * p + ds[i];
      }
      return v;
    };
    return from_residues(p, precision, value(d0), value(d1));
  }

  bool is_null() const { return p_ == 0; }
  std::uint32_t prime() const { return p_; }
  std::uint32_t delta_square() const { return d_; }
  int precision() const { return prec_; }
  u64 modulus() const { return mod_; }
  u64 c0() const { return a0_; }
  u64 c1() const { return a1_; }
  bool in_zp() const { return a1_ == 0; }

  std::vector<std::uint32_t> digits(int component) const {
    u64 v = component == 0 ? a0_ : a1_;
    std::vector<std::uint32_t> out(static_cast<std::size_t>(prec_));
    for (auto& d : out) {
      d = static_cast<std::uint32_t>(v % p_);
      v /= p_;
    }
    return out;
  }

  PadicElem zero_like() const { return PadicElem(*this, 0, 0); }
  PadicElem one_like() const { return PadicElem(*this, 1 % std::max<u64>(mod_, 1), 0); }
  PadicElem scalar(i64 v) const { return PadicElem(*this, detail::reduce_signed(v, mod_), 0); }

  bool is_zero() const { return a0_ == 0 && a1_ == 0; }
  bool is_unit() const { return prec_ > 0 && (a0_ % p_ != 0 || a1_ % p_ != 0); }

  /// min(v(c0), v(c1)), or precision() when the element is zero mod p^N.
  int valuation() const { return std::min(detail::vp(a0_, p_, prec_), detail::vp(a1_, p_, prec_)); }

  /// Reduce to a smaller precision.
  PadicElem with_precision(int n) const {
    if (n > prec_) throw PrecisionLoss("cannot raise precision from " + std::to_string(prec_) + " to " + std::to_string(n));
    return reinterpret(n);
  }

  /// Reinterpret the residues at precision n. Raising precision this way is a
  /// working-precision device: the caller accounts for the unknown digits.
  PadicElem lift_to(int n) const { return reinterpret(n); }

  PadicElem operator-() const { return PadicElem(*this, detail::submod(0, a0_, mod_), detail::submod(0, a1_, mod_)); }

  friend PadicElem operator+(const PadicElem& x, const PadicElem& y) {
    if (x.is_null()) return y;
    if (y.is_null()) return x;
    auto [a, b] = align(x, y);
    return PadicElem(a, detail::addmod(a.a0_, b.a0_, a.mod_), detail::addmod(a.a1_, b.a1_, a.mod_));
  }
  friend PadicElem operator-(const PadicElem& x, const PadicElem& y) {
    if (y.is_null()) return x;
    if (x.is_null()) return -y;
    auto [a, b] = align(x, y);
    return PadicElem(a, detail::submod(a.a0_, b.a0_, a.mod_), detail::submod(a.a1_, b.a1_, a.mod_));
  }
  friend PadicElem operator*(const PadicElem& x, const PadicElem& y) {
    if (x.is_null()) return y.zero_like();
    if (y.is_null()) return x.zero_like();
    auto [a, b] = align(x, y);
    const u64 m = a.mod_;
    using detail::addmod;
    using detail::mulmod;
    u64 r0 = addmod(mulmod(a.a0_, b.a0_, m), mulmod(a.d_ % m, mulmod(a.a1_, b.a1_, m), m), m);
    u64 r1 = addmod(mulmod(a.a0_, b.a1_, m), mulmod(a.a1_, b.a0_, m), m);
    return PadicElem(a, r0, r1);
  }
  PadicElem& operator+=(const PadicElem& y) { return *this = *this + y; }
  PadicElem& operator-=(const PadicElem& y) { return *this = *this - y; }
  PadicElem& operator*=(const PadicElem& y) { return *this = *this * y; }

  /// Equality modulo the smaller of the two precisions.
  friend bool operator==(const PadicElem& x, const PadicElem& y) {
    if (x.is_null() || y.is_null()) return (x.is_null() || x.is_zero()) && (y.is_null() || y.is_zero());
    auto [a, b] = align(x, y);
    return a.a0_ == b.a0_ && a.a1_ == b.a1_;
  }
  friend bool operator!=(const PadicElem& x, const PadicElem& y) { return !(x == y); }

  PadicElem conj() const { return PadicElem(*this, a0_, detail::submod(0, a1_, mod_)); }
  PadicElem norm() const { return *this * conj(); }
  PadicElem trace() const { return PadicElem(*this, detail::addmod(a0_, a0_, mod_), 0); }

  PadicElem inverse() const {
    if (!is_unit()) throw NonUnit("inverse of non-unit");
    const u64 m = mod_;
    using detail::mulmod;
    u64 n = detail::submod(mulmod(a0_, a0_, m), mulmod(d_ % m, mulmod(a1_, a1_, m), m), m);
    u64 ni = detail::invmod(n, m);
    return PadicElem(*this, mulmod(a0_, ni, m), mulmod(detail::submod(0, a1_, m), ni, m));
  }

  PadicElem pow(u64 e) const {
    PadicElem r = one_like(), b = *this;
    while (e) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }
  PadicElem pow_signed(i64 e) const { return e >= 0 ? pow(static_cast<u64>(e)) : inverse().pow(static_cast<u64>(-e)); }

  /// Exact division by p^k; the result has precision N - k.
  PadicElem divide_by_p(int k) const {
    if (k == 0) return *this;
    if (k > prec_) throw PrecisionLoss("division by p^" + std::to_string(k) + " at precision " + std::to_string(prec_));
    if (valuation() < k) throw DomainError("element not divisible by p^" + std::to_string(k));
    u64 q = detail::checked_pow(p_, k);
    PadicElem r = reinterpret(prec_ - k);
    r.a0_ = (a0_ / q) % r.mod_;
    r.a1_ = (a1_ / q) % r.mod_;
    return r;
  }

  /// Multiplication by p^k; the result is known to precision N + k.
  PadicElem times_p(int k) const {
    PadicElem r = reinterpret(prec_ + k);
    u64 q = detail::checked_pow(p_, k);
    r.a0_ = detail::mulmod(a0_, q, r.mod_);
    r.a1_ = detail::mulmod(a1_, q, r.mod_);
    return r;
  }

  std::string to_string() const {
    return "(" + std::to_string(a0_) + (a1_ ? " + " + std::to_string(a1_) + "d" : std::string()) + " mod " +
           std::to_string(p_) + "^" + std::to_string(prec_) + ")";
  }

 private:
  PadicElem(const PadicElem& shape, u64 r0, u64 r1) : p_(shape.p_), d_(shape.d_), prec_(shape.prec_), mod_(shape.mod_), a0_(r0), a1_(r1) {}

  PadicElem reinterpret(int n) const {
    PadicElem r(*this, 0, 0);
    r.prec_ = n;
    r.mod_ = detail::checked_pow(p_, n);
    r.a0_ = a0_ % r.mod_;
    r.a1_ = a1_ % r.mod_;
    return r;
  }

  static std::pair<PadicElem, PadicElem> align(const PadicElem& x, const PadicElem& y) {
    if (x.p_ != y.p_) throw DomainError("mixing primes " + std::to_string(x.p_) + " and " + std::to_string(y.p_));
    if (x.prec_ == y.prec_) return {x, y};
    int n = std::min(x.prec_, y.prec_);
    return {x.reinterpret(n), y.reinterpret(n)};
  }

  std::uint32_t p_ = 0;
  std::uint32_t d_ = 0;
  int prec_ = 0;
  u64 mod_ = 1;
  u64 a0_ = 0;
  u64 a1_ = 0;
};

/// Teichmuller representative: the root of unity congruent to u mod p.
inline PadicElem teichmuller(const PadicElem& u) {
  if (!u.is_unit()) throw NonUnit("teichmuller of " + u.to_string());
  const std::uint64_t q = u.in_zp() ? u.prime() : std::uint64_t{u.prime()} * u.prime();
  // x -> x^q contracts by one digit per step towards the fixed root of unity.
  PadicElem x = u;
  for (int i = 0; i < u.precision(); ++i) {
    PadicElem next = x.pow(q);
    if (next == x) break;
    x = next;
  }
  return x;
}

/// Principal-unit part <u> = u / teichmuller(u).
inline PadicElem one_unit_part(const PadicElem& u) { return u * teichmuller(u).inverse(); }

/// p-adic logarithm on 1 + pZ_{p^2}.
inline PadicElem plog(const PadicElem& u) {
  const PadicElem x = u - u.one_like();
  const int N = u.precision();
  if (N == 0) return u.zero_like();
  if (x.valuation() < 1) throw DomainError("plog argument not in 1 + pZ_{p^2}: " + u.to_string());
  if (x.is_zero()) return u.zero_like();
  const std::uint64_t p = u.prime();
  const int v = x.valuation();
  std::uint64_t n0 = 1;
  while (static_cast<std::int64_t>(n0) * v - detail::floor_log(n0, p) < N) ++n0;
  const int extra = detail::floor_log(std::max<std::uint64_t>(n0, 1), p);
  const int W = N + extra;
  const PadicElem xw = x.lift_to(W);
  PadicElem power = xw, sum = xw.zero_like();
  for (std::uint64_t n = 1; n < n0; ++n) {
    const int e = detail::vp(n, p, 64);
    std::uint64_t unit = n;
    for (int i = 0; i < e; ++i) unit /= p;
    PadicElem term = power.divide_by_p(e) * PadicElem(static_cast<std::uint32_t>(p), W - e, static_cast<std::int64_t>(unit)).inverse();
    sum = (n % 2 == 1) ? sum + term : sum - term;
    power *= xw;
  }
  return sum.with_precision(N);
}

/// p-adic exponential on pZ_{p^2}.
inline PadicElem pexp(const PadicElem& x) {
  const int N = x.precision();
  if (N == 0) return x.one_like();
  if (x.valuation() < 1) throw DomainError("pexp argument not in pZ_{p^2}: " + x.to_string());
  if (x.is_zero()) return x.one_like();
  const std::uint64_t p = x.prime();
  const std::int64_t v = x.valuation();
  // term n has valuation >= n v - (n-1)/(p-1)
  std::uint64_t n0 = 1;
  while (static_cast<std::int64_t>(n0) * v * static_cast<std::int64_t>(p - 1) - static_cast<std::int64_t>(n0 - 1) <
         static_cast<std::int64_t>(N) * static_cast<std::int64_t>(p - 1))
    ++n0;
  const int W = N + detail::vp_factorial(n0, p);
  const PadicElem xw = x.lift_to(W);
  PadicElem power = xw.one_like(), sum = xw.zero_like();
  std::uint64_t unit_fact = 1 % xw.modulus();
  int vfact = 0;
  for (std::uint64_t n = 0; n < n0; ++n) {
    if (n > 0) {
      power *= xw;
      std::uint64_t m = n;
      while (m % p == 0) {
        m /= p;
        ++vfact;
      }
      unit_fact = detail::mulmod(unit_fact, m % xw.modulus(), xw.modulus());
    }
    PadicElem inv_unit = PadicElem::from_residues(static_cast<std::uint32_t>(p), W, unit_fact, 0).inverse();
    sum += power.divide_by_p(vfact) * inv_unit;
  }
  return sum.with_precision(N);
}

/// The root of X^2 = s / teichmuller(s) lying in 1 + pZ_p, i.e. <s>^{1/2}.
inline PadicElem sqrt_one_unit(const PadicElem& s) {
  if (!s.is_unit()) throw NonUnit("sqrt_one_unit of " + s.to_string());
  if (!s.in_zp()) throw DomainError("sqrt_one_unit expects an element of Z_p");
  const PadicElem t = one_unit_part(s);
  const PadicElem half = s.scalar(2).inverse();
  PadicElem y = s.one_like();
  for (int i = 0; i < 2 * s.precision() + 2; ++i) {
    PadicElem next = (y + t * y.inverse()) * half;
    if (next == y) break;
    y = next;
  }
  if (y * y != t) throw NoConvergence("sqrt_one_unit Newton iteration");
  return y;
}

/// Square root of a unit of Z_{p^2}: the root whose residue comes first in
/// (c0, c1) lexicographic order, lifted by Newton iteration.
inline PadicElem sqrt_unit(const PadicElem& x) {
  if (!x.is_unit()) throw NonUnit("sqrt_unit of " + x.to_string());
  const std::uint32_t p = x.prime();
  const PadicElem xr = x.with_precision(1);
  for (std::uint32_t a0 = 0; a0 < p; ++a0)
    for (std::uint32_t a1 = 0; a1 < p; ++a1) {
      PadicElem r(p, 1, a0, a1);
      if (r * r != xr) continue;
      const PadicElem half = x.scalar(2).inverse();
      PadicElem y = PadicElem(p, x.precision(), a0, a1);
      for (int i = 0; i < 2 * x.precision() + 2; ++i) {
        PadicElem next = (y + x * y.inverse()) * half;
        if (next == y) break;
        y = next;
      }
      if (y * y != x) throw NoConvergence("sqrt_unit Newton iteration");
      return y;
    }
  throw DomainError(x.to_string() + " is not a square in Z_{p^2}");
}

/// Fixed primitive root of unity of order M | p^2 - 1: the Teichmuller lift
/// of the first generator of F_{p^2}^x in (c0, c1) lexicographic order,
/// raised to (p^2-1)/M. This is the embedding table for character values.
inline PadicElem root_of_unity(std::uint32_t p, int precision, std::uint64_t M) {
  const std::uint64_t q1 = std::uint64_t{p} * p - 1;
  if (M == 0 || q1 % M != 0) throw Unsupported("root of unity of order " + std::to_string(M) + " not in Z_{p^2}");
  std::vector<std::uint64_t> primes;
  for (std::uint64_t r = 2, n = q1; n > 1; ++r)
    if (n % r == 0) {
      primes.push_back(r);
      while (n % r == 0) n /= r;
    }
  for (std::uint32_t a0 = 0; a0 < p; ++a0)
    for (std::uint32_t a1 = 0; a1 < p; ++a1) {
      if (a0 == 0 && a1 == 0) continue;
      PadicElem g(p, 1, a0, a1);
      bool gen = true;
      for (auto r : primes)
        if (g.pow(q1 / r) == g.one_like()) gen = false;
      if (gen) {
        if (precision == 0) return PadicElem(p, 0);
        return teichmuller(PadicElem(p, precision, a0, a1)).pow(q1 / M);
      }
    }
  throw DomainError("no generator of F_{p^2}^x");
}

}  // namespace lamfam
