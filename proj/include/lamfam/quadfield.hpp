#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "lamfam/errors.hpp"
#include "lamfam/padic.hpp"

namespace lamfam {

/// x + y*omega in O_K = Z[omega], omega = (1 + sqrt(-d))/2.
struct QuadInt {
  std::int64_t x = 0, y = 0;

  friend bool operator==(const QuadInt& a, const QuadInt& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator<(const QuadInt& a, const QuadInt& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); }
};

/// Lattice with basis n1, m + n2*omega (Hermite normal form, 0 <= m < n1,
/// n2 | n1, n2 | m). The primitive part is [a, (b + sqrt(-d))/2] with
/// a = n1/n2, b = 2m/n2 + 1, and the content is n2.
struct IdealRep {
  std::int64_t n1 = 1, m = 0, n2 = 1;

  std::int64_t norm() const { return n1 * n2; }
  std::int64_t content() const { return n2; }
  std::int64_t a() const { return n1 / n2; }
  std::int64_t b() const { return 2 * (m / n2) + 1; }
  bool is_unit() const { return n1 == 1 && n2 == 1; }

  friend bool operator==(const IdealRep& u, const IdealRep& v) { return u.n1 == v.n1 && u.m == v.m && u.n2 == v.n2; }
  friend bool operator!=(const IdealRep& u, const IdealRep& v) { return !(u == v); }
  friend bool operator<(const IdealRep& u, const IdealRep& v) {
    return std::make_tuple(u.norm(), u.a(), u.b(), u.n2) < std::make_tuple(v.norm(), v.a(), v.b(), v.n2);
  }

  std::string to_string() const {
    return "[" + std::to_string(a()) + ", (" + std::to_string(b()) + "+sqrt)/2]x" + std::to_string(n2);
  }
};

/// Reduced binary quadratic form a x^2 + b xy + c y^2.
struct QuadForm {
  std::int64_t a, b, c;
  friend bool operator==(const QuadForm& u, const QuadForm& v) { return u.a == v.a && u.b == v.b && u.c == v.c; }
};

enum class Splitting { Split, Inert, Ramified };

struct PrimeDecomposition {
  Splitting kind;
  std::vector<IdealRep> primes;  // one ideal (inert, ramified) or the pair (split)
};

namespace detail {

inline bool is_squarefree(std::int64_t n) {
  for (std::int64_t q = 2; q * q <= n; ++q)
    if (n % (q * q) == 0) return false;
  return true;
}

/// HNF of the Z-lattice spanned by the given (x, y) vectors.
inline IdealRep hnf_of(std::vector<QuadInt> gens) {
  // Euclid on the omega-coordinates; the survivor carries gcd of all y.
  std::int64_t g1 = 0;  // gcd of x-parts once y is cleared
  QuadInt piv{0, 0};
  for (auto v : gens) {
    while (v.y != 0) {
      if (piv.y == 0) {
        std::swap(piv, v);
        break;
      }
      std::int64_t q = v.y / piv.y;
      v.x -= q * piv.x;
      v.y -= q * piv.y;
      if (v.y != 0) std::swap(piv, v);
    }
    if (v.y == 0 && v.x != 0) g1 = std::gcd(g1, std::llabs(v.x));
  }
  if (piv.y < 0) {
    piv.x = -piv.x;
    piv.y = -piv.y;
  }
  if (g1 == 0 || piv.y == 0) throw DomainError("lattice is not of full rank");
  IdealRep r;
  r.n1 = g1;
  r.n2 = piv.y;
  r.m = floor_mod_i64(piv.x, g1);
  return r;
}

}  // namespace detail

/// K = Q(sqrt(-d)) with -d = 1 mod 4 and d squarefree.
class QuadField {
 public:
  explicit QuadField(std::int64_t d) : d_(d) {
    if (d <= 0 || d % 4 != 3 || !detail::is_squarefree(d))
      throw ValidationFailed("field discriminant -" + std::to_string(d) + " must be odd and fundamental (d = 3 mod 4, squarefree)");
    cw_ = (1 + d) / 4;
    forms_ = compute_reduced_forms();
    for (std::int64_t x = -2; x <= 2; ++x)
      for (std::int64_t y = -2; y <= 2; ++y)
        if (norm({x, y}) == 1) units_.push_back({x, y});
  }

  std::int64_t d() const { return d_; }
  std::int64_t discriminant() const { return -d_; }
  std::int64_t class_number() const { return static_cast<std::int64_t>(forms_.size()); }
  const std::vector<QuadForm>& reduced_forms() const { return forms_; }
  const std::vector<QuadInt>& units() const { return units_; }
  /// #O_K^x / 2.
  std::int64_t u_K() const { return static_cast<std::int64_t>(units_.size()) / 2; }

  // ---- elements ----
  std::int64_t norm(const QuadInt& a) const { return a.x * a.x + a.x * a.y + cw_ * a.y * a.y; }
  std::int64_t trace(const QuadInt& a) const { return 2 * a.x + a.y; }
  QuadInt conj(const QuadInt& a) const { return {a.x + a.y, -a.y}; }
  QuadInt mul(const QuadInt& a, const QuadInt& b) const {
    return {a.x * b.x - cw_ * a.y * b.y, a.x * b.y + a.y * b.x + a.y * b.y};
  }
  QuadInt add(const QuadInt& a, const QuadInt& b) const { return {a.x + b.x, a.y + b.y}; }
  QuadInt sub(const QuadInt& a, const QuadInt& b) const { return {a.x - b.x, a.y - b.y}; }
  QuadInt scalar(std::int64_t n) const { return {n, 0}; }

  /// Image in Z_{p^2} = Z_p[delta], delta^2 = t, via sqrt(-d) = s delta with
  /// s^2 = -d/t. Requires p inert.
  PadicElem embed(const QuadInt& a, std::uint32_t p, int N) const {
    const PadicElem sd = sqrt_minus_d(p, N);
    PadicElem half = PadicElem(p, N, 2).inverse();
    // x + y (1 + sqrt(-d))/2
    return PadicElem(p, N, a.x) + PadicElem(p, N, a.y) * (sd + PadicElem(p, N, 1)) * half;
  }

  /// sqrt(-d) in Z_{p^2} as s*delta with s in Z_p; of the two roots, the one
  /// whose leading digit is smaller.
  PadicElem sqrt_minus_d(std::uint32_t p, int N) const {
    if (splitting(p).kind != Splitting::Inert) throw Unsupported("p = " + std::to_string(p) + " is not inert in K");
    PadicElem probe(p, 1);
    const std::int64_t t = probe.delta_square();
    // s^2 = -d / t in Z_p; -d/t is a square since both -d and t are non-residues.
    PadicElem target = PadicElem(p, N, -d_) * PadicElem(p, N, t).inverse();
    std::uint64_t s0 = 0;
    for (std::uint64_t s = 1; s < p; ++s)
      if ((s * s) % p == target.c0() % p) {
        s0 = s;
        break;
      }
    PadicElem s(p, N, static_cast<std::int64_t>(s0));
    PadicElem half = PadicElem(p, N, 2).inverse();
    for (int i = 0; i < N + 2; ++i) s = (s + target * s.inverse()) * half;
    return s * PadicElem(p, N, 0, 1);
  }

  // ---- ideals ----
  IdealRep unit_ideal() const { return IdealRep{}; }

  IdealRep ideal(std::vector<QuadInt> gens) const {
    // close the Z-span under multiplication by omega
    std::vector<QuadInt> all = gens;
    for (const auto& g : gens) all.push_back(mul(g, {0, 1}));
    return detail::hnf_of(all);
  }
  IdealRep principal(const QuadInt& a) const {
    if (a.x == 0 && a.y == 0) throw DomainError("zero ideal");
    return ideal({a});
  }
  /// c * [a, (b + sqrt(-d))/2].
  IdealRep from_abc(std::int64_t a, std::int64_t b, std::int64_t c = 1) const {
    if (a <= 0 || c <= 0 || ((b * b + d_) % (4 * a)) != 0) throw DomainError("not an ideal: b^2 != -d mod 4a");
    return ideal({{c * a, 0}, {c * (b - 1) / 2, c}});
  }

  std::vector<QuadInt> basis(const IdealRep& I) const { return {{I.n1, 0}, {I.m, I.n2}}; }

  IdealRep mul(const IdealRep& I, const IdealRep& J) const {
    auto bi = basis(I), bj = basis(J);
    std::vector<QuadInt> g;
    for (const auto& u : bi)
      for (const auto& v : bj) g.push_back(mul(u, v));
    return detail::hnf_of(g);
  }
  IdealRep pow(const IdealRep& I, std::int64_t e) const {
    IdealRep r = unit_ideal();
    for (std::int64_t i = 0; i < e; ++i) r = mul(r, I);
    return r;
  }
  IdealRep conj(const IdealRep& I) const {
    auto b = basis(I);
    return detail::hnf_of({conj(b[0]), conj(b[1])});
  }
  IdealRep sum(const IdealRep& I, const IdealRep& J) const {
    auto b = basis(I), c = basis(J);
    return detail::hnf_of({b[0], b[1], c[0], c[1]});
  }
  bool coprime(const IdealRep& I, const IdealRep& J) const { return sum(I, J).is_unit(); }
  bool contains(const IdealRep& I, const QuadInt& a) const {
    if (a.y % I.n2 != 0) return false;
    return (a.x - (a.y / I.n2) * I.m) % I.n1 == 0;
  }
  bool divides(const IdealRep& I, const IdealRep& J) const {  // I | J, i.e. J in I
    auto b = basis(J);
    return contains(I, b[0]) && contains(I, b[1]);
  }

  /// A generator if I is principal: the shortest lattice vector has norm N(I).
  bool principal_generator(const IdealRep& I, QuadInt* gen) const {
    // Lagrange reduction of the lattice I under the norm form, in 128-bit
    // arithmetic so that ideals of norm up to ~1e12 stay exact.
    using i128 = __int128;
    i128 x1 = I.n1, y1 = 0, x2 = I.m, y2 = I.n2;
    auto nrm = [&](i128 x, i128 y) { return x * x + x * y + static_cast<i128>(cw_) * y * y; };
    for (;;) {
      if (nrm(x2, y2) < nrm(x1, y1)) {
        std::swap(x1, x2);
        std::swap(y1, y2);
      }
      const i128 q1 = nrm(x1, y1);
      const i128 b = nrm(x1 + x2, y1 + y2) - q1 - nrm(x2, y2);
      if ((b < 0 ? -b : b) <= q1) break;
      // mu = round(b / (2 q1))
      const i128 mu = b >= 0 ? (b + q1) / (2 * q1) : -((-b + q1) / (2 * q1));
      x2 -= mu * x1;
      y2 -= mu * y1;
    }
    if (nrm(x1, y1) != static_cast<i128>(I.norm())) return false;
    if (gen) *gen = {static_cast<std::int64_t>(x1), static_cast<std::int64_t>(y1)};
    return true;
  }

  // ---- primes ----
  int kronecker(std::int64_t ell) const {
    if (ell == 2) {
      const std::int64_t r = detail::floor_mod_i64(-d_, 8);
      return r == 1 ? 1 : -1;
    }
    if (d_ % ell == 0) return 0;
    std::uint64_t v = detail::powmod(static_cast<std::uint64_t>(detail::floor_mod_i64(-d_, ell)),
                                     static_cast<std::uint64_t>((ell - 1) / 2), static_cast<std::uint64_t>(ell));
    return v == 1 ? 1 : -1;
  }

  PrimeDecomposition splitting(std::int64_t ell) const {
    if (!detail::is_prime(static_cast<std::uint64_t>(ell))) throw DomainError(std::to_string(ell) + " is not prime");
    const int k = kronecker(ell);
    if (k == -1) return {Splitting::Inert, {from_abc(1, 1, ell)}};
    std::vector<IdealRep> ps;
    for (std::int64_t b = 1; b < 2 * ell; b += 2)
      if ((b * b + d_) % (4 * ell) == 0) {
        IdealRep P = from_abc(ell, b);
        if (std::find(ps.begin(), ps.end(), P) == ps.end()) ps.push_back(P);
      }
    std::sort(ps.begin(), ps.end());
    return {k == 0 ? Splitting::Ramified : Splitting::Split, ps};
  }

  /// I / J for J dividing I.
  IdealRep divide(const IdealRep& I, const IdealRep& J) const {
    if (!divides(J, I)) throw DomainError(J.to_string() + " does not divide " + I.to_string());
    auto b = basis(mul(I, conj(J)));
    const std::int64_t n = J.norm();
    for (const auto& v : b)
      if (v.x % n != 0 || v.y % n != 0) throw InconsistencyFound("ideal quotient is not integral");
    return detail::hnf_of({{b[0].x / n, b[0].y / n}, {b[1].x / n, b[1].y / n}});
  }

  /// Prime ideal factorization, primes sorted.
  std::vector<std::pair<IdealRep, int>> factor(const IdealRep& I) const {
    std::vector<std::pair<IdealRep, int>> out;
    IdealRep rest = I;
    std::int64_t n = I.norm();
    for (std::int64_t q = 2; q <= n; ++q) {
      if (n % q != 0) continue;
      while (n % q == 0) n /= q;
      for (const auto& P : splitting(q).primes) {
        int e = 0;
        while (!rest.is_unit() && divides(P, rest)) {
          rest = divide(rest, P);
          ++e;
        }
        if (e > 0) out.push_back({P, e});
      }
    }
    return out;
  }

  /// Every integral ideal of norm <= nmax coprime to `modulus`, sorted by
  /// (norm, a, b, content).
  std::vector<IdealRep> enumerate_ideals(std::int64_t nmax, const IdealRep& modulus = IdealRep{}) const {
    std::vector<IdealRep> out;
    for (std::int64_t a = 1; a <= nmax; ++a)
      for (std::int64_t b = 1; b < 2 * a; b += 2) {
        if ((b * b + d_) % (4 * a) != 0) continue;
        for (std::int64_t c = 1; c * c * a <= nmax; ++c) {
          IdealRep I = from_abc(a, b, c);
          if (modulus.is_unit() || coprime(I, modulus)) out.push_back(I);
        }
      }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Number of ideals of norm n, from the divisor sum of the Kronecker symbol.
  std::int64_t ideal_count_formula(std::int64_t n) const {
    std::int64_t s = 0;
    for (std::int64_t m = 1; m <= n; ++m)
      if (n % m == 0) s += kronecker_any(m);
    return s;
  }

  /// Primitive ideal attached to a form (a, b, c): [a, (-b + sqrt(-d))/2].
  IdealRep ideal_of_form(const QuadForm& f) const { return from_abc(f.a, detail::floor_mod_i64(-f.b, 2 * f.a), 1); }

 private:
  /// Kronecker symbol (-d / m) for any m >= 1, multiplicative in m.
  int kronecker_any(std::int64_t m) const {
    int r = 1;
    for (std::int64_t q = 2; m > 1; ++q)
      while (m % q == 0) {
        r *= kronecker(q);
        m /= q;
      }
    return r;
  }

  std::vector<QuadForm> compute_reduced_forms() const {
    std::vector<QuadForm> out;
    for (std::int64_t a = 1; 3 * a * a <= d_; ++a)
      for (std::int64_t b = -a + 1; b <= a; ++b) {
        if (((b % 2) + 2) % 2 != 1) continue;
        if ((b * b + d_) % (4 * a) != 0) continue;
        std::int64_t c = (b * b + d_) / (4 * a);
        if (c < a) continue;
        if (b < 0 && a == c) continue;
        if (std::gcd(std::gcd(a, std::llabs(b)), c) != 1) continue;
        out.push_back({a, b, c});
      }
    return out;
  }

  std::int64_t d_;
  std::int64_t cw_;
  std::vector<QuadForm> forms_;
  std::vector<QuadInt> units_;
};

}  // namespace lamfam
