#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "lamfam/qexp.hpp"

namespace lamfam {

using BigInt = boost::multiprecision::cpp_int;

/// Elliptic curve over Q in long Weierstrass form
///   y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6,
/// assumed minimal at every prime dividing the discriminant.
struct Weierstrass {
  std::int64_t a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;

  BigInt b2() const { return BigInt(a1) * a1 + 4 * BigInt(a2); }
  BigInt b4() const { return 2 * BigInt(a4) + BigInt(a1) * a3; }
  BigInt b6() const { return BigInt(a3) * a3 + 4 * BigInt(a6); }
  BigInt b8() const {
    return BigInt(a1) * a1 * a6 + 4 * BigInt(a2) * a6 - BigInt(a1) * a3 * a4 + BigInt(a2) * a3 * a3 - BigInt(a4) * a4;
  }
  BigInt c4() const { return b2() * b2() - 24 * b4(); }
  BigInt c6() const { return -b2() * b2() * b2() + 36 * b2() * b4() - 216 * b6(); }
  BigInt discriminant() const {
    const BigInt B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
    return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
  }

  /// Reduction type at a prime dividing the discriminant.
  enum class Reduction { Good, Split, NonSplit, Additive };
  Reduction reduction(std::int64_t ell) const {
    if (discriminant() % ell != 0) return Reduction::Good;
    if (c4() % ell == 0) return Reduction::Additive;
    return ap(ell) == 1 ? Reduction::Split : Reduction::NonSplit;
  }

  /// a_l = l - #{affine solutions mod l}; valid for good and bad l.
  std::int64_t ap(std::int64_t ell) const {
    auto md = [ell](std::int64_t v) { return ((v % ell) + ell) % ell; };
    std::int64_t count = 0;
    if (ell == 2) {
      for (std::int64_t x = 0; x < 2; ++x)
        for (std::int64_t y = 0; y < 2; ++y)
          if (md(y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6) == 0) ++count;
      return ell - count;
    }
    // y solutions of y^2 + b y - c = 0 number 1 + (disc / l)
    const std::int64_t e = (ell - 1) / 2;
    for (std::int64_t x = 0; x < ell; ++x) {
      const std::int64_t b = md(a1 * x + a3);
      const std::int64_t c = md(md(md(x * x) * x) + md(a2 * md(x * x)) + md(a4 * x) + md(a6));
      const std::int64_t D = md(b * b + 4 * c);
      if (D == 0)
        count += 1;
      else if (detail::powmod(static_cast<std::uint64_t>(D), static_cast<std::uint64_t>(e), static_cast<std::uint64_t>(ell)) == 1)
        count += 2;
    }
    return ell - count;
  }

  /// Coefficients a_0..a_Q of the attached newform.
  std::vector<std::int64_t> coefficients(int Q) const {
    std::vector<std::int64_t> a(static_cast<std::size_t>(Q) + 1, 0);
    if (Q < 1) return a;
    a[1] = 1;
    const BigInt disc = discriminant();
    std::vector<std::int64_t> spf(static_cast<std::size_t>(Q) + 1, 0);
    for (std::int64_t i = 2; i <= Q; ++i) {
      if (spf[static_cast<std::size_t>(i)] != 0) continue;
      for (std::int64_t j = i; j <= Q; j += i)
        if (spf[static_cast<std::size_t>(j)] == 0) spf[static_cast<std::size_t>(j)] = i;
    }
    for (std::int64_t n = 2; n <= Q; ++n) {
      const std::int64_t ell = spf[static_cast<std::size_t>(n)];
      std::int64_t m = n, r = 0;
      while (m % ell == 0) {
        m /= ell;
        ++r;
      }
      if (m > 1) {
        a[static_cast<std::size_t>(n)] = a[static_cast<std::size_t>(m)] * a[static_cast<std::size_t>(n / m)];
        continue;
      }
      // n = l^r
      if (r == 1) {
        a[static_cast<std::size_t>(n)] = ap(ell);
        continue;
      }
      const bool good = disc % ell != 0;
      a[static_cast<std::size_t>(n)] = a[static_cast<std::size_t>(ell)] * a[static_cast<std::size_t>(n / ell)] -
                                       (good ? ell * a[static_cast<std::size_t>(n / ell / ell)] : 0);
    }
    return a;
  }

  /// The newform as a weight-2 q-expansion over Z_p mod p^N.
  QExpansion<PadicElem> newform(std::uint32_t p, int N, int Q, std::int64_t level) const {
    std::vector<PadicElem> c;
    for (auto v : coefficients(Q)) c.push_back(PadicElem(p, N, v));
    QExpansion<PadicElem> f(std::move(c), level);
    f.set_weight(2);
    return f;
  }
};

}  // namespace lamfam
