#pragma once

// Synthetic triple-product configuration over the default instance
// (p = 5, K = Q(sqrt -7), eta of conductor 5 O_K), shared by the unit tests
// and the acceptance binary.
//
// Xi is built from the Hida theta family in both the g and h slots. The
// ordinary spaces are replaced by ingested three-line bases:
//   weight 2: 35a (p-new, a_5 = -1, the target), 11a, 21a;
//   weight 4: the ordinary 5-stabilization of 6.4.a.a (the target),
//             eta(2z)^4 eta(4z)^4 and its twist by chi_{-4}.

#include <memory>
#include <vector>

#include "lamfam/elliptic.hpp"
#include "lamfam/euler.hpp"
#include "lamfam/triple.hpp"

namespace lamfam::synthetic {

constexpr std::uint32_t kP = 5;
constexpr int kN = 8;

/// q prod_i prod_n (1 - q^{d_i n})^{e_i} as integers up to q^Q.
inline std::vector<std::int64_t> eta_quotient(int Q, int shift, const std::vector<std::pair<int, int>>& factors) {
  std::vector<std::int64_t> f(static_cast<std::size_t>(Q) + 1, 0);
  if (shift > Q) return f;
  f[static_cast<std::size_t>(shift)] = 1;
  for (auto [d, e] : factors)
    for (int n = 1; d * n <= Q; ++n)
      for (int r = 0; r < e; ++r)
        for (int i = Q; i >= d * n; --i) f[static_cast<std::size_t>(i)] -= f[static_cast<std::size_t>(i - d * n)];
  return f;
}

inline QExpansion<PadicElem> from_ints(const std::vector<std::int64_t>& a, std::int64_t level, int weight) {
  std::vector<PadicElem> c;
  for (auto v : a) c.push_back(PadicElem(kP, kN, v));
  QExpansion<PadicElem> q(std::move(c), level);
  q.set_weight(weight);
  return q;
}

inline std::map<std::int64_t, PadicElem> eigenvalues_of(const QExpansion<PadicElem>& f, const std::vector<std::int64_t>& primes) {
  std::map<std::int64_t, PadicElem> ev;
  for (auto l : primes) ev[l] = f[static_cast<int>(l)];
  return ev;
}

/// Unit root of x^2 - a x + p^{k-1} by Newton iteration from a mod p.
inline PadicElem unit_root(std::int64_t a, int k) {
  const PadicElem A(kP, kN, a), c(kP, kN, static_cast<std::int64_t>(detail::checked_pow(kP, k - 1)));
  PadicElem x = A;
  for (int i = 0; i < 2 * kN; ++i) x = x - (x * x - A * x + c) * (x.scalar(2) * x - A).inverse();
  if (x * x - A * x + c != x.zero_like()) throw NoConvergence("unit root");
  return x;
}

struct Config {
  int Q;
  std::shared_ptr<const QuadField> K = std::make_shared<const QuadField>(7);
  std::shared_ptr<const RayContext> ctx = make_ray_context(K, K->principal({5, 0}));
  HeckeChar eta{ctx, {1}};
  std::shared_ptr<const LambdaChar> lam = std::make_shared<const LambdaChar>(K, kP, kN);
  HidaFamily H;
  std::int64_t a = 1;
  TriplePipeline P;
  PadicElem alpha;  // unit root at 5 of 6.4.a.a
  std::size_t target2 = 0, target4 = 0;

  explicit Config(int Q_ = 60) : Q(Q_), H(build_g_hida(eta, lam, Q_)) {
    auto f_coords = std::make_shared<const UnitCoordinates>(kP, kN, 1, 2);
    P.theta = std::make_shared<const TwistChar>(a, kN, f_coords, H.coords, H.coords);
    P.xi = build_xi(H.q, H.q, *P.theta);
    P.M = 49;
    P.Nf = 7;
    P.fudge = {PadicElem(kP, kN, 2), PadicElem(kP, kN, 3)};

    const std::vector<std::int64_t> primes2{2, 3, 13};
    const auto f35 = Weierstrass{0, 1, 1, 9, 1}.newform(kP, kN, Q, 35);
    const auto f11 = Weierstrass{0, -1, 1, -10, -20}.newform(kP, kN, Q, 11);
    const auto f21 = Weierstrass{1, 0, 0, -4, -1}.newform(kP, kN, Q, 21);
    P.bases.emplace(2, OrdinaryBasis({{"35a", f35, eigenvalues_of(f35, primes2)},
                                      {"11a", f11, eigenvalues_of(f11, primes2)},
                                      {"21a", f21, eigenvalues_of(f21, primes2)}}));
    target2 = 0;
    EigenData t2;
    t2.label = "35a";
    t2.level = 35;
    t2.tame_level = 7;
    t2.s = 1;
    t2.weight = 2;
    t2.eigenvalues = eigenvalues_of(f35, primes2);
    t2.a_p = f35[5];
    t2.lambda_N = PadicElem(kP, kN, 1);
    t2.eta_f = PadicElem(kP, kN, 3);
    t2.p_new = true;
    t2.validate();
    P.targets.emplace(2, t2);

    const std::vector<std::int64_t> primes4{7, 11, 13};
    auto f6 = from_ints(eta_quotient(Q, 1, {{1, 2}, {2, 2}, {3, 2}, {6, 2}}), 6, 4);
    if (f6[5] != PadicElem(kP, kN, 6)) throw ValidationFailed("6.4.a.a: a_5 != 6");
    alpha = unit_root(6, 4);
    const PadicElem beta = PadicElem(kP, kN, 125) * alpha.inverse();
    auto f6a = f6;
    for (int n = 5; n <= Q; n += 5) f6a.set(n, f6[n] - beta * f6[n / 5]);
    f6a.set_level(30);
    auto f8 = from_ints(eta_quotient(Q, 1, {{2, 4}, {4, 4}}), 8, 4);
    auto f8t = f8;
    for (int n = 1; n <= Q; ++n)
      if (n % 4 == 3) f8t.set(n, -f8[n]);
    f8t.set_level(16);
    P.bases.emplace(4, OrdinaryBasis({{"6.4.a.a-alpha", f6a, eigenvalues_of(f6a, primes4)},
                                      {"8.4.a.a", f8, eigenvalues_of(f8, primes4)},
                                      {"8.4.a.a-chi4", f8t, eigenvalues_of(f8t, primes4)}}));
    target4 = 0;
    EigenData t4;
    t4.label = "6.4.a.a-alpha";
    t4.level = 30;
    t4.tame_level = 6;
    t4.s = 1;
    t4.weight = 4;
    t4.eigenvalues = eigenvalues_of(f6a, primes4);
    t4.a_p = alpha;
    t4.lambda_N = PadicElem(kP, kN, 1);
    t4.eta_f = PadicElem(kP, kN, 3);
    t4.p_new = false;
    t4.validate();
    P.targets.emplace(4, t4);
  }

  QExpansion<PadicElem> g_classical(int k) const { return specialize_family(H, Weight::group(k)); }

  /// Xi_w with its component in the ingested span replaced by sum_j c_j b_j.
  QExpansion<PadicElem> controlled_xi(const TripleWeight& w, const std::vector<PadicElem>& c) const {
    const OrdinaryBasis& B = P.bases.at(w.kx);
    const auto xi_w = specialize_xi(P.xi, *P.theta, w).truncate(B.cap());
    return xi_w - B.ordinary_part(xi_w) + B.combination(c);
  }

  /// Target coordinate e_p(k, a_p, n = 0) times a unit; the other lines get 1 and 2.
  std::vector<PadicElem> controlled_coordinates(int kx) const {
    const EigenData& t = P.targets.at(kx);
    const ExactScalar ap = kx == 2 ? ExactScalar(Rational(t.a_p == t.a_p.one_like() ? 1 : -1)) : ExactScalar(t.a_p);
    const EulerValue e = anticyc_multiplier(kP, kx, ap, 0, t.p_new ? FormType::PNew : FormType::POld);
    return {e.scalar.to_padic(kP, kN), PadicElem(kP, kN, 1), PadicElem(kP, kN, 2)};
  }
};

inline const Config& shared_config() {
  static const Config C;
  return C;
}

}  // namespace lamfam::synthetic
