#include <gtest/gtest.h>

#include <numeric>

#include "lamfam/theta.hpp"

using namespace lamfam;

namespace {

constexpr std::uint32_t P = 5;
constexpr int NP = 8;
constexpr int QCAP = 200;

// q prod (1 - q^n)(1 - q^{23 n}) up to q^Q, integer arithmetic.
std::vector<std::int64_t> eta_product_23(int Q) {
  std::vector<std::int64_t> f(static_cast<std::size_t>(Q) + 1, 0);
  f[1] = 1;
  auto mul_one_minus = [&](int m) {
    for (int i = Q; i >= m; --i) f[static_cast<std::size_t>(i)] -= f[static_cast<std::size_t>(i - m)];
  };
  for (int n = 1; n <= Q; ++n) {
    mul_one_minus(n);
    if (23 * n <= Q) mul_one_minus(23 * n);
  }
  return f;
}

std::int64_t representations(const QuadForm& f, std::int64_t n, std::int64_t d) {
  std::int64_t count = 0;
  const std::int64_t yb = static_cast<std::int64_t>(std::sqrt(4.0 * f.a * n / d)) + 1;
  const std::int64_t xb = static_cast<std::int64_t>(std::sqrt(4.0 * f.c * n / d)) + 1;
  for (std::int64_t x = -xb; x <= xb; ++x)
    for (std::int64_t y = -yb; y <= yb; ++y)
      if (f.a * x * x + f.b * x * y + f.c * y * y == n) ++count;
  return count;
}

struct Cubic23 {
  std::shared_ptr<const QuadField> K = std::make_shared<const QuadField>(23);
  std::shared_ptr<const RayContext> ctx = make_ray_context(K, K->unit_ideal());
  HeckeChar eta{ctx, {1}};
};

// Shared default instance: p = 5, K = Q(sqrt(-7)), eta of conductor 5 O_K.
struct DefaultInstance {
  std::shared_ptr<const QuadField> K = std::make_shared<const QuadField>(7);
  std::shared_ptr<const RayContext> ctx = make_ray_context(K, K->principal({5, 0}));
  HeckeChar eta{ctx, {1}};
  std::shared_ptr<const LambdaChar> lam = std::make_shared<const LambdaChar>(K, P, NP);
  ColFamily col = build_g_col(eta, lam, QCAP);
  HidaFamily hida = build_g_hida(eta, lam, QCAP);
};

const DefaultInstance& instance() {
  static const DefaultInstance D;
  return D;
}

QExpansion<PadicElem> to_padic(const QExpansion<CycloInt>& g, std::uint32_t p, int N) {
  return g.map([&](const CycloInt& c) {
    const PadicElem z = root_of_unity(p, N, static_cast<std::uint64_t>(c.order()));
    PadicElem s(p, N), w = z.one_like();
    for (std::size_t i = 0; i < c.coeffs().size(); ++i) {
      s += w * PadicElem(p, N, c.coeffs()[i]);
      w *= z;
    }
    return s;
  });
}

}  // namespace

TEST(ThetaExact, Cubic23MatchesEtaProductAndFormSums) {
  Cubic23 C;
  auto g = theta_exact(C.eta, QCAP);
  EXPECT_EQ(g.level(), 23);
  EXPECT_EQ(g[1], CycloInt(3, 1));
  EXPECT_EQ(g[2], CycloInt(3, -1));
  EXPECT_EQ(g[3], CycloInt(3, -1));
  EXPECT_EQ(g[4], CycloInt(3, 0));
  const auto f = eta_product_23(QCAP);
  for (int n = 0; n <= QCAP; ++n) EXPECT_EQ(g[n], CycloInt(3, f[static_cast<std::size_t>(n)])) << "n=" << n;
  // sum over reduced forms of eta(class) r_f(n) / 2
  for (int n = 1; n <= QCAP; ++n) {
    CycloInt s(3);
    for (const auto& form : C.K->reduced_forms())
      s += CycloInt::zeta_power(3, C.eta.exponent(C.K->ideal_of_form(form))) * (representations(form, n, 23) / 2);
    EXPECT_EQ(g[n], s) << "n=" << n;
  }
}

TEST(ThetaExact, HeckeMultiplicativityUpToFifty) {
  Cubic23 C;
  auto g = theta_exact(C.eta, QCAP);
  for (std::int64_t ell = 2; ell <= 50; ++ell) {
    if (!detail::is_prime(static_cast<std::uint64_t>(ell))) continue;
    const CycloInt chi = g.ell_term(ell);
    for (std::int64_t n = 1; n * ell <= QCAP; ++n) {
      CycloInt rhs = g[n * ell];
      if (n % ell == 0) rhs += chi * g[n / ell];
      EXPECT_EQ(g[ell] * g[n], rhs) << "l=" << ell << " n=" << n;
    }
    // T_l g = a_l g on the surviving cap
    auto T = hecke_T(ell, g);
    EXPECT_EQ(T, g.truncate(T.cap()).scaled(g[ell])) << "l=" << ell;
  }
  EXPECT_TRUE(g.ell_term(23).is_zero());
}

TEST(ThetaExact, RejectsEisensteinAndImprimitive) {
  auto K = std::make_shared<const QuadField>(7);
  auto ctx1 = make_ray_context(K, K->unit_ideal());
  EXPECT_THROW(theta_exact(HeckeChar::trivial(ctx1), 20), ValidationFailed);
  auto ctx25 = make_ray_context(K, K->principal({25, 0}));
  // a character of conductor 5 O_K lifted to modulus 25 O_K: the fifth power
  // of any character kills the 5-part of order 5
  bool found = false;
  for (const auto& e : ctx25->G->structure().elements()) {
    HeckeChar chi(ctx25, e);
    if (chi.is_trivial() || chi.conductor() == ctx25->G->modulus()) continue;
    EXPECT_THROW(theta_exact(chi, 20), NotPrimitive);
    found = true;
    break;
  }
  EXPECT_TRUE(found);
}

TEST(ThetaClassical, DefaultInstanceShape) {
  const auto& D = instance();
  for (int k : {1, 2, 3}) {
    auto g = theta_classical(D.eta, *D.lam, k, QCAP);
    EXPECT_EQ(g[1], PadicElem(P, NP, 1));
    EXPECT_EQ(g.level(), 7 * 25);
    for (int n = 0; n <= QCAP; n += 5) EXPECT_TRUE(g[n].is_zero()) << "k=" << k << " n=" << n;
    EXPECT_TRUE(killed_by_U(g, P));
    EXPECT_TRUE(ord_project(P, g).is_zero());
  }
  EXPECT_EQ(theta_level(D.eta, P).tame_level, 7);
  EXPECT_EQ(theta_level(D.eta, P).r, 1);
}

TEST(ThetaClassical, WeightOneMatchesExactSeries) {
  const auto& D = instance();
  auto g = theta_classical(D.eta, *D.lam, 1, QCAP);
  EXPECT_EQ(g, to_padic(theta_exact(D.eta, QCAP), P, NP));
}

TEST(ThetaClassical, EigenformRelations) {
  const auto& D = instance();
  for (int k : {1, 2, 3}) {
    auto g = theta_classical(D.eta, *D.lam, k, QCAP);
    for (std::int64_t ell : {2, 3, 11, 13, 17, 19}) {
      const PadicElem t = g.ell_term(ell);
      for (std::int64_t n = 1; n * ell <= QCAP; ++n) {
        if (std::gcd(n, 35 * ell) != 1) continue;
        EXPECT_EQ(g[ell] * g[n], g[n * ell]) << "k=" << k << " l=" << ell << " n=" << n;
      }
      for (std::int64_t n = 1; n * ell <= QCAP; ++n) {
        PadicElem rhs = g[n * ell];
        if (n % ell == 0) rhs += t * g[n / ell];
        EXPECT_EQ(g[ell] * g[n], rhs) << "k=" << k << " l=" << ell << " n=" << n;
      }
    }
  }
}

TEST(GCol, UnitIdealGivesConstantOne) {
  const auto& D = instance();
  const ColSeries& a1 = D.col.q[1];
  EXPECT_EQ(a1, ColSeries::constant(a1.layout(), RampedElem(PadicElem(P, NP, 1))));
  EXPECT_EQ(col_series_cap(P, NP), 10);
  EXPECT_EQ(D.col.q.level(), 175);
}

TEST(GCol, InterpolatesClassicalThetaSeries) {
  const auto& D = instance();
  for (int h : {0, 1, 2}) {
    const int k = 1 + h;  // a = 0
    auto spec = specialize_family(D.col, Weight::arithmetic(k));
    auto direct = theta_classical(D.eta, *D.lam, k, QCAP);
    EXPECT_EQ(first_difference(spec, direct), -1) << "k=" << k;
    EXPECT_EQ(spec, direct) << "k=" << k;
    EXPECT_EQ(spec[2].precision(), NP);
  }
  // distinct weights give distinct expansions
  EXPECT_NE(specialize_family(D.col, Weight::arithmetic(2)), theta_classical(D.eta, *D.lam, 3, QCAP));
}

TEST(GCol, KilledByUpAndOrdinaryProjector) {
  const auto& D = instance();
  EXPECT_TRUE(killed_by_U(D.col.q, P));
  EXPECT_TRUE(ord_project(P, D.col.q).is_zero());
}

TEST(GCol, ShortCapLosesPrecision) {
  const auto& D = instance();
  auto F = build_g_col(D.eta, D.lam, 30, 3);
  EXPECT_THROW(specialize_family(F, Weight::arithmetic(2)), PrecisionLoss);
}

TEST(GHida, AgreesWithColemanFamily) {
  const auto& D = instance();
  for (int k : {1, 2, 3}) {
    auto h = specialize_family(D.hida, Weight::group(k));
    EXPECT_EQ(h, specialize_family(D.col, Weight::arithmetic(k))) << "k=" << k;
  }
  EXPECT_EQ(specialize_family(D.hida, Weight::group(1)), theta_classical(D.eta, *D.lam, 1, QCAP));
  EXPECT_TRUE(killed_by_U(D.hida.q, P));
  EXPECT_TRUE(ord_project(P, D.hida.q).is_zero());
}

TEST(GHida, TwistedSpecializationIsDirectTwist) {
  const auto& D = instance();
  // eps = zeta_5^{c2} on the second coordinate of W_K
  const FiniteTwist eps{1, {0, 1}};
  const int k = 2;
  auto tw = specialize_family_twisted(D.hida, Weight::group(k, eps));
  // oracle: coordinates mod 5 by brute force on 1 + 5 Z_25 mod 25
  const PadicElem u1(P, 2, 6), u2(P, 2, 1, 5);
  auto coords_mod5 = [&](const PadicElem& u) {
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b)
        if (u1.pow(static_cast<std::uint64_t>(a)) * u2.pow(static_cast<std::uint64_t>(b)) == u.with_precision(2)) return std::make_pair(a, b);
    ADD_FAILURE() << "no coordinates for " << u.to_string();
    return std::make_pair(0, 0);
  };
  auto ideals = theta_ideals(D.eta, QCAP);
  std::vector<CycloPadic> oracle(QCAP + 1, CycloPadic(PadicElem(P, NP), 1));
  for (const auto& I : ideals) {
    const PadicElem u = D.lam->avatar(I);
    const auto [a, b] = coords_mod5(u);
    (void)a;
    const PadicElem val = D.eta.padic(I, P, NP) * u.pow_signed(k - 1);
    oracle[static_cast<std::size_t>(I.norm())] += CycloPadic::zeta_power(val, 1, b) * val;
  }
  for (int n = 0; n <= QCAP; ++n) EXPECT_EQ(tw.q[n], oracle[static_cast<std::size_t>(n)]) << "n=" << n;
  // multiplicative in coprime indices, a_{5n} = 0 retained
  for (int m = 2; m <= QCAP; ++m)
    for (int n = 2; m * n <= QCAP; ++n)
      if (std::gcd(m, n) == 1) {
        EXPECT_EQ(tw.q[m] * tw.q[n], tw.q[m * n]) << m << "," << n;
      }
  for (int n = 0; n <= QCAP; n += 5) EXPECT_TRUE(tw.q[n].is_zero());
  // the twist is not a plain weight-2 form: some coefficient leaves Z_{25}
  bool genuine = false;
  for (int n = 1; n <= QCAP; ++n) genuine = genuine || !tw.q[n].is_scalar();
  EXPECT_TRUE(genuine);
  EXPECT_EQ(tw.level.eta_level, 1);
  EXPECT_GE(tw.level.twisted_level, 2);
}

TEST(Families, SpecializationIsHeckeEquivariant) {
  const auto& D = instance();
  for (std::int64_t ell : {2, 3, 7, 11}) {
    for (int k : {1, 2, 3}) {
      auto lhs_c = specialize_family(D.col, Weight::arithmetic(k));
      ColFamily Tc = D.col;
      Tc.q = hecke_T(ell, D.col.q);
      EXPECT_EQ(specialize_family(Tc, Weight::arithmetic(k)), hecke_T(ell, lhs_c)) << "Col l=" << ell << " k=" << k;
      auto lhs_h = specialize_family(D.hida, Weight::group(k));
      HidaFamily Th = D.hida;
      Th.q = hecke_T(ell, D.hida.q);
      EXPECT_EQ(specialize_family(Th, Weight::group(k)), hecke_T(ell, lhs_h)) << "Hida l=" << ell << " k=" << k;
    }
  }
}

TEST(Families, FamilyEigenvaluesAtSplitPrimes) {
  // T_l g_Hida = a_l(g_Hida) g_Hida coefficientwise for l split.
  const auto& D = instance();
  for (std::int64_t ell : {2, 11}) {
    ASSERT_EQ(D.K->splitting(ell).kind, Splitting::Split);
    auto T = hecke_T(ell, D.hida.q);
    const GroupRingElem al = D.hida.q[ell];
    for (int n = 0; n <= T.cap(); ++n) EXPECT_EQ(T[n], al * D.hida.q[n]) << "l=" << ell << " n=" << n;
  }
}
