#include <gtest/gtest.h>

#include <map>
#include <random>

#include "lamfam/characters.hpp"

using namespace lamfam;

namespace {

struct Default {
  std::shared_ptr<const QuadField> K = std::make_shared<const QuadField>(7);
  std::shared_ptr<const RayContext> ctx = make_ray_context(K, K->principal({5, 0}));
};

// All characters of G trivial on the integer ideals and of order dividing 2.
std::vector<HeckeChar> quadratic_ring_class_characters(const std::shared_ptr<const RayContext>& ctx) {
  std::vector<HeckeChar> out;
  const auto& S = ctx->G->structure();
  for (const auto& e : S.elements()) {
    HeckeChar chi(ctx, e);
    if (chi.is_trivial() || !chi.pow(2).is_trivial()) continue;
    bool ring = true;
    for (std::int64_t n = 1; n < ctx->G->modulus().n1 && ring; ++n)
      if (std::gcd(n, ctx->G->modulus().n1) == 1 && chi.central_exponent(n) != 0) ring = false;
    if (ring) out.push_back(chi);
  }
  return out;
}

}  // namespace

TEST(CyclotomicRing, BasicIdentities) {
  auto z3 = CycloInt::zeta_power(3, 1);
  EXPECT_EQ(z3 + z3 * z3, CycloInt(3, -1));
  EXPECT_EQ(z3.conj(), z3 * z3);
  auto z600 = CycloInt::zeta_power(600, 7);
  EXPECT_EQ(z600 * z600.conj(), CycloInt(600, 1));
  EXPECT_EQ(CycloInt::zeta_power(600, 600), CycloInt(600, 1));
  EXPECT_EQ(z3.lift(600), CycloInt::zeta_power(600, 200));
  // sum of all primitive 5th roots of unity is -1
  CycloInt s(5);
  for (int i = 1; i < 5; ++i) s += CycloInt::zeta_power(5, i);
  EXPECT_EQ(s, CycloInt(5, -1));
  EXPECT_NEAR(std::abs(z600.complex_value() - std::polar(1.0, 2 * M_PI * 7 / 600)), 0.0, 1e-12);
}

TEST(HeckeChar, DefaultInstanceStructure) {
  Default D;
  EXPECT_EQ(D.ctx->G->order(), 12);
  HeckeChar eta(D.ctx, {1});
  EXPECT_EQ(eta.order(), 12);
  EXPECT_EQ(eta.conductor(), D.K->principal({5, 0}));
  EXPECT_TRUE(differs_from_conjugate(eta));
  // conjugation is Frobenius on (O_K/5)^x / {+-1}, multiplication by 5 on Z/12
  EXPECT_EQ(eta.conjugate(), eta.pow(5));
  HeckeChar eta3(D.ctx, {3});
  EXPECT_FALSE(differs_from_conjugate(eta3));
  EXPECT_EQ(HeckeChar::trivial(D.ctx).conductor(), D.K->unit_ideal());
}

TEST(HeckeChar, ConjugateMatchesConjugateIdeals) {
  for (std::int64_t d : {7, 23}) {
    auto K = std::make_shared<const QuadField>(d);
    auto ctx = make_ray_context(K, K->principal({15, 0}));
    const auto& S = ctx->G->structure();
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<std::int64_t> e;
      for (auto o : S.orders()) e.push_back(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(o)));
      HeckeChar eta(ctx, e);
      HeckeChar sig = eta.conjugate();
      for (const auto& I : K->enumerate_ideals(120, ctx->G->modulus())) EXPECT_EQ(sig.exponent(I), eta.exponent(K->conj(I)));
    }
  }
}

TEST(HeckeChar, ConjugationSwapsSplitPrimes) {
  auto K = std::make_shared<const QuadField>(23);
  auto ctx = make_ray_context(K, K->unit_ideal());
  HeckeChar eta(ctx, {1});
  auto ps = K->splitting(2).primes;
  EXPECT_EQ(eta.conjugate().exponent(ps[0]), eta.exponent(ps[1]));
  EXPECT_EQ(ctx->G->class_of(ps[1]), ctx->G->structure().negate(ctx->G->class_of(ps[0])));
}

TEST(HeckeChar, ConductorMatchesResidueOracle) {
  // eta factors through Cl(5) iff eta((alpha)) only depends on alpha mod 5
  auto K = std::make_shared<const QuadField>(7);
  auto ctx = make_ray_context(K, K->principal({25, 0}));
  EXPECT_EQ(ctx->G->order(), 300);
  const auto& S = ctx->G->structure();
  int checked = 0;
  for (const auto& e : S.elements()) {
    if (++checked % 7 != 0) continue;  // a spread of characters
    HeckeChar eta(ctx, e);
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> by_residue;
    bool through5 = true;
    for (std::int64_t x = -12; x <= 12; ++x)
      for (std::int64_t y = -12; y <= 12; ++y) {
        if ((x + 5 * 1000) % 5 == 0 && (y + 5 * 1000) % 5 == 0) continue;
        QuadInt a{x, y};
        if (K->norm(a) % 5 == 0) continue;
        auto key = std::make_pair(detail::floor_mod_i64(x, 5), detail::floor_mod_i64(y, 5));
        auto v = eta.exponent(K->principal(a));
        // alpha and -alpha give the same ideal, so key on the pair up to sign
        auto neg = std::make_pair(detail::floor_mod_i64(-x, 5), detail::floor_mod_i64(-y, 5));
        auto k = std::min(key, neg);
        auto it = by_residue.find(k);
        if (it == by_residue.end()) by_residue.emplace(k, v);
        else if (it->second != v) through5 = false;
      }
    const IdealRep f = eta.conductor();
    if (eta.is_trivial()) EXPECT_TRUE(f.is_unit());
    else if (through5) EXPECT_EQ(f, K->principal({5, 0}));
    else EXPECT_EQ(f, K->principal({25, 0}));
  }
}

TEST(LambdaChar, PrincipalOneUnitsMapToThemselves) {
  auto K = std::make_shared<const QuadField>(7);
  LambdaChar lam(K, 5, 8);
  for (std::int64_t x = -3; x <= 3; ++x)
    for (std::int64_t y = -3; y <= 3; ++y) {
      QuadInt alpha{1 + 5 * x, 5 * y};
      EXPECT_EQ(lam.avatar(K->principal(alpha)), K->embed(alpha, 5, 8));
    }
  EXPECT_EQ(lam.s(K->principal({6, 0})), PadicElem(5, 8, 1));
  EXPECT_EQ(lam.s(K->unit_ideal()), PadicElem(5, 8, 0));
  EXPECT_THROW(lam.avatar(K->principal({5, 0})), NotCoprime);
  EXPECT_THROW(LambdaChar(K, 2, 4), ValidationFailed);
  EXPECT_THROW(LambdaChar(K, 7, 4), ValidationFailed);
}

TEST(LambdaChar, HomomorphismAndNormIdentity) {
  for (std::int64_t d : {7, 23}) {
    auto K = std::make_shared<const QuadField>(d);
    LambdaChar lam(K, 5, 8);
    auto ideals = K->enumerate_ideals(80, K->principal({5, 0}));
    std::mt19937_64 rng(32);
    for (int it = 0; it < 60; ++it) {
      const auto& I = ideals[rng() % ideals.size()];
      const auto& J = ideals[rng() % ideals.size()];
      EXPECT_EQ(lam.avatar(K->mul(I, J)), lam.avatar(I) * lam.avatar(J));
      EXPECT_EQ(lam.s(K->mul(I, J)), lam.s(I) + lam.s(J));
      EXPECT_EQ(lam.avatar(I) * lam.avatar(K->conj(I)), one_unit_part(PadicElem(5, 8, I.norm())));
      // p^a s(a) integral with a = 0
      EXPECT_GE(lam.s(I).valuation(), 0);
    }
  }
}

TEST(LambdaChar, UnsupportedWhenPDividesClassNumber) {
  auto K = std::make_shared<const QuadField>(47);  // h = 5, 5 inert in Q(sqrt(-47))
  ASSERT_EQ(K->splitting(5).kind, Splitting::Inert);
  EXPECT_THROW(LambdaChar(K, 5, 4), Unsupported);
}

TEST(EtaK, WeightOneAndMultiplicativity) {
  Default D;
  LambdaChar lam(D.K, 5, 8);
  HeckeChar eta(D.ctx, {1});
  auto ideals = D.K->enumerate_ideals(100, D.ctx->G->modulus());
  std::mt19937_64 rng(33);
  for (int it = 0; it < 40; ++it) {
    const auto& I = ideals[rng() % ideals.size()];
    const auto& J = ideals[rng() % ideals.size()];
    EXPECT_EQ(lam.eta_k(eta, 1, I), eta.padic(I, 5, 8));
    for (int k : {2, 6, 21}) EXPECT_EQ(lam.eta_k(eta, k, D.K->mul(I, J)), lam.eta_k(eta, k, I) * lam.eta_k(eta, k, J));
  }
  EXPECT_THROW(lam.eta_k(eta, 2, D.K->principal({5, 0})), NotCoprime);
}

TEST(EtaK, PadicValuesAreRootsOfUnity) {
  Default D;
  HeckeChar eta(D.ctx, {1});
  for (const auto& I : D.K->enumerate_ideals(60, D.ctx->G->modulus())) {
    PadicElem v = eta.padic(I, 5, 8);
    EXPECT_EQ(v.pow(12), v.one_like());
    EXPECT_EQ(v, teichmuller(v));
  }
}

TEST(TwistedLevel, TrivialTwistGivesConductorLevel) {
  Default D;
  HeckeChar eta(D.ctx, {1});
  auto t = twisted_level(eta, 5, FiniteTwist{});
  EXPECT_EQ(t.eta_level, 1);
  EXPECT_EQ(t.twisted_level, 1);
  EXPECT_EQ(t.bump(), 0);
  auto t0 = twisted_level(HeckeChar::trivial(D.ctx), 5, FiniteTwist{});
  EXPECT_EQ(t0.twisted_level, 0);
}

TEST(TwistedLevel, FinitePTwistRaisesLevel) {
  // eta has order prime to p, so the product's level is max(eta level, m + 1)
  Default D;
  HeckeChar eta(D.ctx, {1});
  for (int m : {1, 2}) {
    for (auto ex : std::vector<std::vector<std::int64_t>>{{1, 0}, {0, 1}, {2, 3}}) {
      FiniteTwist eps;
      eps.level = m;
      eps.exponents = ex;
      auto t = twisted_level(eta, 5, eps);
      EXPECT_EQ(t.twisted_level, std::max(1, m + 1));
      EXPECT_EQ(t.bump(), m);
    }
  }
}

TEST(PhiPsiSplit, TowerAtLevelTwo) {
  auto K = std::make_shared<const QuadField>(7);
  auto ctx = make_ray_context(K, K->principal({25, 0}));
  LambdaChar lam(K, 5, 8);
  HeckeChar eta1(ctx, {1, 1});
  // eta2 = eta1^{-1}: phi trivial, psi = eta1 / eta1^sigma
  PhiPsiSplit S(eta1, eta1.inverse(), lam);
  EXPECT_EQ(S.r(), 2);
  EXPECT_EQ(S.c(), 1);
  EXPECT_EQ(S.gamma_minus_order(), 5);
  EXPECT_TRUE(S.phi().is_trivial());
  EXPECT_EQ(S.psi(), eta1 * eta1.conjugate().inverse());
  EXPECT_TRUE(S.phi_conductor_prime_to_p());
  EXPECT_TRUE(S.phi_quadratic());

  auto ideals = K->enumerate_ideals(120, ctx->G->modulus());
  std::mt19937_64 rng(34);
  for (int it = 0; it < 60; ++it) {
    const auto& I = ideals[rng() % ideals.size()];
    const auto& J = ideals[rng() % ideals.size()];
    EXPECT_EQ(S.pi_minus(K->mul(I, J)), (S.pi_minus(I) + S.pi_minus(J)) % 5);
    for (const HeckeChar* chi : {&S.phi(), &S.psi()}) {
      const auto M = chi->value_order();
      EXPECT_EQ((S.t_value(*chi, I) + S.minus_value(*chi, I)) % M, chi->exponent(I));
      EXPECT_EQ(S.t_value(*chi, K->mul(I, J)), (S.t_value(*chi, I) + S.t_value(*chi, J)) % M);
    }
  }
  for (std::int64_t n : {2, 3, 7, 11, 13}) EXPECT_EQ(S.pi_minus(K->principal({n, 0})), 0);
}

TEST(PhiPsiSplit, DegenerateAndInvalidCases) {
  auto K = std::make_shared<const QuadField>(7);
  auto ctx = make_ray_context(K, K->principal({25, 0}));
  LambdaChar lam(K, 5, 8);
  HeckeChar eta1(ctx, {1, 1});
  // eta2 = eta1^{-sigma}: psi trivial, flagged
  PhiPsiSplit S(eta1, eta1.conjugate().inverse(), lam);
  EXPECT_TRUE(S.psi_trivial());
  EXPECT_FALSE(S.valid());
  EXPECT_FALSE(S.psi_minus_nontrivial());
  // eta2 = eta1 is not self-dual unless the central character is quadratic
  bool central_nonquadratic = false;
  for (std::int64_t n = 1; n < 25; ++n)
    if (n % 5 != 0 && (2 * eta1.central_exponent(n)) % eta1.value_order() != 0) central_nonquadratic = true;
  ASSERT_TRUE(central_nonquadratic);
  EXPECT_THROW(PhiPsiSplit(eta1, eta1, lam), NotSelfDual);
}

TEST(PhiPsiSplit, QuadraticPhiDetected) {
  auto K = std::make_shared<const QuadField>(7);
  auto ctx = make_ray_context(K, K->principal({25, 0}));
  LambdaChar lam(K, 5, 8);
  HeckeChar eta1(ctx, {1, 1});
  auto quads = quadratic_ring_class_characters(ctx);
  ASSERT_FALSE(quads.empty());
  for (const auto& chi : quads) {
    PhiPsiSplit S(eta1, eta1.inverse() * chi, lam);
    EXPECT_TRUE(S.phi_quadratic());
    EXPECT_EQ(S.phi(), chi);
    // a quadratic character has no Gamma^- part (Gamma^- has odd order)
    EXPECT_EQ(S.minus_exponent(S.phi()), 0);
  }
}
