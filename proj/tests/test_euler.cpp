#include <gtest/gtest.h>

#include <complex>

#include "lamfam/euler.hpp"

using namespace lamfam;

namespace {

constexpr std::uint32_t P = 5;
constexpr int NP = 8;

ExactScalar rat(std::int64_t a, std::int64_t b = 1) { return ExactScalar(Rational(a, b)); }
ExactScalar pad(std::int64_t v) { return ExactScalar(PadicElem(P, NP, v)); }

LocalFactorInput input(FormType form, int k, ExactScalar a, int n, std::optional<LocalCharacter> eta = std::nullopt) {
  return {P, form, k, std::move(a), n, eta};
}

std::vector<LocalCharacter> all_primitive(int n) {
  std::vector<LocalCharacter> out;
  for (std::int64_t j = 0; j < 24; ++j)
    for (std::uint32_t b0 = 0; b0 < P; ++b0)
      for (std::uint32_t b1 = 0; b1 < P; ++b1) {
        LocalCharacter c{P, j, b0, b1};
        if (c.level() == n) out.push_back(c);
      }
  return out;
}

std::vector<LocalCharacter> trivial_on_qp(int n) {
  std::vector<LocalCharacter> out;
  for (const auto& c : all_primitive(n))
    if (c.trivial_on_qp()) out.push_back(c);
  return out;
}

// Gauss sum in C, enumerating u = teich(g)^a (1 + p x) rather than
// decomposing u.
std::complex<double> gauss_complex(const LocalCharacter& chi, int n) {
  const double tau = 6.283185307179586476925286766559;
  PadicElem g;
  for (std::uint64_t c = 1; c < P * P; ++c) {
    const PadicElem cand = PadicElem::from_residues(P, 1, c % P, c / P);
    bool full = true;
    for (std::uint64_t m = 1; m < P * P - 1; ++m)
      if ((P * P - 1) % m == 0 && cand.pow(m) == cand.one_like()) full = false;
    if (full) {
      g = cand;
      break;
    }
  }
  const PadicElem T = teichmuller(PadicElem::from_residues(P, n, g.c0(), g.c1()));
  const std::int64_t d = T.delta_square();
  std::complex<double> s = 0;
  const int xs = n >= 2 ? static_cast<int>(P * P) : 1;
  for (int a = 0; a < 24; ++a)
    for (int x = 0; x < xs; ++x) {
      const std::int64_t x0 = x % P, x1 = x / P;
      const PadicElem u = T.pow(static_cast<std::uint64_t>(a)) * (T.one_like() + PadicElem::from_residues(P, n, x0, x1).times_p(1));
      const double tr = 2.0 * static_cast<double>(chi.beta0 * x0 + d * chi.beta1 * x1);
      const double pn = n == 1 ? P : P * P;
      const double phase = static_cast<double>(chi.j_mod() * a) / 24.0 + tr / P + 2.0 * static_cast<double>(u.c0()) / pn;
      s += std::polar(1.0, tau * phase);
    }
  return s;
}

}  // namespace

TEST(UnbFactor, ExceptionalZeros) {
  EXPECT_TRUE(unb_factor(input(FormType::PNew, 2, rat(1), 0)).is_zero());
  EXPECT_TRUE(unb_factor(input(FormType::PNew, 2, rat(-1), 0)).is_zero());
  EXPECT_TRUE(unb_factor(input(FormType::POld, 2, rat(1), 0)).is_zero());
  EXPECT_TRUE(unb_factor(input(FormType::POld, 2, rat(-1), 0)).is_zero());
  EXPECT_FALSE(unb_factor(input(FormType::POld, 4, rat(1), 0)).is_zero());
}

TEST(UnbFactor, HandValues) {
  // (1 - 25)^2, 1 - 1/4, (1 - 25/4)^2
  EXPECT_EQ(unb_factor(input(FormType::POld, 4, rat(1), 0)), EulerValue(rat(576)));
  EXPECT_EQ(unb_factor(input(FormType::PNew, 2, rat(2), 0)), EulerValue(rat(3, 4)));
  EXPECT_EQ(unb_factor(input(FormType::POld, 4, pad(2), 0)), EulerValue(pad(441) * pad(16).inverse()));
  EXPECT_EQ(unb_factor(input(FormType::POld, 4, pad(2), 0)), EulerValue(rat(441, 16)));
}

TEST(UnbFactor, QuadraticLevelOne) {
  // j = 12: the quadratic character of F_25^x; its Gauss sum is -5.
  const LocalCharacter quad{P, 12, 0, 0};
  const RootNumber W = root_number(quad, 1);
  ASSERT_TRUE(W.sign.has_value());
  EXPECT_EQ(*W.sign, -1);
  EXPECT_EQ(unb_factor(input(FormType::POld, 2, rat(1), 1, quad)), EulerValue(rat(-5)));
  EXPECT_EQ(unb_factor(input(FormType::PNew, 2, rat(1), 1, quad)), EulerValue(rat(5, 1) * ExactScalar(Rational(*W.sign))));
}

TEST(UnbFactor, CaseMismatch) {
  EXPECT_THROW(unb_factor(input(FormType::PNew, 4, rat(1), 0)), CaseMismatch);
  EXPECT_THROW(unb_factor(input(FormType::POld, 2, rat(1), 1)), CaseMismatch);
  EXPECT_THROW(unb_factor(input(FormType::POld, 2, rat(1), 2, LocalCharacter{P, 4, 0, 0})), CaseMismatch);
  EXPECT_THROW(unb_factor(input(FormType::POld, 2, rat(1), 0, LocalCharacter{P, 4, 0, 0})), CaseMismatch);
  EXPECT_THROW(unb_factor(input(FormType::POld, 3, rat(1), 0)), DomainError);
}

TEST(RootNumber, RejectsImprimitive) {
  EXPECT_THROW(root_number(LocalCharacter{P, 0, 0, 0}, 1), NotPrimitive);
  EXPECT_THROW(root_number(LocalCharacter{P, 0, 0, 0}, 0), NotPrimitive);
  EXPECT_THROW(root_number(LocalCharacter{P, 4, 0, 0}, 2), NotPrimitive);
  EXPECT_THROW(root_number(LocalCharacter{P, 4, 0, 1}, 1), NotPrimitive);
  EXPECT_THROW(root_number(LocalCharacter{P, 4, 0, 1}, 3), Unsupported);
}

TEST(RootNumber, UnitModulusExhaustive) {
  int count = 0;
  for (int n : {1, 2})
    for (const auto& c : all_primitive(n)) {
      const RootNumber W = root_number(c, n);
      EXPECT_EQ(W.value * W.value.conj(), W.value.one_like()) << c.label();
      ++count;
    }
  EXPECT_EQ(count, 23 + 24 * 24);
}

TEST(RootNumber, InverseCharacterIdentity) {
  for (int n : {1, 2})
    for (const auto& c : all_primitive(n)) {
      const RootNumber W = root_number(c, n), Wi = root_number(c.inverse(), n);
      EXPECT_EQ(W.value * Wi.value, CycloRational(W.value.order(), Rational(c.at_minus_one()))) << c.label();
    }
}

TEST(RootNumber, ComplexOracle) {
  for (int n : {1, 2}) {
    const auto chars = all_primitive(n);
    for (std::size_t i = 0; i < chars.size(); i += 7) {
      const std::complex<double> exact = gauss_sum(chars[i], n).complex_value();
      const std::complex<double> oracle = gauss_complex(chars[i], n);
      EXPECT_NEAR(std::abs(exact - oracle), 0.0, 1e-8) << chars[i].label();
    }
  }
}

TEST(RootNumber, ParityLawLevelOne) {
  const auto chars = trivial_on_qp(1);
  ASSERT_EQ(chars.size(), P);
  for (const auto& a : chars)
    for (const auto& b : chars) {
      const RootNumber Wa = root_number(a, 1), Wb = root_number(b, 1);
      ASSERT_TRUE(Wa.sign && Wb.sign);
      const std::int64_t jdiff = (b.j_mod() - a.j_mod()) / (static_cast<std::int64_t>(P) - 1);
      EXPECT_EQ(*Wa.sign * *Wb.sign, jdiff % 2 == 0 ? 1 : -1) << a.label() << " vs " << b.label();
    }
}

// The alternative closed form W = eta^{-1}(alpha) with alpha = g^{(p+1)/2} a
// primitive 2(p-1)-th root of unity; here eta(alpha) = (-1)^{j/(p-1)}.
TEST(RootNumber, ClosedFormAtBothLevels) {
  for (int n : {1, 2})
    for (const auto& c : trivial_on_qp(n)) {
      const RootNumber W = root_number(c, n);
      ASSERT_TRUE(W.sign) << c.label();
      const std::int64_t e = c.j_mod() * ((P + 1) / 2) % 24;
      ASSERT_TRUE(e == 0 || e == 12);
      EXPECT_EQ(*W.sign, e == 0 ? 1 : -1) << c.label();
      EXPECT_EQ(W.padic_image(P, NP), PadicElem(P, NP, *W.sign));
    }
}

TEST(RootNumber, NonRationalHasNoPadicImage) {
  const RootNumber W = root_number(LocalCharacter{P, 1, 0, 0}, 1);
  EXPECT_FALSE(W.sign.has_value());
  EXPECT_THROW(W.padic_image(P, NP), Unsupported);
}

TEST(AnticycMultiplier, Table) {
  EXPECT_TRUE(anticyc_multiplier(P, 2, rat(1), 0, FormType::PNew).is_zero());
  EXPECT_TRUE(anticyc_multiplier(P, 2, rat(-1), 0, FormType::PNew).is_zero());
  EXPECT_EQ(anticyc_multiplier(P, 2, rat(1), 1, FormType::POld), EulerValue(rat(5)));
  EXPECT_EQ(anticyc_multiplier(P, 4, rat(-1), 2, FormType::POld), EulerValue(rat(5 * 5 * 25 * 25)));
  for (int k : {2, 4, 6})
    for (const auto& a : {rat(1), rat(-1), pad(2), pad(3)})
      EXPECT_EQ(anticyc_multiplier(P, k, a, 0, FormType::POld), unb_factor(input(FormType::POld, k, a, 0)));
}

TEST(CpConstant, GammaAndSign) {
  const CycloRational one(1, Rational(1));
  // k = 2, j = 0: sign (-1)^0, Gamma(1)^2 = 1, so c u_K^2 eps nu
  EXPECT_EQ(cp_constant(2, 0, 3, -7, 1, rat(1), one).value, EulerValue(rat(3)));
  // k = 4: delta_K^3 = d_K delta_K; j = 1 gives Gamma(3) Gamma(1) = 2 with sign +1
  EXPECT_EQ(cp_constant(4, 1, 1, -7, 1, rat(1), one).value, EulerValue(rat(2 * -7)));
  EXPECT_EQ(cp_constant(4, -1, 1, -7, 1, rat(1), one).value, EulerValue(rat(2 * -7)));
  // j = 0 flips the sign against j = +-1
  EXPECT_EQ(cp_constant(4, 0, 1, -7, 1, rat(1), one).value, EulerValue(rat(7)));
  // k = 6, j = 2: sign +1, Gamma(5) Gamma(1) = 24, d_K^2
  EXPECT_EQ(cp_constant(6, 2, 1, -7, 1, rat(1), one).value, EulerValue(rat(24 * 49)));
  // u_K = 3 for Q(sqrt -3), epsilon = -1
  EXPECT_EQ(cp_constant(2, 0, 1, -3, 3, rat(-1), one).value, EulerValue(rat(-9)));
  const CycloRational nu = CycloRational::zeta_power(3, 1);
  EXPECT_EQ(cp_constant(2, 0, 1, -3, 1, rat(1), nu).value, EulerValue(rat(1), nu));
  EXPECT_EQ(cp_constant(2, 0, 1, -3, 1, pad(7), one).value, EulerValue(pad(7)));
  EXPECT_THROW(cp_constant(4, 2, 1, -7, 1, rat(1), one), DomainError);
  EXPECT_THROW(cp_constant(2, -1, 1, -7, 1, rat(1), one), DomainError);
}

TEST(Consistency, DefaultGrid) {
  const auto rows = consistency_check(default_grid(P, NP));
  // n = 0: 3 weights x 5 a_p + 5 p-new; n = 1: 20 x 5 characters; n = 2: 20 x 4
  EXPECT_EQ(rows.size(), 200u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.ok);
    if (r.input.n > 0) EXPECT_EQ(r.local * EulerValue(ExactScalar(std::int64_t{1}), r.W->value), r.multiplier);
  }
}

TEST(Consistency, FullCharacterGrid) {
  ConsistencyGrid g = default_grid(P, NP);
  g.weights = {2};
  g.a_p = {rat(-1), pad(3)};
  g.characters = all_primitive(1);
  for (const auto& c : all_primitive(2)) g.characters.push_back(c);
  EXPECT_NO_THROW(consistency_check(g));
}

TEST(ExactScalar, Mixing) {
  EXPECT_EQ(rat(1, 2) * pad(2), pad(1));
  EXPECT_EQ(rat(3, 7), pad(3) * pad(7).inverse());
  EXPECT_THROW((void)(rat(1, 5) == pad(1)), DomainError);
  EXPECT_EQ(rat(2).pow(-2), rat(1, 4));
}
