#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lamfam/characters.hpp"
#include "lamfam/parallel.hpp"
#include "lamfam/qexp.hpp"

namespace lamfam {

/// Level data of the theta series of a primitive eta of conductor c:
/// N_g = d_K N(c), N_g^o = N_g / p^{2r} with p^r exactly dividing c.
struct ThetaLevel {
  std::int64_t level = 1;
  std::int64_t tame_level = 1;
  int r = 0;
};

inline ThetaLevel theta_level(const HeckeChar& eta, std::uint32_t p) {
  const QuadField& K = eta.field();
  const IdealRep f = eta.conductor();
  ThetaLevel L;
  L.level = K.d() * f.norm();
  const IdealRep pO = K.principal({static_cast<std::int64_t>(p), 0});
  for (IdealRep g = f; !g.is_unit() && K.divides(pO, g); g = K.divide(g, pO)) ++L.r;
  L.tame_level = L.level / static_cast<std::int64_t>(detail::checked_pow(p, 2 * L.r));
  return L;
}

/// Rejects characters whose theta series is not a cuspidal newform of the
/// expected level: eta must be primitive and differ from its conjugate.
inline void validate_theta_character(const HeckeChar& eta) {
  if (eta.conductor() != eta.group().modulus())
    throw NotPrimitive("eta has conductor " + eta.conductor().to_string() + " below its modulus " + eta.group().modulus().to_string());
  if (!differs_from_conjugate(eta)) throw ValidationFailed("eta equals its conjugate; the theta series would be Eisenstein");
}

/// Ideals entering the theta series up to norm Q.
inline std::vector<IdealRep> theta_ideals(const HeckeChar& eta, int Q) {
  return eta.field().enumerate_ideals(Q, eta.group().modulus());
}

/// chi_g(l) = eps_K(l) eta(l O_K) as an exact cyclotomic number; 0 for l | N_g.
inline CycloInt tame_character_exact(const HeckeChar& eta, std::int64_t ell) {
  const QuadField& K = eta.field();
  const int M = static_cast<int>(eta.value_order());
  const IdealRep lO = K.principal({ell, 0});
  if (!K.coprime(lO, eta.group().modulus()) || K.d() % ell == 0) return CycloInt(M);
  return CycloInt::zeta_power(M, eta.exponent(lO)) * static_cast<std::int64_t>(K.kronecker(ell));
}

/// The same through zeta_M -> root_of_unity(p, N, M).
inline PadicElem tame_character_padic(const HeckeChar& eta, std::int64_t ell, std::uint32_t p, int N) {
  const QuadField& K = eta.field();
  const IdealRep lO = K.principal({ell, 0});
  if (!K.coprime(lO, eta.group().modulus()) || K.d() % ell == 0) return PadicElem(p, N, 0);
  return eta.padic(lO, p, N) * PadicElem(p, N, K.kronecker(ell));
}

/// <l> = l omega^{-1}(l) in 1 + pZ_p.
inline PadicElem cyclotomic_unit(std::uint32_t p, int N, std::int64_t ell) { return one_unit_part(PadicElem(p, N, ell)); }

// ---- classical theta series ----

/// Weight-one theta series with exact values in Z[zeta_M], summed over the
/// given ideals (any superset of those of norm <= Q prime to the modulus).
inline QExpansion<CycloInt> theta_exact(const HeckeChar& eta, int Q, const std::vector<IdealRep>& ideals) {
  validate_theta_character(eta);
  const QuadField& K = eta.field();
  const int M = static_cast<int>(eta.value_order());
  std::vector<std::int64_t> zero(static_cast<std::size_t>(M), 0);
  std::vector<std::vector<std::int64_t>> counts(static_cast<std::size_t>(Q) + 1, zero);
  for (const auto& I : ideals) {
    if (I.norm() > Q || !K.coprime(I, eta.group().modulus())) continue;
    ++counts[static_cast<std::size_t>(I.norm())][static_cast<std::size_t>(eta.exponent(I))];
  }
  std::vector<CycloInt> a;
  for (const auto& c : counts) a.push_back(CycloInt::from_exponent_counts(M, c));
  QExpansion<CycloInt> g(std::move(a), eta.field().d() * eta.conductor().norm());
  g.set_weight(1);
  g.set_character([eta](std::int64_t ell) { return tame_character_exact(eta, ell); });
  return g;
}

inline QExpansion<CycloInt> theta_exact(const HeckeChar& eta, int Q) { return theta_exact(eta, Q, theta_ideals(eta, Q)); }

/// g_k = sum eta_k(a) q^{N(a)} over Z_{p^2} mod p^N. The T_l term is
/// eps_K(l) eta(l O_K) <l>^{k-1} = chi_k(l) l^{k-1}, chi_k = chi_g omega^{1-k}.
inline QExpansion<PadicElem> theta_classical(const HeckeChar& eta, const LambdaChar& lam, int k, int Q, int threads = 1) {
  validate_theta_character(eta);
  const std::uint32_t p = lam.prime();
  const int N = lam.precision();
  auto ideals = theta_ideals(eta, Q);
  std::vector<PadicElem> vals(ideals.size());
  parallel_for(ideals.size(), threads, [&](std::size_t i) { vals[i] = lam.eta_k(eta, k, ideals[i]); });
  auto g = QExpansion<PadicElem>::zero(PadicElem(p, N), Q, theta_level(eta, p).level);
  for (std::size_t i = 0; i < ideals.size(); ++i) g.add_to(ideals[i].norm(), vals[i]);
  g.set_weight(k);
  g.set_character([eta, p, N, k](std::int64_t ell) {
    return tame_character_padic(eta, ell, p, N) * cyclotomic_unit(p, N, ell).pow_signed(k - 1);
  });
  return g;
}

// ---- families ----

enum class FamilyKind { Col, Hida };

template <class C>
struct ThetaFamily {
  FamilyKind kind;
  QExpansion<C> q;
  ThetaLevel level;
  HeckeChar eta;
  std::shared_ptr<const LambdaChar> lambda;
  /// Hida only: coordinates on W_K used for the group elements.
  std::shared_ptr<const UnitCoordinates> coords;
};

using ColFamily = ThetaFamily<ColSeries>;
using HidaFamily = ThetaFamily<GroupRingElem>;

/// Degree cap D for Lambda_Col so that evaluation at the classical points
/// certifies N digits: (D+1)(p-2) >= N(p-1) in gamma-units.
inline int col_series_cap(std::uint32_t p, int N) {
  const int e = static_cast<int>(p) - 1, v = static_cast<int>(p) - 2;
  if (v == 0) return 2 * N - 1;
  return (N * e + v - 1) / v - 1;
}

inline LayoutPtr col_layout(int D, int a) { return make_layout({"X"}, {D}, -1, RingKind::LambdaCol, a); }

/// (1 + (T - p)/(p + 1))^s in Lambda_Col with T - p = p^a gamma X and
/// s' = p^a s: coefficient of X^n is C(s, n) (p^a gamma)^n (1+p)^{-n}.
inline ColSeries col_power(const PadicElem& s_scaled, int a, const LayoutPtr& L) {
  const int D = L->caps()[0];
  auto b = binom_series(s_scaled, a, D);
  const PadicElem inv = PadicElem(s_scaled.prime(), s_scaled.precision(), 1 + static_cast<std::int64_t>(s_scaled.prime())).inverse();
  ColSeries f(L, RampedElem(s_scaled.zero_like()));
  PadicElem w = s_scaled.one_like();
  for (int n = 0; n <= D; ++n) {
    f.set_coeff({n}, b[static_cast<std::size_t>(n)] * w);
    w *= inv;
  }
  f.mark_inexact();
  return f;
}

/// g_Col = sum_a eta(a) (1 + (T-p)/(p+1))^{s(a)} q^{N(a)}.
inline ColFamily build_g_col(const HeckeChar& eta, std::shared_ptr<const LambdaChar> lam, int Q, int D = -1, int threads = 1) {
  validate_theta_character(eta);
  const std::uint32_t p = lam->prime();
  const int N = lam->precision();
  const int a = lam->a();
  if (D < 0) D = col_series_cap(p, N);
  const LayoutPtr L = col_layout(D, a);
  const ColSeries zero(L, RampedElem(PadicElem(p, N)));
  auto ideals = theta_ideals(eta, Q);
  std::vector<ColSeries> terms(ideals.size());
  parallel_for(ideals.size(), threads, [&](std::size_t i) {
    const PadicElem s = lam->s(ideals[i]).times_p(a).with_precision(N);
    terms[i] = col_power(s, a, L).scaled(eta.padic(ideals[i], p, N));
  });
  std::vector<ColSeries> coeffs(static_cast<std::size_t>(Q) + 1, zero);
  for (std::size_t i = 0; i < ideals.size(); ++i) coeffs[static_cast<std::size_t>(ideals[i].norm())] += terms[i];
  ColFamily F{FamilyKind::Col, QExpansion<ColSeries>(std::move(coeffs)), theta_level(eta, p), eta, lam, nullptr};
  F.q.set_level(F.level.level);
  const PadicElem logu = plog(PadicElem(p, N + 2, 1 + static_cast<std::int64_t>(p)));
  F.q.set_character([eta, p, N, a, L, logu](std::int64_t ell) {
    const PadicElem s = plog(cyclotomic_unit(p, N + 2, ell)).divide_by_p(1) * logu.divide_by_p(1).inverse();
    return col_power(s.times_p(a).with_precision(N), a, L).scaled(tame_character_padic(eta, ell, p, N));
  });
  return F;
}

/// g_Hida = sum_a eta(a) <lambda(a)>^{-1} [<lambda(a)>] q^{N(a)} in the
/// group algebra of W_K (rank-2 coordinates).
inline HidaFamily build_g_hida(const HeckeChar& eta, std::shared_ptr<const LambdaChar> lam, int Q, int extra = 2, int threads = 1) {
  validate_theta_character(eta);
  const std::uint32_t p = lam->prime();
  const int N = lam->precision();
  auto uc = std::make_shared<const UnitCoordinates>(p, N, 2, extra);
  const PadicElem zp(p, N);
  const GroupRingElem zero(p, 2, uc->coord_precision(), zp);
  auto ideals = theta_ideals(eta, Q);
  std::vector<GroupRingElem> terms(ideals.size());
  parallel_for(ideals.size(), threads, [&](std::size_t i) {
    const PadicElem u = lam->avatar(ideals[i], uc->input_precision());
    const PadicElem coef = eta.padic(ideals[i], p, N) * u.with_precision(N).inverse();
    terms[i] = GroupRingElem::group_like(uc->coords(u), coef);
  });
  std::vector<GroupRingElem> coeffs(static_cast<std::size_t>(Q) + 1, zero);
  for (std::size_t i = 0; i < ideals.size(); ++i) coeffs[static_cast<std::size_t>(ideals[i].norm())] += terms[i];
  HidaFamily F{FamilyKind::Hida, QExpansion<GroupRingElem>(std::move(coeffs)), theta_level(eta, p), eta, lam, uc};
  F.q.set_level(F.level.level);
  F.q.set_character([eta, p, N, uc](std::int64_t ell) {
    const PadicElem u = cyclotomic_unit(p, uc->input_precision(), ell);
    const PadicElem coef = tame_character_padic(eta, ell, p, N) * u.with_precision(N).inverse();
    return GroupRingElem::group_like(uc->coords(u), coef);
  });
  return F;
}

// ---- specialization ----

/// Coefficient-wise specialization of g_Col at an arithmetic weight
/// (k = 1 mod p^a); the values are certified unramified.
inline QExpansion<PadicElem> specialize_family(const ColFamily& F, const Weight& w) {
  if (w.kind != Weight::Kind::Arithmetic || !w.eps.trivial()) throw DomainError("g_Col specializes at untwisted arithmetic weights only");
  const std::uint32_t p = F.lambda->prime();
  const int N = F.lambda->precision();
  auto g = F.q.map([&](const ColSeries& c) {
    RampedElem v = specialize(c, w);
    if (v.precision() < N) throw PrecisionLoss("series cap certifies only " + std::to_string(v.precision()) + " of " + std::to_string(N) + " digits");
    if (!v.is_unramified()) throw InconsistencyFound("specialization left a ramified component");
    return v.to_unramified();
  });
  g.set_weight(w.k);
  const HeckeChar eta = F.eta;
  const int k = w.k;
  g.set_character([eta, p, N, k](std::int64_t ell) {
    return tame_character_padic(eta, ell, p, N) * cyclotomic_unit(p, N, ell).pow_signed(k - 1);
  });
  return g;
}

/// Specialization of g_Hida at [u] -> u^k.
inline QExpansion<PadicElem> specialize_family(const HidaFamily& F, const Weight& w) {
  if (!w.eps.trivial()) throw DomainError("twisted weights need specialize_family_twisted");
  const CoordinateCharacter chi = weight_character(Weight::group(w.k), *F.coords);
  const std::uint32_t p = F.lambda->prime();
  const int N = F.lambda->precision();
  auto g = F.q.map([&](const GroupRingElem& c) { return c.specialize(chi).with_precision(N); });
  g.set_weight(w.k);
  const HeckeChar eta = F.eta;
  const int k = w.k;
  g.set_character([eta, p, N, k](std::int64_t ell) {
    return tame_character_padic(eta, ell, p, N) * cyclotomic_unit(p, N, ell).pow_signed(k - 1);
  });
  return g;
}

/// Specialization at [u] -> eps(u) u^k with eps of finite order on W_K,
/// together with the p-level of the twisted character computed from its
/// conductor.
struct TwistedSpecialization {
  QExpansion<CycloPadic> q;
  TwistedLevel level;
};

inline TwistedSpecialization specialize_family_twisted(const HidaFamily& F, const Weight& w) {
  const CoordinateCharacter chi = weight_character(w, *F.coords);
  TwistedSpecialization out{F.q.map([&](const GroupRingElem& c) { return c.specialize_twisted(chi); }),
                            twisted_level(F.eta, F.lambda->prime(), w.eps)};
  out.q.set_weight(w.k);
  return out;
}

/// U_p(F) = 0 with the p-order of the input checked on the truncation.
template <class C>
bool killed_by_U(const QExpansion<C>& xi, std::int64_t p) {
  return hecke_U(p, xi).is_zero();
}

}  // namespace lamfam
