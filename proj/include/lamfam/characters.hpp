#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lamfam/cyclotomic.hpp"
#include "lamfam/group_ring.hpp"
#include "lamfam/ray_class.hpp"

namespace lamfam {

/// A ray class group bundled with its field and the action of complex
/// conjugation on classes (modulus must be conjugation-stable).
struct RayContext {
  std::shared_ptr<const QuadField> K;
  std::shared_ptr<const RayClassGroup> G;
  IntMatrix conj_images;  // row t: class of conj(generator t)
  std::vector<IdealRep> generator_ideals;
};

inline std::shared_ptr<const RayContext> make_ray_context(std::shared_ptr<const QuadField> K, const IdealRep& modulus) {
  auto ctx = std::make_shared<RayContext>();
  ctx->K = K;
  ctx->G = std::make_shared<const RayClassGroup>(*K, modulus);
  if (K->conj(modulus) != modulus) throw Unsupported("modulus " + modulus.to_string() + " is not stable under conjugation");
  const auto& S = ctx->G->structure();
  for (std::size_t t = 0; t < S.rank(); ++t) {
    std::vector<std::int64_t> e(S.rank(), 0);
    e[t] = 1;
    IdealRep I = ctx->G->ideal_in_class(e);
    ctx->generator_ideals.push_back(I);
    ctx->conj_images.push_back(ctx->G->class_of(K->conj(I)));
  }
  return ctx;
}

/// Finite-order character of Cl_K(m). Values are powers of zeta_M with M the
/// exponent of the group; weights_[t] is the zeta_M-exponent on generator t.
class HeckeChar {
 public:
  HeckeChar() = default;

  /// generator_images[t] = a_t means eta(g_t) = zeta_{ord t}^{a_t}.
  HeckeChar(std::shared_ptr<const RayContext> ctx, const std::vector<std::int64_t>& generator_images) : ctx_(std::move(ctx)) {
    const auto& S = ctx_->G->structure();
    if (generator_images.size() != S.rank())
      throw ValidationFailed("character needs " + std::to_string(S.rank()) + " generator images, got " + std::to_string(generator_images.size()));
    M_ = S.exponent();
    for (std::size_t t = 0; t < S.rank(); ++t)
      weights_.push_back(detail::floor_mod_i64(generator_images[t] * (M_ / S.orders()[t]), M_));
  }

  static HeckeChar trivial(std::shared_ptr<const RayContext> ctx) {
    return HeckeChar(ctx, std::vector<std::int64_t>(ctx->G->structure().rank(), 0));
  }

  const RayContext& context() const { return *ctx_; }
  const std::shared_ptr<const RayContext>& context_ptr() const { return ctx_; }
  const RayClassGroup& group() const { return *ctx_->G; }
  const QuadField& field() const { return *ctx_->K; }
  std::int64_t value_order() const { return M_; }
  const std::vector<std::int64_t>& weights() const { return weights_; }

  /// Exponents relative to each generator order (the file format).
  std::vector<std::int64_t> generator_images() const {
    const auto& S = group().structure();
    std::vector<std::int64_t> r;
    for (std::size_t t = 0; t < S.rank(); ++t) r.push_back(weights_[t] / (M_ / S.orders()[t]));
    return r;
  }

  /// eta(cls) = zeta_M^{result}.
  std::int64_t exponent_of_class(const std::vector<std::int64_t>& cls) const {
    __int128 e = 0;
    for (std::size_t t = 0; t < cls.size(); ++t) e += static_cast<__int128>(cls[t]) * weights_[t];
    return detail::floor_mod_i64(static_cast<std::int64_t>(e % M_), M_);
  }
  std::int64_t exponent(const IdealRep& a) const { return exponent_of_class(group().class_of(a)); }

  CycloInt exact(const IdealRep& a) const { return CycloInt::zeta_power(static_cast<int>(M_), exponent(a)); }

  /// Image under zeta_M -> root_of_unity(p, N, M).
  PadicElem padic(const IdealRep& a, std::uint32_t p, int N) const {
    return root_of_unity(p, N, static_cast<std::uint64_t>(M_)).pow(static_cast<std::uint64_t>(exponent(a)));
  }

  bool is_trivial() const {
    for (auto w : weights_)
      if (w != 0) return false;
    return true;
  }

  /// Order of the character.
  std::int64_t order() const {
    std::int64_t g = M_;
    for (auto w : weights_) g = std::gcd(g, w);
    return M_ / g;
  }

  friend HeckeChar operator*(const HeckeChar& x, const HeckeChar& y) {
    x.check(y);
    HeckeChar r = x;
    for (std::size_t t = 0; t < r.weights_.size(); ++t) r.weights_[t] = (x.weights_[t] + y.weights_[t]) % x.M_;
    return r;
  }
  HeckeChar pow(std::int64_t e) const {
    HeckeChar r = *this;
    for (auto& w : r.weights_) w = detail::floor_mod_i64(static_cast<std::int64_t>(static_cast<__int128>(w) * e % M_), M_);
    return r;
  }
  HeckeChar inverse() const { return pow(-1); }

  /// eta^sigma(a) = eta(conj a).
  HeckeChar conjugate() const {
    HeckeChar r = *this;
    for (std::size_t t = 0; t < weights_.size(); ++t) r.weights_[t] = exponent_of_class(ctx_->conj_images[t]);
    return r;
  }

  friend bool operator==(const HeckeChar& x, const HeckeChar& y) { return x.ctx_ == y.ctx_ && x.weights_ == y.weights_; }
  friend bool operator!=(const HeckeChar& x, const HeckeChar& y) { return !(x == y); }

  /// eta((n)) for an integer n prime to the modulus.
  std::int64_t central_exponent(std::int64_t n) const { return exponent(field().principal({n, 0})); }

  /// Trivial on every (alpha) with alpha = 1 mod f (alpha prime to the modulus).
  bool factors_through(const IdealRep& f) const {
    const QuadField& K = field();
    const IdealRep& m = group().modulus();
    if (!K.divides(f, m)) throw DomainError(f.to_string() + " does not divide the modulus");
    // f/m has representatives x f1 + y f2 with x < a, y < c
    const std::int64_t a = m.n1 / f.n1, c = m.n2 / f.n2;
    const QuadInt f1{f.n1, 0}, f2{f.m, f.n2};
    for (std::int64_t y = 0; y < c; ++y)
      for (std::int64_t x = 0; x < a; ++x) {
        QuadInt alpha = K.add({1, 0}, K.add({x * f1.x, 0}, {y * f2.x, y * f2.y}));
        if (alpha.x == 0 && alpha.y == 0) continue;
        IdealRep A = K.principal(alpha);
        if (!K.coprime(A, m)) continue;
        if (exponent(A) != 0) return false;
      }
    return true;
  }

  /// Conductor: the smallest divisor of the modulus the character factors through.
  IdealRep conductor() const {
    const QuadField& K = field();
    IdealRep f = group().modulus();
    for (bool shrunk = true; shrunk;) {
      shrunk = false;
      for (const auto& [P, e] : K.factor(f)) {
        IdealRep g = K.divide(f, P);
        if (factors_through(g)) {
          f = g;
          shrunk = true;
          break;
        }
      }
    }
    return f;
  }

 private:
  void check(const HeckeChar& y) const {
    if (ctx_ != y.ctx_) throw DomainError("characters on different ray class groups");
  }

  std::shared_ptr<const RayContext> ctx_;
  std::int64_t M_ = 1;
  std::vector<std::int64_t> weights_;
};

/// eta differs from eta^sigma, checked on the enumerated ideals of norm <= nmax
/// as well as on generators.
inline bool differs_from_conjugate(const HeckeChar& eta, std::int64_t nmax = 200) {
  if (eta.conjugate() == eta) return false;
  const QuadField& K = eta.field();
  for (const auto& I : K.enumerate_ideals(nmax, eta.group().modulus()))
    if (eta.exponent(I) != eta.exponent(K.conj(I))) return true;
  return false;
}

/// The p-adic avatar data of lambda for p inert and prime to h_K:
/// <lambda(a)> is the unique element of 1 + pZ_{p^2} whose h-th power is <alpha>
/// when a^h = (alpha). On principal ideals (alpha), alpha = 1 mod p, it is alpha.
class LambdaChar {
 public:
  LambdaChar(std::shared_ptr<const QuadField> K, std::uint32_t p, int N) : K_(std::move(K)), p_(p), N_(N) {
    if (!detail::is_prime(p) || p < 3) throw ValidationFailed("p must be an odd prime");
    if (K_->splitting(p).kind != Splitting::Inert) throw ValidationFailed("p = " + std::to_string(p) + " is not inert in K");
    if (K_->class_number() % static_cast<std::int64_t>(p) == 0) throw Unsupported("p divides the class number; no preferred extension of lambda");
    pic_ = std::make_shared<const RayClassGroup>(*K_, K_->unit_ideal());
    logu_ = plog(PadicElem(p, N + 2, 1 + static_cast<std::int64_t>(p)));
  }

  const QuadField& field() const { return *K_; }
  std::uint32_t prime() const { return p_; }
  int precision() const { return N_; }
  /// p^a = #(Cl_K(pO_K) (x) Z_p); a = 0 under p not dividing h_K.
  int a() const { return 0; }

  PadicElem avatar(const IdealRep& I) const { return avatar(I, N_); }

  /// The same at another precision (used for coordinates needing guard digits).
  PadicElem avatar(const IdealRep& I, int prec) const {
    if (!K_->coprime(I, K_->principal({static_cast<std::int64_t>(p_), 0}))) throw NotCoprime(I.to_string() + " is not prime to p");
    // multiplicative, so work prime by prime to keep a^h small
    PadicElem r = PadicElem(p_, prec, 1);
    for (const auto& [P, e] : K_->factor(I)) r *= prime_avatar(P, prec).pow(static_cast<std::uint64_t>(e));
    return r;
  }

  /// s(a) = log <lambda(a)> / log(1+p).
  PadicElem s(const IdealRep& I) const {
    PadicElem L = plog(avatar(I, N_ + 2));
    return (L.divide_by_p(1) * logu_.divide_by_p(1).inverse()).with_precision(N_);
  }

  /// eta_k(a) = eta(a) <lambda(a)>^{k-1}.
  PadicElem eta_k(const HeckeChar& eta, int k, const IdealRep& I) const {
    return eta.padic(I, p_, N_) * avatar(I).pow_signed(k - 1);
  }

 private:
  PadicElem prime_avatar(const IdealRep& I, int prec) const {
    const auto cls = pic_->class_of(I);
    const std::int64_t h = pic_->structure().element_order(cls);
    QuadInt alpha;
    if (!K_->principal_generator(K_->pow(I, h), &alpha)) throw InconsistencyFound("a^h is not principal");
    PadicElem u = one_unit_part(K_->embed(alpha, p_, prec + 2));
    if (h == 1) return u.with_precision(prec);
    return pexp(plog(u) * u.scalar(h).inverse()).with_precision(prec);
  }

  std::shared_ptr<const QuadField> K_;
  std::uint32_t p_;
  int N_;
  std::shared_ptr<const RayClassGroup> pic_;
  PadicElem logu_;
};

/// Z_p-coordinate of the anticyclotomic part: log(u / conj u) / log(g) with
/// g = u2 / conj(u2), u2 = 1 + p delta.
inline PadicElem anticyclotomic_coordinate(const PadicElem& u) {
  const std::uint32_t p = u.prime();
  const int N = u.precision();
  PadicElem g = PadicElem(p, N, 1, p);
  PadicElem Lg = plog(g * g.conj().inverse());
  PadicElem Lu = plog(u * u.conj().inverse());
  PadicElem y1 = PadicElem::from_residues(p, Lu.precision(), Lu.c1(), 0);
  PadicElem yg = PadicElem::from_residues(p, Lg.precision(), Lg.c1(), 0);
  return y1.divide_by_p(1) * yg.divide_by_p(1).inverse();
}

/// Minimal p-power level n such that a -> eta((alpha)) eps(<alpha>) is trivial
/// on alpha = 1 mod c0 p^n, where eps is a finite-order character of W_K in
/// unit coordinates.
struct TwistedLevel {
  int eta_level;      // p-exponent of the conductor of eta
  int twisted_level;  // e(w, eta)
  int bump() const { return twisted_level - eta_level; }
};

inline TwistedLevel twisted_level(const HeckeChar& eta, std::uint32_t p, const FiniteTwist& eps, int max_level = 12) {
  const QuadField& K = eta.field();
  const IdealRep& m = eta.group().modulus();
  const IdealRep pO = K.principal({static_cast<std::int64_t>(p), 0});
  IdealRep c0 = m;
  while (!c0.is_unit() && K.divides(pO, c0)) c0 = K.divide(c0, pO);
  const IdealRep f = eta.conductor();
  TwistedLevel out{0, 0};
  for (IdealRep g = f; !g.is_unit() && K.divides(pO, g); g = K.divide(g, pO)) ++out.eta_level;
  const std::int64_t M = eta.value_order();
  const int mlev = eps.trivial() ? 0 : eps.level;
  const std::int64_t pm = static_cast<std::int64_t>(detail::checked_pow(p, mlev));
  const std::int64_t L = std::lcm(M, pm);
  const int Nc = max_level + mlev + 2;
  UnitCoordinates uc(p, Nc, 2);
  for (int n = 1; n <= max_level; ++n) {
    const std::int64_t pn = static_cast<std::int64_t>(detail::checked_pow(p, n));
    bool trivial = true;
    for (const QuadInt b : {QuadInt{1, 0}, QuadInt{0, 1}}) {
      QuadInt alpha = K.add({1, 0}, K.mul(QuadInt{c0.n1 * pn, 0}, b));
      __int128 e = static_cast<__int128>(eta.exponent(K.principal(alpha))) * (L / M);
      if (mlev > 0) {
        auto c = uc.coords(K.embed(alpha, p, uc.input_precision()));
        std::int64_t s = 0;
        for (std::size_t i = 0; i < 2; ++i) {
          std::int64_t ei = i < eps.exponents.size() ? eps.exponents[i] : 0;
          s += static_cast<std::int64_t>(c[i].c0() % static_cast<std::uint64_t>(pm)) * detail::floor_mod_i64(ei, pm) % pm;
        }
        e += static_cast<__int128>(s % pm) * (L / pm);
      }
      if (e % L != 0) trivial = false;
    }
    if (trivial) {
      out.twisted_level = n;
      if (out.eta_level == 0 && mlev == 0) out.twisted_level = 0;
      return out;
    }
  }
  throw NoConvergence("twisted level exceeds " + std::to_string(max_level));
}

/// The ring class characters phi = eta1 eta2 and psi = eta1 eta2^sigma on
/// Cl_K(c p^r), split along G = Delta_c x Gamma^- at level r via the
/// section gamma1 = [(alpha)], alpha = 1 mod c, pi^-(gamma1) = 1.
class PhiPsiSplit {
 public:
  PhiPsiSplit(const HeckeChar& eta1, const HeckeChar& eta2, const LambdaChar& lambda) : lambda_(&lambda) {
    const QuadField& K = eta1.field();
    const IdealRep& m = eta1.group().modulus();
    if (&eta1.context() != &eta2.context()) throw DomainError("eta1, eta2 must live on the same ray class group");
    p_ = lambda.prime();
    // modulus = c p^r O_K with c an integer prime to p
    std::int64_t n = m.n1;
    if (m.n2 != m.n1 || m.m != 0) throw ValidationFailed("conductor shape: modulus must be c p^r O_K with c an integer");
    r_ = 0;
    while (n % static_cast<std::int64_t>(p_) == 0) {
      n /= static_cast<std::int64_t>(p_);
      ++r_;
    }
    c_ = n;
    // self-duality on central characters
    for (std::int64_t t = 1; t < m.n1; ++t) {
      if (std::gcd(t, m.n1) != 1) continue;
      if ((eta1.central_exponent(t) + eta2.central_exponent(t)) % eta1.value_order() != 0)
        throw NotSelfDual("eta1((" + std::to_string(t) + ")) eta2((" + std::to_string(t) + ")) != 1");
    }
    phi_ = eta1 * eta2;
    psi_ = eta1 * eta2.conjugate();
    level_ = r_ >= 1 ? static_cast<std::int64_t>(detail::checked_pow(p_, r_ - 1)) : 1;
    if (level_ > 1) {
      const std::int64_t pc = c_ * static_cast<std::int64_t>(p_);
      section_ = QuadInt{1 - pc, 2 * pc};
      const std::int64_t u = pi_minus_of(K.principal(section_));
      if (std::gcd(u, static_cast<std::int64_t>(p_)) != 1) throw InconsistencyFound("section element has non-unit pi^-");
      j_ = static_cast<std::int64_t>(detail::invmod(static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(level_)));
    }
  }

  const HeckeChar& phi() const { return phi_; }
  const HeckeChar& psi() const { return psi_; }
  int r() const { return r_; }
  std::int64_t c() const { return c_; }
  /// #Gamma^- at level r.
  std::int64_t gamma_minus_order() const { return level_; }

  /// pi^-(a) in Z / p^{r-1}.
  std::int64_t pi_minus(const IdealRep& a) const { return level_ == 1 ? 0 : pi_minus_of(a); }

  /// zeta_M-exponent of chi(gamma1), gamma1 = section^j.
  std::int64_t minus_exponent(const HeckeChar& chi) const {
    if (level_ == 1) return 0;
    const IdealRep s = chi.field().principal(section_);
    return detail::floor_mod_i64(static_cast<std::int64_t>(static_cast<__int128>(chi.exponent(s)) * j_ % chi.value_order()), chi.value_order());
  }

  /// chi^-(a) = chi(gamma1)^{pi^-(a)} and chi_t(a) = chi(a) / chi^-(a), as zeta_M-exponents.
  std::int64_t minus_value(const HeckeChar& chi, const IdealRep& a) const {
    return detail::floor_mod_i64(static_cast<std::int64_t>(static_cast<__int128>(minus_exponent(chi)) * pi_minus(a) % chi.value_order()), chi.value_order());
  }
  std::int64_t t_value(const HeckeChar& chi, const IdealRep& a) const {
    return detail::floor_mod_i64(chi.exponent(a) - minus_value(chi, a), chi.value_order());
  }

  bool phi_conductor_prime_to_p() const {
    const QuadField& K = phi_.field();
    return K.coprime(phi_.conductor(), K.principal({static_cast<std::int64_t>(p_), 0}));
  }
  bool psi_minus_nontrivial() const { return minus_exponent(psi_) != 0; }
  bool psi_trivial() const { return psi_.is_trivial(); }
  bool phi_quadratic() const { return phi_.pow(2).is_trivial(); }
  /// Usable for the anticyclotomic setting: psi nontrivial, phi of conductor prime to p.
  bool valid() const { return !psi_trivial() && phi_conductor_prime_to_p(); }

 private:
  std::int64_t pi_minus_of(const IdealRep& a) const {
    PadicElem x = anticyclotomic_coordinate(lambda_->avatar(a));
    return static_cast<std::int64_t>(x.c0() % static_cast<std::uint64_t>(level_));
  }

  const LambdaChar* lambda_;
  std::uint32_t p_ = 0;
  int r_ = 0;
  std::int64_t c_ = 1;
  std::int64_t level_ = 1;
  QuadInt section_;
  std::int64_t j_ = 1;
  HeckeChar phi_, psi_;
};

}  // namespace lamfam
