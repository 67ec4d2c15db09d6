#pragma once

#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "lamfam/parallel.hpp"
#include "lamfam/theta.hpp"

namespace lamfam {

/// a with e_f + e_g + e_h = 2a mod (p-1) for tame characters omega^{e}.
/// Of the two solutions mod p-1 the one in [0, (p-1)/2) is returned.
inline std::int64_t self_duality_exponent(std::uint32_t p, std::int64_t ef, std::int64_t eg, std::int64_t eh) {
  const std::int64_t m = static_cast<std::int64_t>(p) - 1;
  const std::int64_t s = detail::floor_mod_i64(ef + eg + eh, m);
  if (s % 2 != 0) throw NotSelfDual("omega^" + std::to_string(s) + " is not a square of a power of omega");
  return s / 2;
}

struct TripleWeight {
  int kx = 2, ky = 1, kz = 1;

  /// m = (k_x - k_y - k_z)/2, the power of the Serre derivative.
  int serre_power() const {
    const int d = kx - ky - kz;
    if (d % 2 != 0) throw DomainError("k_x + k_y + k_z must be even");
    return d / 2;
  }
};

/// Theta(n) = omega^{-a-1}(n) <n>^{1/2} (x) <n>^{-1/2} (x) <n>^{-1/2} in the
/// group algebra of Z_p^{r_f} x Z_p^{r_g} x Z_p^{r_h}, where <n>^{1/2} is the
/// group element of sqrt_one_unit(n) and <n>^{-1/2} that of its inverse.
class TwistChar {
 public:
  TwistChar(std::int64_t a, int N, std::shared_ptr<const UnitCoordinates> f, std::shared_ptr<const UnitCoordinates> g,
            std::shared_ptr<const UnitCoordinates> h)
      : a_(a), N_(N), f_(std::move(f)), g_(std::move(g)), h_(std::move(h)) {
    if (f_->rank() != 1) throw DomainError("Lambda_f coordinates must have rank 1");
    if (f_->prime() != g_->prime() || f_->prime() != h_->prime()) throw DomainError("mixed primes in the triple ring");
    if (f_->coord_precision() != g_->coord_precision() || f_->coord_precision() != h_->coord_precision())
      throw CapMismatch("coordinate precisions differ across the triple ring");
  }

  std::int64_t a() const { return a_; }
  std::uint32_t prime() const { return f_->prime(); }
  int precision() const { return N_; }
  int rank() const { return f_->rank() + g_->rank() + h_->rank(); }
  const UnitCoordinates& f_coords() const { return *f_; }
  const UnitCoordinates& g_coords() const { return *g_; }
  const UnitCoordinates& h_coords() const { return *h_; }

  GroupRingElem zero() const { return GroupRingElem(prime(), rank(), f_->coord_precision(), PadicElem(prime(), N_)); }

  GroupRingElem operator()(std::int64_t n) const {
    const std::uint32_t p = prime();
    if (n % static_cast<std::int64_t>(p) == 0) throw DomainError("Theta(n) needs p not dividing n");
    const PadicElem half = sqrt_one_unit(PadicElem(p, f_->input_precision(), n));
    const PadicElem inv = half.inverse();
    std::vector<PadicElem> c = f_->coords(half);
    for (const auto& x : g_->coords(inv)) c.push_back(x);
    for (const auto& x : h_->coords(inv)) c.push_back(x);
    const PadicElem w = teichmuller(PadicElem(p, N_, n)).pow_signed(-a_ - 1);
    return GroupRingElem::group_like(c, w);
  }

  /// Closed form of Theta(n) at w: omega^{-a-1}(n) <n>^{(k_x - k_y - k_z)/2}.
  PadicElem specialized(std::int64_t n, const TripleWeight& w) const {
    const std::uint32_t p = prime();
    const PadicElem half = sqrt_one_unit(PadicElem(p, N_, n));
    return teichmuller(PadicElem(p, N_, n)).pow_signed(-a_ - 1) * half.pow_signed(w.kx - w.ky - w.kz);
  }

  /// The character of the triple group at w (trivial finite parts).
  CoordinateCharacter character(const TripleWeight& w) const {
    return CoordinateCharacter::concat({weight_character(Weight::group(w.kx), *f_), weight_character(Weight::group(w.ky), *g_),
                                        weight_character(Weight::group(w.kz), *h_)});
  }

  GroupRingElem embed_g(const GroupRingElem& x) const {
    return GroupRingElem::tensor(GroupRingElem::tensor(unit(f_->rank()), x), unit(h_->rank()));
  }
  GroupRingElem embed_h(const GroupRingElem& x) const {
    return GroupRingElem::tensor(unit(f_->rank() + g_->rank()), x);
  }

 private:
  GroupRingElem unit(int r) const { return GroupRingElem(prime(), r, f_->coord_precision(), PadicElem(prime(), N_)).one_like(); }

  std::int64_t a_;
  int N_;
  std::shared_ptr<const UnitCoordinates> f_, g_, h_;
};

/// Z|_Theta = sum_{p not | n} Theta(n) a_n q^n, with a_n moved into the h slot.
inline QExpansion<GroupRingElem> theta_twist(const QExpansion<GroupRingElem>& xi, const TwistChar& T) {
  const std::int64_t p = T.prime();
  std::vector<GroupRingElem> c;
  c.reserve(xi.coefficients().size());
  for (int n = 0; n <= xi.cap(); ++n) {
    if (n % p == 0 || xi[n].is_zero())
      c.push_back(T.zero());
    else
      c.push_back(T(n) * T.embed_h(xi[n]));
  }
  return QExpansion<GroupRingElem>(std::move(c), std::lcm(xi.level(), p));
}

/// Classical counterpart: d^m(h (x) omega^e) = sum_{p not | n} omega^e(n) n^m a_n q^n.
inline QExpansion<PadicElem> serre_twist(const QExpansion<PadicElem>& h, std::int64_t e, int m) {
  const PadicElem& z = h.zero_elem();
  const std::int64_t p = z.prime();
  std::vector<PadicElem> c;
  for (int n = 0; n <= h.cap(); ++n) {
    if (n % p == 0) {
      c.push_back(z);
      continue;
    }
    const PadicElem nn = z.scalar(n);
    c.push_back(teichmuller(nn).pow_signed(e) * nn.pow_signed(m) * h[n]);
  }
  return QExpansion<PadicElem>(std::move(c), std::lcm(h.level(), p));
}

/// Xi = g x (h|_Theta) over the triple ring.
inline QExpansion<GroupRingElem> build_xi(const QExpansion<GroupRingElem>& g, const QExpansion<GroupRingElem>& h, const TwistChar& T) {
  if (g.cap() != h.cap()) throw CapMismatch("g has cap " + std::to_string(g.cap()) + ", h has cap " + std::to_string(h.cap()));
  auto G = g.map([&](const GroupRingElem& x) { return T.embed_g(x); });
  auto H = theta_twist(h, T);
  return family_product(G, H, [](const GroupRingElem& x, const GroupRingElem& y) { return x * y; });
}

/// Xi_w by specializing the triple-ring coefficients.
inline QExpansion<PadicElem> specialize_xi(const QExpansion<GroupRingElem>& xi, const TwistChar& T, const TripleWeight& w, int threads = 1) {
  const CoordinateCharacter c = T.character(w);
  std::vector<PadicElem> out(xi.coefficients().size());
  parallel_for(out.size(), threads, [&](std::size_t n) { out[n] = xi[static_cast<int>(n)].specialize(c).with_precision(T.precision()); });
  QExpansion<PadicElem> r(std::move(out), xi.level());
  r.set_weight(w.kx);
  return r;
}

/// g_y x d^m(h_z (x) psi_w), psi_w = omega^{-a-1-m}: the classical side of Xi_w.
inline QExpansion<PadicElem> classical_xi(const QExpansion<PadicElem>& g_y, const QExpansion<PadicElem>& h_z, std::int64_t a,
                                          const TripleWeight& w) {
  const int m = w.serre_power();
  auto r = product(g_y, serre_twist(h_z, -a - 1 - m, m));
  r.set_weight(w.kx);
  return r;
}

/// g* = g(q^{N_f}): a_{N_f n}(g*) = a_n(g), other coefficients 0; level times N_f.
template <class C>
QExpansion<C> test_vector(const QExpansion<C>& g, std::int64_t Nf) {
  if (Nf < 1) throw DomainError("N_f must be positive");
  if (Nf > g.cap()) throw CapExhausted("N_f = " + std::to_string(Nf) + " exceeds the cap " + std::to_string(g.cap()));
  std::vector<C> c(g.coefficients().size(), g.zero_elem());
  for (int n = 0; static_cast<std::int64_t>(n) * Nf <= g.cap(); ++n) c[static_cast<std::size_t>(n * Nf)] = g[n];
  QExpansion<C> r(std::move(c), g.level() * Nf);
  r.set_weight(g.weight());
  return r;
}

template <class C>
ThetaFamily<C> test_vector(const ThetaFamily<C>& F, std::int64_t Nf) {
  ThetaFamily<C> r = F;
  r.q = test_vector(F.q, Nf);
  return r;
}

// ---- eigen-projection ----

/// Ingested eigen-data of the target form (the f-breve line).
struct EigenData {
  std::string label;
  std::int64_t level = 1;       // N_f p^s
  std::int64_t tame_level = 1;  // N_f
  int s = 1;
  int weight = 2;
  std::map<std::int64_t, PadicElem> eigenvalues;  // a_l for l prime to level
  PadicElem a_p;
  PadicElem lambda_N;
  PadicElem eta_f;
  bool p_new = true;  // case (A) if p-new, case (B) if the p-stabilization of a level-N_f newform
  bool ordinary = true;
  bool trivial_character = true;

  void validate() const {
    if (ordinary && !a_p.is_unit()) throw ValidationFailed(label + ": ordinary form with non-unit a_p");
    if (p_new && weight == 2 && trivial_character && a_p != a_p.one_like() && a_p != -a_p.one_like())
      throw ValidationFailed(label + ": weight-2 p-new form needs a_p = +-1");
    if (eta_f.is_null()) throw ValidationFailed(label + ": missing congruence scalar");
  }
};

struct BasisLine {
  std::string label;
  QExpansion<PadicElem> q;
  std::map<std::int64_t, PadicElem> eigenvalues;
};

/// Ingested basis of an ordinary space. Coordinates are read off a chosen
/// index set on which the coefficient matrix is invertible mod p.
class OrdinaryBasis {
 public:
  OrdinaryBasis() = default;
  explicit OrdinaryBasis(std::vector<BasisLine> lines) : lines_(std::move(lines)) {
    if (lines_.empty()) throw RankDeficient("empty basis");
    cap_ = lines_[0].q.cap();
    for (const auto& l : lines_) cap_ = std::min(cap_, l.q.cap());
    select_index_set();
  }

  std::size_t size() const { return lines_.size(); }
  int cap() const { return cap_; }
  const BasisLine& line(std::size_t j) const { return lines_.at(j); }
  const std::vector<int>& index_set() const { return index_; }
  const PadicElem& zero() const { return lines_[0].q.zero_elem(); }

  std::vector<PadicElem> coordinates(const QExpansion<PadicElem>& xi) const {
    std::vector<PadicElem> rhs;
    for (int n : index_) rhs.push_back(xi[n]);
    return Binv_.apply(rhs);
  }

  QExpansion<PadicElem> combination(const std::vector<PadicElem>& x) const {
    auto r = QExpansion<PadicElem>::zero(zero(), cap_, lines_[0].q.level());
    for (std::size_t j = 0; j < lines_.size(); ++j) r = r + lines_[j].q.truncate(cap_).scaled(x.at(j));
    return r;
  }

  /// Projection onto the span along the expansions vanishing on the index set.
  QExpansion<PadicElem> ordinary_part(const QExpansion<PadicElem>& xi) const { return combination(coordinates(xi)); }

  bool contains(const QExpansion<PadicElem>& xi) const {
    const int Q = std::min(cap_, xi.cap());
    return combination(coordinates(xi)).truncate(Q) == xi.truncate(Q);
  }

  /// The unique line whose eigenvalues agree with the target's.
  std::size_t match(const EigenData& target) const {
    std::vector<std::size_t> hits;
    for (std::size_t j = 0; j < lines_.size(); ++j) {
      const auto& ev = lines_[j].eigenvalues;
      if (ev.empty()) throw EigenAmbiguous("line " + lines_[j].label + " carries no eigenvalues");
      bool ok = true, compared = false;
      for (const auto& [ell, v] : target.eigenvalues) {
        auto it = ev.find(ell);
        if (it == ev.end()) continue;
        compared = true;
        if (it->second != v) ok = false;
      }
      if (!compared) throw EigenAmbiguous("no common eigenvalues with line " + lines_[j].label);
      if (ok) hits.push_back(j);
    }
    if (hits.size() != 1)
      throw EigenAmbiguous(std::to_string(hits.size()) + " basis lines match the eigenvalues of " + target.label);
    return hits[0];
  }

 private:
  void select_index_set() {
    const std::size_t d = lines_.size();
    const std::uint32_t p = zero().prime();
    std::vector<std::vector<PadicElem>> ech;
    std::vector<std::size_t> piv;
    for (int n = 0; n <= cap_ && index_.size() < d; ++n) {
      std::vector<PadicElem> r;
      for (const auto& l : lines_) r.push_back(l.q[n].with_precision(1));
      for (std::size_t e = 0; e < ech.size(); ++e) {
        const PadicElem f = r[piv[e]] * ech[e][piv[e]].inverse();
        for (std::size_t j = 0; j < d; ++j) r[j] = r[j] - f * ech[e][j];
      }
      std::size_t c = d;
      for (std::size_t j = 0; j < d; ++j)
        if (!r[j].is_zero()) {
          c = j;
          break;
        }
      if (c == d) continue;
      ech.push_back(r);
      piv.push_back(c);
      index_.push_back(n);
    }
    if (index_.size() < d)
      throw RankDeficient("basis of " + std::to_string(d) + " lines has rank " + std::to_string(index_.size()) + " mod " +
                          std::to_string(p));
    PadicMatrix B(d, d, zero());
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) B(i, j) = lines_[j].q[index_[i]];
    std::vector<std::vector<PadicElem>> cols;
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<PadicElem> e(d, zero());
      e[j] = zero().one_like();
      cols.push_back(solve(B, e));
    }
    Binv_ = PadicMatrix::from_columns(cols);
  }

  std::vector<BasisLine> lines_;
  int cap_ = 0;
  std::vector<int> index_;
  PadicMatrix Binv_;
};

/// [Gamma_0(N_f) : Gamma_0(M)] = (M/N_f) prod_{l | M, l not | N_f} (1 + 1/l).
inline std::int64_t gamma0_index(std::int64_t M, std::int64_t Nf) {
  if (Nf < 1 || M % Nf != 0) throw DomainError("N_f must divide M");
  std::int64_t num = M / Nf, den = 1;
  std::int64_t m = M;
  for (std::int64_t l = 2; l * l <= m || m > 1; ++l) {
    if (l * l > m) l = m;
    if (m % l != 0) continue;
    while (m % l == 0) m /= l;
    if (Nf % l != 0) {
      num *= l + 1;
      den *= l;
    }
  }
  if (num % den != 0) throw DomainError("non-integral index");
  return num / den;
}

struct ProjectionConstants {
  std::int64_t M = 1;   // tame level of the test vectors
  std::int64_t Nf = 1;  // tame level of f
  int t = 1;            // p-exponent of the working level M p^t
};

struct Projection {
  PadicElem value;
  PadicElem coordinate;  // along the target line normalized to a_1 = 1
  PadicElem constant;    // eta_f C p^{k(t-s)} / a_p^{t-s}
  std::size_t line = 0;
};

/// eta_f C p^{k(t-s)} a_p^{-(t-s)}, with s replaced by 1 in case (B).
inline PadicElem projection_constant(const EigenData& f, const ProjectionConstants& c) {
  const int s = f.p_new ? f.s : 1;
  if (c.t < s) throw DomainError("t = " + std::to_string(c.t) + " is below the p-level " + std::to_string(s) + " of the target");
  const PadicElem& z = f.eta_f;
  const long e = static_cast<long>(f.weight) * (c.t - s);
  PadicElem pk = e >= z.precision() ? z.zero_like() : z.one_like().times_p(static_cast<int>(e)).with_precision(z.precision());
  return f.eta_f * z.scalar(gamma0_index(c.M, c.Nf)) * pk * f.a_p.pow_signed(-(c.t - s));
}

/// Coordinate of the ordinary input along the target line, times the case
/// constants. The input must lie in the span of the basis.
inline Projection eigen_project(const QExpansion<PadicElem>& xi_ord, const EigenData& target, const OrdinaryBasis& B,
                                const ProjectionConstants& c) {
  const std::size_t j = B.match(target);
  if (!B.contains(xi_ord)) throw RankDeficient("input does not lie in the span of the ordinary basis");
  const auto x = B.coordinates(xi_ord);
  const PadicElem a1 = B.line(j).q[1];
  if (!a1.is_unit()) throw DomainError("target line " + B.line(j).label + " has non-unit a_1");
  Projection r;
  r.line = j;
  r.coordinate = x[j] * a1;
  r.constant = projection_constant(target, c);
  r.value = r.constant * r.coordinate;
  return r;
}

/// prod_l f_l^{-1/2} over the ingested fudge factors.
inline PadicElem fudge_product(const std::vector<PadicElem>& fudge, const PadicElem& one) {
  PadicElem r = one;
  for (const auto& f : fudge) {
    if (!f.is_unit()) throw ValidationFailed("fudge factor " + f.to_string() + " is not a unit");
    r *= sqrt_unit(f).inverse();
  }
  return r;
}

// ---- pipeline ----

struct TriplePipeline {
  std::shared_ptr<const TwistChar> theta;
  QExpansion<GroupRingElem> xi;           // g x (h|_Theta) over the triple ring
  std::map<int, OrdinaryBasis> bases;     // by k_x
  std::map<int, EigenData> targets;       // by k_x
  std::int64_t M = 1;
  std::int64_t Nf = 1;
  std::vector<PadicElem> fudge;
};

struct PipelineValue {
  PadicElem value;
  Projection projection;
  int t = 1;
};

/// Smallest admissible t: the p-level of the target (1 in case (B)).
inline int working_t(const EigenData& f) { return std::max(1, f.p_new ? f.s : 1); }

/// Ordinary part, eigen-projection and fudge factors applied to Xi_w.
inline PipelineValue assemble(const TriplePipeline& P, const QExpansion<PadicElem>& xi_w, int kx) {
  auto bit = P.bases.find(kx);
  auto tit = P.targets.find(kx);
  if (bit == P.bases.end() || tit == P.targets.end()) throw DomainError("no ordinary basis or target at k_x = " + std::to_string(kx));
  PipelineValue r;
  r.t = working_t(tit->second);
  r.projection = eigen_project(bit->second.ordinary_part(xi_w), tit->second, bit->second, {P.M, P.Nf, r.t});
  r.value = r.projection.value * fudge_product(P.fudge, r.projection.value.one_like());
  return r;
}

/// Lambda-adic route: specialize Xi at w, then assemble.
inline PipelineValue evaluate(const TriplePipeline& P, const TripleWeight& w, int threads = 1) {
  return assemble(P, specialize_xi(P.xi, *P.theta, w, threads), w.kx);
}

// ---- restriction to a line ----

struct LineFit {
  LambdaSeries series;                 // in T, cap = degree
  std::vector<std::int64_t> samples;   // weights k (k-line) or exponents j (anticyclotomic)
  LineKind line = LineKind::KLine;
  int precision = 0;
};

/// Exact interpolation of a degree-D polynomial in T through sample points
/// T_i = (1+p)^{e_i} - 1. eval(e, W) must return the pipeline value at the
/// point with exponent e to precision W.
inline LineFit fit_line(const std::function<PadicElem(std::int64_t, int)>& eval, std::uint32_t p, int N, LineKind line,
                        const std::vector<std::int64_t>& samples, int degree, int threads = 1) {
  if (degree < 0) throw InsufficientSamples("negative degree");
  if (static_cast<int>(samples.size()) < degree + 1)
    throw InsufficientSamples(std::to_string(samples.size()) + " samples for degree " + std::to_string(degree));
  const std::size_t n = static_cast<std::size_t>(degree) + 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (samples[i] == samples[j]) throw InsufficientSamples("repeated sample " + std::to_string(samples[i]));
  // divided differences of order r lose v(T_{i+r} - T_i) = 1 + v_p(e_{i+r} - e_i) digits
  int loss = 0;
  for (std::size_t r = 1; r < n; ++r) {
    int worst = 0;
    for (std::size_t i = 0; i + r < n; ++i)
      worst = std::max(worst, 1 + detail::vp(static_cast<std::uint64_t>(std::llabs(samples[i + r] - samples[i])), p, 64));
    loss += worst;
  }
  const int W = N + loss;
  std::vector<PadicElem> T(n), y(n);
  const PadicElem onep(p, W, 1 + static_cast<std::int64_t>(p));
  for (std::size_t i = 0; i < n; ++i) T[i] = onep.pow_signed(samples[i]) - onep.one_like();
  parallel_for(n, threads, [&](std::size_t i) { y[i] = eval(samples[i], W).with_precision(W); });
  // Newton form
  std::vector<PadicElem> d = y;
  for (std::size_t r = 1; r < n; ++r)
    for (std::size_t i = n - 1; i >= r; --i) {
      const PadicElem diff = T[i] - T[i - r];
      const int v = diff.valuation();
      const PadicElem num = d[i] - d[i - 1];
      if (num.valuation() < v && !num.is_zero())
        throw InconsistencyFound("samples are not values of an integral polynomial of degree " + std::to_string(degree));
      d[i] = num.divide_by_p(v) * diff.divide_by_p(v).inverse();
    }
  // monomial coefficients of sum_i d_i prod_{j<i} (T - T_j), Horner from the top
  std::vector<PadicElem> c(n, PadicElem(p, N));
  c[0] = d[n - 1].with_precision(N);
  for (std::size_t i = n - 1; i-- > 0;) {
    // c <- c (T - T_i) + d_i
    std::vector<PadicElem> nc(n, PadicElem(p, N));
    for (std::size_t k = 0; k + 1 < n; ++k) nc[k + 1] += c[k];
    for (std::size_t k = 0; k < n; ++k) nc[k] -= c[k] * T[i].with_precision(N);
    nc[0] += d[i].with_precision(N);
    c = std::move(nc);
  }
  LineFit out;
  out.series = LambdaSeries(make_layout({"T"}, {degree}, -1, RingKind::Lambda), PadicElem(p, N));
  int prec = N;
  for (std::size_t k = 0; k < n; ++k) {
    prec = std::min(prec, c[k].precision());
    out.series.set_coeff({static_cast<int>(k)}, c[k]);
  }
  if (prec < N) throw PrecisionLoss("line fit certified to " + std::to_string(prec) + " digits");
  out.samples.assign(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(n));
  out.line = line;
  out.precision = prec;
  return out;
}

/// Default arcs: k_i = 2 + (p-1) p^m i on the k-line, j_i = p^m i on the
/// anticyclotomic variable.
inline std::vector<std::int64_t> line_samples(std::uint32_t p, LineKind line, int count, int m) {
  const std::int64_t pm = static_cast<std::int64_t>(detail::checked_pow(p, m));
  std::vector<std::int64_t> s;
  for (int i = 0; i < count; ++i)
    s.push_back(line == LineKind::KLine ? 2 + (static_cast<std::int64_t>(p) - 1) * pm * i : pm * i);
  return s;
}

inline LineFit lp_restrict_line(const std::function<PadicElem(std::int64_t, int)>& eval, std::uint32_t p, int N, LineKind line,
                                int degree, int m = 1, int threads = 1) {
  return fit_line(eval, p, N, line, line_samples(p, line, degree + 1, m), degree, threads);
}

}  // namespace lamfam
