#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "lamfam/cyclotomic.hpp"
#include "lamfam/errors.hpp"
#include "lamfam/padic.hpp"

namespace lamfam {

/// Either an exact rational or an element of Z_{p^2} mod p^N. Mixing the two
/// maps the rational into Z_{p^2}.
class ExactScalar {
 public:
  ExactScalar() : v_(Rational(0)) {}
  ExactScalar(Rational r) : v_(std::move(r)) {}
  ExactScalar(std::int64_t v) : v_(Rational(v)) {}
  ExactScalar(PadicElem x) : v_(std::move(x)) {}

  bool is_rational() const { return std::holds_alternative<Rational>(v_); }
  const Rational& rational() const { return std::get<Rational>(v_); }
  const PadicElem& padic() const { return std::get<PadicElem>(v_); }

  bool is_zero() const { return is_rational() ? rational() == 0 : padic().is_zero(); }

  /// Image in Z_{p^2} mod p^N; throws DomainError when p divides the denominator.
  PadicElem to_padic(std::uint32_t p, int N) const {
    if (!is_rational()) return padic().with_precision(N);
    const PadicElem shape(p, N, 0);
    const BigInt mod(shape.modulus());
    const BigInt num = numerator(rational()), den = denominator(rational());
    if (den % p == 0) throw DomainError("rational with p in the denominator has no image in Z_p");
    auto red = [&](const BigInt& v) {
      BigInt r = v % mod;
      if (r < 0) r += mod;
      return static_cast<std::int64_t>(r);
    };
    return shape.scalar(red(num)) * shape.scalar(red(den)).inverse();
  }

  ExactScalar inverse() const {
    if (is_rational()) {
      if (rational() == 0) throw DomainError("inverse of zero");
      return ExactScalar(Rational(1) / rational());
    }
    return ExactScalar(padic().inverse());
  }

  ExactScalar pow(int e) const {
    ExactScalar base = e < 0 ? inverse() : *this;
    ExactScalar r = one_like();
    for (int i = 0; i < std::abs(e); ++i) r = r * base;
    return r;
  }

  ExactScalar one_like() const { return is_rational() ? ExactScalar(Rational(1)) : ExactScalar(padic().one_like()); }

  friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
    if (a.is_rational() && b.is_rational()) return ExactScalar(a.rational() * b.rational());
    auto [x, y] = promote(a, b);
    return ExactScalar(x * y);
  }
  friend ExactScalar operator+(const ExactScalar& a, const ExactScalar& b) {
    if (a.is_rational() && b.is_rational()) return ExactScalar(a.rational() + b.rational());
    auto [x, y] = promote(a, b);
    return ExactScalar(x + y);
  }
  friend ExactScalar operator-(const ExactScalar& a, const ExactScalar& b) { return a + b * ExactScalar(std::int64_t{-1}); }

  friend bool operator==(const ExactScalar& a, const ExactScalar& b) {
    if (a.is_rational() && b.is_rational()) return a.rational() == b.rational();
    auto [x, y] = promote(a, b);
    return x == y;
  }
  friend bool operator!=(const ExactScalar& a, const ExactScalar& b) { return !(a == b); }

  std::string to_string() const {
    if (!is_rational()) return padic().to_string();
    std::ostringstream os;
    os << rational();
    return os.str();
  }

 private:
  static std::pair<PadicElem, PadicElem> promote(const ExactScalar& a, const ExactScalar& b) {
    const PadicElem& shape = a.is_rational() ? b.padic() : a.padic();
    return {a.to_padic(shape.prime(), shape.precision()), b.to_padic(shape.prime(), shape.precision())};
  }

  std::variant<Rational, PadicElem> v_;
};

/// Pure tensor s * w with s an exact scalar and w in Q(zeta_L). Rational
/// cyclotomic factors are folded into the scalar, so unramified values carry
/// w = 1 in Q(zeta_1).
struct EulerValue {
  ExactScalar scalar{std::int64_t{1}};
  CycloRational cyclo{1, Rational(1)};

  EulerValue() = default;
  EulerValue(ExactScalar s) : scalar(std::move(s)) {}
  EulerValue(ExactScalar s, CycloRational w) : scalar(std::move(s)), cyclo(std::move(w)) { normalize(); }

  bool is_zero() const { return scalar.is_zero() || cyclo.is_zero(); }

  friend EulerValue operator*(const EulerValue& a, const EulerValue& b) {
    const int L = std::lcm(a.cyclo.order(), b.cyclo.order());
    return EulerValue(a.scalar * b.scalar, a.cyclo.lift(L) * b.cyclo.lift(L));
  }

  /// Exact comparison. Rational scalars are compared as elements of
  /// Q(zeta_L); p-adic scalars factorwise.
  friend bool operator==(const EulerValue& a, const EulerValue& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    const int L = std::lcm(a.cyclo.order(), b.cyclo.order());
    if (a.scalar.is_rational() && b.scalar.is_rational())
      return a.cyclo.lift(L) * a.scalar.rational() == b.cyclo.lift(L) * b.scalar.rational();
    return a.scalar == b.scalar && a.cyclo.lift(L) == b.cyclo.lift(L);
  }
  friend bool operator!=(const EulerValue& a, const EulerValue& b) { return !(a == b); }

  std::string to_string() const {
    if (cyclo.order() == 1) return scalar.to_string();
    return scalar.to_string() + " * [" + cyclo.to_string() + "]";
  }
  friend std::ostream& operator<<(std::ostream& os, const EulerValue& v) { return os << v.to_string(); }

 private:
  void normalize() {
    if (cyclo.is_scalar() && cyclo.order() != 1) {
      scalar = scalar * ExactScalar(cyclo.scalar_part());
      cyclo = CycloRational(1, Rational(1));
    } else if (cyclo.order() == 1 && cyclo.scalar_part() != 1) {
      scalar = scalar * ExactScalar(cyclo.scalar_part());
      cyclo = CycloRational(1, Rational(1));
    }
  }
};

/// Character of (Z_{p^2}/p^2)^x written through the decomposition
/// mu_{p^2-1} x (1 + p Z_{p^2}):
///   u = teich(u) * (1 + p x)  ->  zeta_{p^2-1}^{j log_g(u mod p)} * zeta_p^{tr(beta x)},
/// with g the first generator of F_{p^2}^x in (c0, c1) order and beta in F_{p^2}.
/// Conductor exponents above 2 are not covered.
struct LocalCharacter {
  std::uint32_t p = 0;
  std::int64_t j = 0;
  std::uint32_t beta0 = 0, beta1 = 0;

  std::int64_t tame_order() const { return static_cast<std::int64_t>(p) * p - 1; }
  std::int64_t j_mod() const { return detail::floor_mod_cyc(j, tame_order()); }

  /// Exact conductor exponent n.
  int level() const {
    if (beta0 % p != 0 || beta1 % p != 0) return 2;
    return j_mod() == 0 ? 0 : 1;
  }

  LocalCharacter inverse() const {
    return {p, -j, (p - beta0 % p) % p, (p - beta1 % p) % p};
  }

  /// Trivial on Z_p^x (and on p by the eta(p) = 1 convention).
  bool trivial_on_qp() const { return j_mod() % (static_cast<std::int64_t>(p) - 1) == 0 && beta0 % p == 0; }

  /// Value at -1, which is Teichmuller: (-1)^j.
  int at_minus_one() const { return j_mod() % 2 == 0 ? 1 : -1; }

  std::string label() const {
    return "j=" + std::to_string(j_mod()) + ",beta=(" + std::to_string(beta0 % p) + "," + std::to_string(beta1 % p) + ")";
  }
};

namespace detail {

/// Discrete-log table of F_{p^2}^x = F_p[sqrt d]^x keyed by c0 + p c1.
struct FiniteFieldLog {
  std::uint32_t p = 0, d = 0;
  std::vector<std::int64_t> log;  // -1 at 0

  explicit FiniteFieldLog(std::uint32_t p_) : p(p_), d(smallest_nonresidue(p_)) {
    const std::uint64_t q = static_cast<std::uint64_t>(p) * p;
    for (std::uint64_t cand = 1; cand < q; ++cand) {
      std::vector<std::int64_t> tab(q, -1);
      std::uint64_t a = 1, b = 0;
      std::int64_t e = 0;
      bool ok = true;
      for (; e < static_cast<std::int64_t>(q - 1); ++e) {
        const std::uint64_t key = a + p * b;
        if (tab[key] != -1) {
          ok = false;
          break;
        }
        tab[key] = e;
        const std::uint64_t g0 = cand % p, g1 = cand / p;
        const std::uint64_t na = (a * g0 + d * b % p * g1) % p, nb = (a * g1 + b * g0) % p;
        a = na;
        b = nb;
      }
      if (ok) {
        log = std::move(tab);
        return;
      }
    }
    throw DomainError("no generator of F_{p^2}^x");
  }

  std::int64_t operator()(std::uint64_t c0, std::uint64_t c1) const { return log.at(c0 % p + p * (c1 % p)); }
};

}  // namespace detail

/// W(eta~) = G(eta~)/p^n together with the Gauss sum itself.
struct RootNumber {
  int level = 0;
  CycloInt gauss;
  CycloRational value;
  /// Present exactly when W is a rational +-1.
  std::optional<int> sign;

  /// Image in Z_p mod p^N; available only for rational W.
  PadicElem padic_image(std::uint32_t p, int N) const {
    if (!sign) throw Unsupported("root number is not rational; no canonical p-adic image");
    return PadicElem(p, N, *sign);
  }
};

namespace detail {

/// Units of Z_{p^2}/p^n with their coordinates (c0, log_g(u mod p), x).
struct UnitEntry {
  std::int64_t c0, log, x0, x1;
};

inline const std::vector<UnitEntry>& unit_table(std::uint32_t p, int n) {
  static std::mutex mu;
  static std::map<std::pair<std::uint32_t, int>, std::vector<UnitEntry>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({p, n});
  if (it != cache.end()) return it->second;
  const FiniteFieldLog lg(p);
  const std::int64_t pn = static_cast<std::int64_t>(checked_pow(p, n));
  std::vector<UnitEntry> out;
  for (std::int64_t c0 = 0; c0 < pn; ++c0)
    for (std::int64_t c1 = 0; c1 < pn; ++c1) {
      if (c0 % p == 0 && c1 % p == 0) continue;
      UnitEntry e{c0, lg(static_cast<std::uint64_t>(c0), static_cast<std::uint64_t>(c1)), 0, 0};
      if (n >= 2) {
        // x = (u / teich(u) - 1) / p mod p
        const PadicElem u = PadicElem::from_residues(p, 2, static_cast<std::uint64_t>(c0), static_cast<std::uint64_t>(c1));
        const PadicElem one_unit = u * teichmuller(u).inverse();
        const PadicElem x = (one_unit - one_unit.one_like()).divide_by_p(1);
        e.x0 = static_cast<std::int64_t>(x.c0() % p);
        e.x1 = static_cast<std::int64_t>(x.c1() % p);
      }
      out.push_back(e);
    }
  return cache.emplace(std::make_pair(p, n), std::move(out)).first->second;
}

}  // namespace detail

/// G(eta~) = sum_{u mod p^n} eta~(u) e(Tr(u / p^n)) in Z[zeta_L],
/// L = lcm(p^2 - 1, p^n).
inline CycloInt gauss_sum(const LocalCharacter& chi, int n) {
  const std::uint32_t p = chi.p;
  const std::int64_t tame = chi.tame_order();
  const std::int64_t pn = static_cast<std::int64_t>(detail::checked_pow(p, n));
  const std::int64_t L = std::lcm(tame, pn);
  const std::int64_t d = detail::smallest_nonresidue(p);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(L), 0);
  for (const auto& u : detail::unit_table(p, n)) {
    std::int64_t e = (L / tame) * (chi.j_mod() * u.log % tame);
    if (n >= 2) {
      const std::int64_t tr = 2 * (static_cast<std::int64_t>(chi.beta0 % p) * u.x0 + d * (chi.beta1 % p) * u.x1);
      e += (L / p) * detail::floor_mod_cyc(tr, p);
    }
    e += (L / pn) * detail::floor_mod_cyc(2 * u.c0, pn);
    counts[static_cast<std::size_t>(detail::floor_mod_cyc(e, L))] += 1;
  }
  return CycloInt::from_exponent_counts(static_cast<int>(L), std::move(counts));
}

/// Root number of a primitive character of exact level n in {1, 2}. Asserts
/// G * conj(G) = p^{2n} in Z[zeta_L].
inline RootNumber root_number(const LocalCharacter& chi, int n) {
  if (n < 1) throw NotPrimitive("root number needs a ramified character (n >= 1)");
  if (n > 2) throw Unsupported("conductor exponent " + std::to_string(n) + " > 2");
  if (chi.level() != n) throw NotPrimitive("character " + chi.label() + " has exact level " + std::to_string(chi.level()) + ", not " + std::to_string(n));
  RootNumber r;
  r.level = n;
  r.gauss = gauss_sum(chi, n);
  const std::int64_t p2n = static_cast<std::int64_t>(detail::checked_pow(chi.p, 2 * n));
  if (r.gauss * r.gauss.conj() != CycloInt(r.gauss.order(), p2n)) throw InconsistencyFound("|G|^2 != p^{2n} for " + chi.label());
  r.value = to_rational(r.gauss) * Rational(1, static_cast<std::int64_t>(detail::checked_pow(chi.p, n)));
  if (r.value.is_scalar()) {
    if (r.value.scalar_part() == 1) r.sign = 1;
    if (r.value.scalar_part() == -1) r.sign = -1;
  }
  return r;
}

enum class FormType { POld, PNew };

struct LocalFactorInput {
  std::uint32_t p = 5;
  FormType form = FormType::POld;
  int k = 2;
  ExactScalar a_p{std::int64_t{1}};
  int n = 0;
  std::optional<LocalCharacter> eta;
};

namespace detail {

inline void check_weight(int k) {
  if (k < 2 || k % 2 != 0) throw DomainError("weight " + std::to_string(k) + " is not even >= 2");
}

inline ExactScalar p_power(std::uint32_t p, int e) { return ExactScalar(Rational(static_cast<std::int64_t>(p))).pow(e); }

/// 1 - p^{k-2} / a_p^2.
inline ExactScalar euler_one_minus(std::uint32_t p, int k, const ExactScalar& a_p) {
  return ExactScalar(std::int64_t{1}) - p_power(p, k - 2) * (a_p * a_p).inverse();
}

/// (p / a_p^2)^n p^{n(k-2)}.
inline ExactScalar ramified_scalar(std::uint32_t p, int k, const ExactScalar& a_p, int n) {
  return (p_power(p, 1) * (a_p * a_p).inverse()).pow(n) * p_power(p, n * (k - 2));
}

}  // namespace detail

/// Local factor at p as a product of the two characters' contributions:
/// case (1) n = 0, p-old; case (2) n = 0, p-new (k = 2 only); case (3) n >= 1.
inline EulerValue unb_factor(const LocalFactorInput& in, const std::optional<RootNumber>& known_W = std::nullopt) {
  detail::check_weight(in.k);
  if (in.form == FormType::PNew && in.k != 2) throw CaseMismatch("p-new local factor needs k = 2, got k = " + std::to_string(in.k));
  if (in.n < 0) throw CaseMismatch("negative conductor exponent");
  if (in.n == 0) {
    if (in.eta && in.eta->level() != 0) throw CaseMismatch("n = 0 with a ramified character " + in.eta->label());
    const ExactScalar e = detail::euler_one_minus(in.p, in.k, in.a_p);
    return EulerValue(in.form == FormType::POld ? e * e : e);
  }
  if (!in.eta) throw CaseMismatch("ramified case needs the character table of eta~");
  if (in.eta->level() != in.n) throw CaseMismatch("character " + in.eta->label() + " does not have level n = " + std::to_string(in.n));
  const RootNumber W = known_W ? *known_W : root_number(*in.eta, in.n);
  // 1/W = conj(W) since W conj(W) = 1 has been asserted.
  return EulerValue(detail::ramified_scalar(in.p, in.k, in.a_p, in.n), W.value.conj());
}

/// Interpolation multiplier e_p of the anticyclotomic L-function.
inline EulerValue anticyc_multiplier(std::uint32_t p, int k, const ExactScalar& a_p, int n, FormType form) {
  detail::check_weight(k);
  if (n > 0) return EulerValue(detail::ramified_scalar(p, k, a_p, n));
  const ExactScalar e = detail::euler_one_minus(p, k, a_p);
  return EulerValue(form == FormType::POld ? e * e : e);
}

/// C_p with delta_K^{k-1} = (d_K)^{(k-2)/2} * delta_K; the last delta_K is
/// kept symbolic.
struct CpConstant {
  EulerValue value;   // everything except the trailing delta_K
  int delta_power = 1;
};

inline Rational gamma_int(std::int64_t m) {
  if (m < 1) throw DomainError("Gamma at non-positive integer");
  Rational r = 1;
  for (std::int64_t i = 2; i < m; ++i) r *= i;
  return r;
}

inline CpConstant cp_constant(int k, int j, std::int64_t c, std::int64_t d_K, std::int64_t u_K, const ExactScalar& epsilon,
                              const CycloRational& nu_N) {
  detail::check_weight(k);
  if (2 * std::abs(j) >= k) throw DomainError("|j| = " + std::to_string(std::abs(j)) + " is not < k/2 = " + std::to_string(k / 2));
  const int sign_exp = (2 + 2 * j - k) / 2;
  Rational coeff = (sign_exp % 2 == 0) ? 1 : -1;
  coeff *= gamma_int(k / 2 + j) * gamma_int(k / 2 - j);
  coeff *= c;
  for (int i = 0; i < (k - 2) / 2; ++i) coeff *= d_K;
  coeff *= u_K * u_K;
  CpConstant out;
  out.value = EulerValue(ExactScalar(coeff) * epsilon) * EulerValue(ExactScalar(std::int64_t{1}), nu_N);
  return out;
}

struct ConsistencyRow {
  LocalFactorInput input;
  EulerValue local;
  EulerValue multiplier;
  std::optional<RootNumber> W;
  bool ok = false;
};

struct ConsistencyGrid {
  std::uint32_t p = 5;
  std::vector<int> weights{2, 4, 6};
  std::vector<int> levels{0, 1, 2};
  std::vector<ExactScalar> a_p;
  /// Ramified characters, filtered by level per row.
  std::vector<LocalCharacter> characters;
};

/// Default grid: k in {2,4,6}, n in {0,1,2}, a_p in {1, -1} and three Z_p
/// units mod p^N; characters trivial on Q_p^x at both levels.
inline ConsistencyGrid default_grid(std::uint32_t p = 5, int N = 8) {
  ConsistencyGrid g;
  g.p = p;
  g.a_p = {ExactScalar(std::int64_t{1}), ExactScalar(std::int64_t{-1}), ExactScalar(PadicElem(p, N, 2)), ExactScalar(PadicElem(p, N, 3)),
           ExactScalar(PadicElem(p, N, 1 + static_cast<std::int64_t>(p) * 7))};
  for (std::uint32_t i = 1; i <= p; ++i) g.characters.push_back({p, static_cast<std::int64_t>(i) * (p - 1), 0, 0});
  for (std::uint32_t b = 1; b < p; ++b) g.characters.push_back({p, static_cast<std::int64_t>(b) * (p - 1), 0, b});
  return g;
}

/// I = e_p on unramified rows and I * W = e_p on ramified rows, for p-old
/// forms at every weight and p-new forms at k = 2.
inline std::vector<ConsistencyRow> consistency_check(const ConsistencyGrid& grid) {
  std::vector<ConsistencyRow> rows;
  std::map<std::string, RootNumber> roots;
  auto root = [&](const LocalCharacter& chi, int n) -> const RootNumber& {
    const std::string key = chi.label() + "/" + std::to_string(n);
    auto it = roots.find(key);
    if (it == roots.end()) it = roots.emplace(key, root_number(chi, n)).first;
    return it->second;
  };
  for (int k : grid.weights) {
    for (int n : grid.levels) {
      for (const auto& a : grid.a_p) {
        for (FormType form : {FormType::POld, FormType::PNew}) {
          if (form == FormType::PNew && k != 2) continue;
          std::vector<std::optional<LocalCharacter>> etas;
          if (n == 0) etas.push_back(std::nullopt);
          for (const auto& chi : grid.characters)
            if (n > 0 && chi.level() == n) etas.push_back(chi);
          for (const auto& eta : etas) {
            ConsistencyRow row;
            row.input = {grid.p, form, k, a, n, eta};
            row.multiplier = anticyc_multiplier(grid.p, k, a, n, form);
            if (n > 0) {
              row.W = root(*eta, n);
              row.local = unb_factor(row.input, *row.W);
              row.ok = row.local * EulerValue(ExactScalar(std::int64_t{1}), row.W->value) == row.multiplier;
            } else {
              row.local = unb_factor(row.input);
              row.ok = row.local == row.multiplier;
            }
            if (!row.ok)
              throw InconsistencyFound("local factor mismatch at k=" + std::to_string(k) + " n=" + std::to_string(n) + " a_p=" + a.to_string() +
                                       (eta ? " eta=" + eta->label() : std::string()) + ": I=" + row.local.to_string() +
                                       " e_p=" + row.multiplier.to_string());
            rows.push_back(std::move(row));
          }
        }
      }
    }
  }
  return rows;
}

}  // namespace lamfam
