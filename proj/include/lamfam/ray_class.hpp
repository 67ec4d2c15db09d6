#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "lamfam/abelian.hpp"
#include "lamfam/quadfield.hpp"

namespace lamfam {

/// O_K / c with canonical representatives x + y omega, 0 <= y < n2,
/// 0 <= x < n1 in the HNF of c.
class ResidueRing {
 public:
  ResidueRing(const QuadField& K, const IdealRep& c) : K_(&K), c_(c) {}

  const IdealRep& modulus() const { return c_; }
  std::int64_t size() const { return c_.norm(); }

  QuadInt reduce(const QuadInt& a) const {
    std::int64_t y = detail::floor_mod_i64(a.y, c_.n2);
    std::int64_t t = (a.y - y) / c_.n2;
    std::int64_t x = detail::floor_mod_i64(a.x - t * c_.m, c_.n1);
    return {x, y};
  }
  QuadInt mul(const QuadInt& a, const QuadInt& b) const { return reduce(K_->mul(reduce(a), reduce(b))); }
  QuadInt one() const { return reduce({1, 0}); }

  bool is_unit(const QuadInt& a) const {
    QuadInt r = reduce(a);
    if (r.x == 0 && r.y == 0) return c_.is_unit();
    return K_->coprime(K_->principal(r), c_);
  }

  /// a / n for an integer n prime to c.
  QuadInt div_int(const QuadInt& a, std::int64_t n) const {
    if (c_.is_unit()) return {0, 0};
    const std::uint64_t m = static_cast<std::uint64_t>(c_.n1);
    const std::int64_t inv = static_cast<std::int64_t>(detail::invmod(static_cast<std::uint64_t>(detail::floor_mod_i64(n, c_.n1)), m));
    QuadInt r = reduce(a);
    return reduce({static_cast<std::int64_t>(static_cast<__int128>(r.x) * inv % c_.n1),
                   static_cast<std::int64_t>(static_cast<__int128>(r.y) * inv % c_.n1)});
  }

  std::vector<QuadInt> units() const {
    std::vector<QuadInt> out;
    for (std::int64_t y = 0; y < c_.n2; ++y)
      for (std::int64_t x = 0; x < c_.n1; ++x)
        if (is_unit({x, y})) out.push_back({x, y});
    return out;
  }

 private:
  const QuadField* K_;
  IdealRep c_;
};

/// Element of Cl_K(c) as (Pic index j, residue of alpha mod c up to units),
/// where the ideal equals alpha * B_j for the fixed representative B_j.
struct RayKey {
  int j = 0;
  QuadInt r;
  friend bool operator<(const RayKey& a, const RayKey& b) { return std::tie(a.j, a.r) < std::tie(b.j, b.r); }
  friend bool operator==(const RayKey& a, const RayKey& b) { return a.j == b.j && a.r == b.r; }
};

/// Ray class group Cl_K(c) with discrete-log tables.
class RayClassGroup {
 public:
  static constexpr std::int64_t kMaxOrder = 100000;
  static constexpr std::int64_t kMaxModulusNorm = 1000000;

  RayClassGroup(const QuadField& K, const IdealRep& modulus) : K_(&K), ring_(K, modulus) {
    if (modulus.norm() > kMaxModulusNorm) throw ModulusTooLarge("modulus norm " + std::to_string(modulus.norm()));
    choose_representatives();
    std::vector<QuadInt> unit_res = ring_.units();
    for (const auto& u : K.units()) {
      QuadInt r = ring_.reduce(u);
      if (std::find(unit_image_.begin(), unit_image_.end(), r) == unit_image_.end()) unit_image_.push_back(r);
    }
    const std::int64_t expected = K.class_number() * static_cast<std::int64_t>(unit_res.size()) / static_cast<std::int64_t>(unit_image_.size());
    if (expected > kMaxOrder) throw ModulusTooLarge("ray class group of order " + std::to_string(expected));
    formula_order_ = expected;
    const int h = static_cast<int>(reps_.size());
    cocycle_.assign(static_cast<std::size_t>(h), std::vector<RayKey>(static_cast<std::size_t>(h)));
    for (int j = 0; j < h; ++j)
      for (int k = 0; k < h; ++k) cocycle_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = raw_key(K.mul(reps_[static_cast<std::size_t>(j)], reps_[static_cast<std::size_t>(k)]));
    std::vector<RayKey> candidates;
    for (int j = 0; j < h; ++j) candidates.push_back(canonical({j, ring_.one()}));
    for (const auto& u : unit_res) candidates.push_back(canonical({0, u}));
    group_ = enumerate_group(canonical({0, ring_.one()}), candidates,
                             [this](const RayKey& a, const RayKey& b) { return key_mul(a, b); },
                             static_cast<std::size_t>(expected));
  }

  const QuadField& field() const { return *K_; }
  const IdealRep& modulus() const { return ring_.modulus(); }
  const ResidueRing& residues() const { return ring_; }
  const FiniteAbelianGroup& structure() const { return group_.structure; }
  std::int64_t order() const { return group_.structure.order(); }
  /// h_K * #(O_K/c)^x / #image(O_K^x).
  std::int64_t formula_order() const { return formula_order_; }
  const std::vector<IdealRep>& pic_representatives() const { return reps_; }

  /// Index of the Pic class of a (coprime to c).
  int pic_index(const IdealRep& a) const { return raw_key(a).j; }

  std::vector<std::int64_t> class_of(const IdealRep& a) const {
    if (!K_->coprime(a, modulus())) throw NotCoprime(a.to_string() + " meets the modulus");
    return group_.log(canonical(raw_key(a)));
  }

  /// Class of the principal ideal (alpha).
  std::vector<std::int64_t> class_of_element(const QuadInt& alpha) const { return class_of(K_->principal(alpha)); }

  /// Class of the element of the SNF basis as an ideal of small norm.
  IdealRep ideal_in_class(const std::vector<std::int64_t>& cls, std::int64_t nmax = 10000) const {
    for (std::int64_t bound = 50; bound <= nmax; bound *= 2)
      for (const auto& I : K_->enumerate_ideals(bound, modulus()))
        if (class_of(I) == cls) return I;
    throw DomainError("no ideal of norm <= " + std::to_string(nmax) + " in the requested class");
  }

 private:
  void choose_representatives() {
    const std::int64_t h = K_->class_number();
    const std::int64_t n1 = modulus().n1;
    reps_.push_back(K_->unit_ideal());
    for (std::int64_t bound = 16; static_cast<std::int64_t>(reps_.size()) < h; bound *= 2) {
      if (bound > (1 << 22)) throw InconsistencyFound("could not find class representatives");
      for (const auto& I : K_->enumerate_ideals(bound)) {
        if (static_cast<std::int64_t>(reps_.size()) == h) break;
        if (std::gcd(I.norm(), n1) != 1) continue;
        bool known = false;
        for (const auto& B : reps_)
          if (K_->principal_generator(K_->mul(I, K_->conj(B)), nullptr)) known = true;
        if (!known) reps_.push_back(I);
      }
    }
  }

  /// a = (beta / N(B_j)) B_j with (beta) = a * conj(B_j).
  RayKey raw_key(const IdealRep& a) const {
    for (std::size_t j = 0; j < reps_.size(); ++j) {
      QuadInt beta;
      if (K_->principal_generator(K_->mul(a, K_->conj(reps_[j])), &beta))
        return RayKey{static_cast<int>(j), ring_.div_int(beta, reps_[j].norm())};
    }
    throw InconsistencyFound("ideal " + a.to_string() + " in no known class");
  }

  RayKey canonical(RayKey k) const {
    QuadInt best = ring_.reduce(k.r);
    for (const auto& u : unit_image_) best = std::min(best, ring_.mul(u, k.r));
    k.r = best;
    return k;
  }

  RayKey key_mul(const RayKey& a, const RayKey& b) const {
    const RayKey& g = cocycle_[static_cast<std::size_t>(a.j)][static_cast<std::size_t>(b.j)];
    return canonical({g.j, ring_.mul(ring_.mul(a.r, b.r), g.r)});
  }

  const QuadField* K_;
  ResidueRing ring_;
  std::vector<IdealRep> reps_;
  std::vector<QuadInt> unit_image_;
  std::vector<std::vector<RayKey>> cocycle_;
  std::int64_t formula_order_ = 0;
  EnumeratedGroup<RayKey> group_;
};

}  // namespace lamfam
