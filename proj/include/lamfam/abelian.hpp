#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lamfam/errors.hpp"

namespace lamfam {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

namespace detail {

inline std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline IntMatrix identity_matrix(std::size_t n) {
  IntMatrix I(n, std::vector<std::int64_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

}  // namespace detail

/// Smith normal form U R V = D of an integer matrix with U, V unimodular.
/// Only V and V^{-1} are tracked; that is all a presentation Z^k / rows(R) needs.
struct SmithForm {
  std::vector<std::int64_t> diagonal;  // length = number of columns, zero-padded
  IntMatrix V, Vinv;
};

inline SmithForm smith_form(IntMatrix R, std::size_t cols) {
  const std::size_t rows = R.size();
  SmithForm out;
  out.V = detail::identity_matrix(cols);
  out.Vinv = detail::identity_matrix(cols);
  auto col_op = [&](std::size_t i, std::size_t j, std::int64_t q) {  // col_j -= q col_i
    for (auto& r : R) r[j] -= q * r[i];
    for (auto& r : out.V) r[j] -= q * r[i];
    // inverse: row_i += q row_j
    for (std::size_t c = 0; c < cols; ++c) out.Vinv[i][c] += q * out.Vinv[j][c];
  };
  auto col_swap = [&](std::size_t i, std::size_t j) {
    for (auto& r : R) std::swap(r[i], r[j]);
    for (auto& r : out.V) std::swap(r[i], r[j]);
    std::swap(out.Vinv[i], out.Vinv[j]);
  };
  auto row_op = [&](std::size_t i, std::size_t j, std::int64_t q) {  // row_j -= q row_i
    for (std::size_t c = 0; c < cols; ++c) R[j][c] -= q * R[i][c];
  };
  std::size_t t = 0;
  for (; t < std::min(rows, cols); ++t) {
    // pivot: smallest nonzero entry in the remaining block
    bool any = false;
    std::size_t pr = 0, pc = 0;
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < cols; ++j)
        if (R[i][j] != 0 && (!any || std::llabs(R[i][j]) < std::llabs(R[pr][pc]))) {
          any = true;
          pr = i;
          pc = j;
        }
    if (!any) break;
    std::swap(R[t], R[pr]);
    col_swap(t, pc);
    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (R[i][t] == 0) continue;
        row_op(t, i, R[i][t] / R[t][t]);
        if (R[i][t] != 0) {
          clean = false;
          std::swap(R[t], R[i]);
        }
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (R[t][j] == 0) continue;
        col_op(t, j, R[t][j] / R[t][t]);
        if (R[t][j] != 0) {
          clean = false;
          col_swap(t, j);
        }
      }
      if (!clean) continue;
      // divisibility: the pivot must divide the rest of the block
      bool fixed = false;
      for (std::size_t i = t + 1; i < rows && !fixed; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (R[i][j] % R[t][t] != 0) {
            for (std::size_t c = 0; c < cols; ++c) R[t][c] += R[i][c];
            fixed = true;
            break;
          }
      if (!fixed) break;
    }
  }
  out.diagonal.assign(cols, 0);
  for (std::size_t i = 0; i < std::min(rows, cols); ++i) out.diagonal[i] = std::llabs(R[i][i]);
  return out;
}

/// Finite abelian group Z^k / rows(R), kept in invariant-factor coordinates.
/// Elements are vectors reduced modulo orders() (all > 1, each dividing the next).
class FiniteAbelianGroup {
 public:
  FiniteAbelianGroup() = default;

  /// Presentation with k free generators and the given relation rows.
  FiniteAbelianGroup(std::size_t k, const IntMatrix& relations) : k_(k) {
    SmithForm s = smith_form(relations, k);
    for (std::size_t i = 0; i < k; ++i) {
      if (s.diagonal[i] == 0) throw DomainError("presentation is not of a finite group");
      if (s.diagonal[i] != 1) keep_.push_back(i);
    }
    for (auto i : keep_) orders_.push_back(s.diagonal[i]);
    V_ = std::move(s.V);
    Vinv_ = std::move(s.Vinv);
  }

  const std::vector<std::int64_t>& orders() const { return orders_; }
  std::size_t rank() const { return orders_.size(); }
  std::size_t presentation_rank() const { return k_; }

  std::int64_t order() const {
    std::int64_t n = 1;
    for (auto d : orders_) n *= d;
    return n;
  }
  std::int64_t exponent() const { return orders_.empty() ? 1 : orders_.back(); }

  /// Reduce a vector in presentation coordinates.
  std::vector<std::int64_t> reduce(const std::vector<std::int64_t>& x) const {
    std::vector<std::int64_t> out;
    out.reserve(orders_.size());
    for (std::size_t t = 0; t < keep_.size(); ++t) {
      __int128 acc = 0;
      for (std::size_t i = 0; i < k_; ++i) acc += static_cast<__int128>(x.at(i)) * V_[i][keep_[t]];
      out.push_back(detail::floor_mod(static_cast<std::int64_t>(acc % orders_[t]), orders_[t]));
    }
    return out;
  }

  /// Presentation coordinates of the t-th invariant generator.
  std::vector<std::int64_t> generator_in_presentation(std::size_t t) const { return Vinv_.at(keep_.at(t)); }

  std::vector<std::int64_t> identity() const { return std::vector<std::int64_t>(orders_.size(), 0); }

  std::vector<std::int64_t> add(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) const {
    std::vector<std::int64_t> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = (a[i] + b[i]) % orders_[i];
    return r;
  }
  std::vector<std::int64_t> negate(const std::vector<std::int64_t>& a) const {
    std::vector<std::int64_t> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = detail::floor_mod(-a[i], orders_[i]);
    return r;
  }
  std::vector<std::int64_t> scale(const std::vector<std::int64_t>& a, std::int64_t m) const {
    std::vector<std::int64_t> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      r[i] = detail::floor_mod(static_cast<std::int64_t>(static_cast<__int128>(a[i]) * m % orders_[i]), orders_[i]);
    return r;
  }
  bool is_identity(const std::vector<std::int64_t>& a) const {
    for (auto x : a)
      if (x != 0) return false;
    return true;
  }

  /// Order of an element.
  std::int64_t element_order(const std::vector<std::int64_t>& a) const {
    std::int64_t n = 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::int64_t oi = orders_[i] / std::gcd(orders_[i], a[i]);
      n = std::lcm(n, oi);
    }
    return n;
  }

  /// Quotient by the subgroup generated by the given elements, together with
  /// the induced map on coordinates.
  std::pair<FiniteAbelianGroup, IntMatrix> quotient(const std::vector<std::vector<std::int64_t>>& sub) const {
    IntMatrix rel;
    for (std::size_t i = 0; i < orders_.size(); ++i) {
      std::vector<std::int64_t> row(orders_.size(), 0);
      row[i] = orders_[i];
      rel.push_back(row);
    }
    for (const auto& s : sub) rel.push_back(s);
    FiniteAbelianGroup Q(orders_.size(), rel);
    IntMatrix images;
    for (std::size_t i = 0; i < orders_.size(); ++i) {
      std::vector<std::int64_t> e(orders_.size(), 0);
      e[i] = 1;
      images.push_back(Q.reduce(e));
    }
    return {Q, images};
  }

  /// Every element, in lexicographic order of coordinates.
  std::vector<std::vector<std::int64_t>> elements() const {
    std::vector<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> x(orders_.size(), 0);
    for (std::int64_t n = 0; n < order(); ++n) {
      out.push_back(x);
      for (std::size_t i = x.size(); i-- > 0;) {
        if (++x[i] < orders_[i]) break;
        x[i] = 0;
      }
    }
    return out;
  }

 private:
  std::size_t k_ = 0;
  std::vector<std::size_t> keep_;
  std::vector<std::int64_t> orders_;
  IntMatrix V_, Vinv_;
};

/// Apply a coordinate map (rows = images of unit vectors) to an element.
inline std::vector<std::int64_t> apply_map(const IntMatrix& images, const std::vector<std::int64_t>& x,
                                           const FiniteAbelianGroup& target) {
  std::vector<std::int64_t> r = target.identity();
  for (std::size_t i = 0; i < x.size(); ++i) r = target.add(r, target.scale(images.at(i), x[i]));
  return r;
}

/// A concrete finite abelian group given by a multiplication, enumerated
/// completely with discrete-log tables.
template <class E>
struct EnumeratedGroup {
  FiniteAbelianGroup structure;
  std::map<E, std::vector<std::int64_t>> dlog;
  std::vector<E> generators;  // one per invariant factor

  const std::vector<std::int64_t>& log(const E& e) const {
    auto it = dlog.find(e);
    if (it == dlog.end()) throw DomainError("element not in enumerated group");
    return it->second;
  }
};

/// Absorb candidates one at a time until the subgroup they generate has the
/// expected order; relations found on the way give the presentation.
template <class E, class Mul>
EnumeratedGroup<E> enumerate_group(const E& identity, const std::vector<E>& candidates, Mul mul, std::size_t expected_order) {
  std::map<E, std::vector<std::int64_t>> H;
  H.emplace(identity, std::vector<std::int64_t>{});
  std::vector<E> gens;
  IntMatrix rel;
  for (const E& c : candidates) {
    if (H.size() >= expected_order) break;
    if (H.count(c)) continue;
    std::vector<E> powers{identity};
    E x = c;
    while (!H.count(x)) {
      powers.push_back(x);
      x = mul(x, c);
    }
    const std::int64_t m = static_cast<std::int64_t>(powers.size());
    std::vector<std::int64_t> v = H.at(x);
    std::vector<std::int64_t> row(gens.size() + 1, 0);
    for (std::size_t i = 0; i < v.size(); ++i) row[i] = -v[i];
    row[gens.size()] = m;
    for (auto& r : rel) r.push_back(0);
    rel.push_back(row);
    std::map<E, std::vector<std::int64_t>> next;
    for (const auto& [h, vec] : H)
      for (std::int64_t i = 0; i < m; ++i) {
        std::vector<std::int64_t> w = vec;
        w.resize(gens.size(), 0);
        w.push_back(i);
        next.emplace(mul(h, powers[static_cast<std::size_t>(i)]), std::move(w));
      }
    H = std::move(next);
    gens.push_back(c);
  }
  if (H.size() != expected_order)
    throw InconsistencyFound("enumerated " + std::to_string(H.size()) + " elements, expected " + std::to_string(expected_order));
  EnumeratedGroup<E> out;
  out.structure = FiniteAbelianGroup(gens.size(), rel);
  for (auto& [e, vec] : H) {
    vec.resize(gens.size(), 0);
    out.dlog.emplace(e, out.structure.reduce(vec));
  }
  for (std::size_t t = 0; t < out.structure.rank(); ++t) {
    auto coords = out.structure.generator_in_presentation(t);
    E g = identity;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      std::int64_t e = detail::floor_mod(coords[i], out.structure.exponent());
      for (std::int64_t j = 0; j < e; ++j) g = mul(g, gens[i]);
    }
    out.generators.push_back(g);
  }
  return out;
}

}  // namespace lamfam
