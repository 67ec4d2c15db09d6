#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lamfam/padic.hpp"

namespace lamfam {

/// Dense matrix over Z_{p^2} / p^N, row-major.
class PadicMatrix {
 public:
  PadicMatrix() = default;
  PadicMatrix(std::size_t rows, std::size_t cols, const PadicElem& shape)
      : rows_(rows), cols_(cols), data_(rows * cols, shape.zero_like()), zero_(shape.zero_like()) {}

  static PadicMatrix identity(std::size_t n, const PadicElem& shape) {
    PadicMatrix m(n, n, shape);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = shape.one_like();
    return m;
  }

  /// Columns given as vectors of equal length.
  static PadicMatrix from_columns(const std::vector<std::vector<PadicElem>>& cols) {
    if (cols.empty() || cols[0].empty()) throw DomainError("empty matrix");
    PadicMatrix m(cols[0].size(), cols.size(), cols[0][0]);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != m.rows_) throw CapMismatch("ragged columns");
      for (std::size_t i = 0; i < m.rows_; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const PadicElem& zero() const { return zero_; }

  PadicElem& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const PadicElem& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<PadicElem> column(std::size_t j) const {
    std::vector<PadicElem> c;
    for (std::size_t i = 0; i < rows_; ++i) c.push_back((*this)(i, j));
    return c;
  }

  friend PadicMatrix operator*(const PadicMatrix& a, const PadicMatrix& b) {
    if (a.cols_ != b.rows_) throw CapMismatch("matrix shapes do not chain");
    PadicMatrix r(a.rows_, b.cols_, a.zero_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += a(i, k) * b(k, j);
      }
    return r;
  }
  friend PadicMatrix operator+(const PadicMatrix& a, const PadicMatrix& b) {
    check_same(a, b);
    PadicMatrix r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] += b.data_[i];
    return r;
  }
  friend PadicMatrix operator-(const PadicMatrix& a, const PadicMatrix& b) {
    check_same(a, b);
    PadicMatrix r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] -= b.data_[i];
    return r;
  }
  friend bool operator==(const PadicMatrix& a, const PadicMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator!=(const PadicMatrix& a, const PadicMatrix& b) { return !(a == b); }

  std::vector<PadicElem> apply(const std::vector<PadicElem>& v) const {
    if (v.size() != cols_) throw CapMismatch("vector length differs from column count");
    std::vector<PadicElem> r(rows_, zero_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  PadicMatrix pow(std::uint64_t e) const {
    if (rows_ != cols_) throw CapMismatch("power of a non-square matrix");
    PadicMatrix r = identity(rows_, zero_), b = *this;
    while (e) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }

  bool is_zero() const {
    for (const auto& x : data_)
      if (!x.is_zero()) return false;
    return true;
  }

 private:
  static void check_same(const PadicMatrix& a, const PadicMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw CapMismatch("matrix shapes differ");
  }

  std::size_t rows_ = 0, cols_ = 0;
  std::vector<PadicElem> data_;
  PadicElem zero_;
};

/// Solution of A x = b with A of full column rank. Pivots of positive
/// valuation cost digits; the returned entries carry the reduced precision.
/// Extra rows must be consistent with the solution.
inline std::vector<PadicElem> solve(PadicMatrix A, std::vector<PadicElem> b) {
  const std::size_t m = A.rows(), n = A.cols();
  if (b.size() != m) throw CapMismatch("right-hand side length differs from row count");
  if (m < n) throw RankDeficient("fewer equations than unknowns");
  std::vector<std::size_t> colperm(n);
  for (std::size_t j = 0; j < n; ++j) colperm[j] = j;
  std::vector<int> pivval(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    // pivot of least valuation in the remaining block
    std::size_t pi = m, pj = n;
    int best = A.zero().precision();
    for (std::size_t i = c; i < m; ++i)
      for (std::size_t j = c; j < n; ++j) {
        if (A(i, j).is_zero()) continue;
        const int v = A(i, j).valuation();
        if (v < best) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (pi == m) throw RankDeficient("matrix has rank " + std::to_string(c) + " < " + std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) std::swap(A(c, j), A(pi, j));
    std::swap(b[c], b[pi]);
    for (std::size_t i = 0; i < m; ++i) std::swap(A(i, c), A(i, pj));
    std::swap(colperm[c], colperm[pj]);
    pivval[c] = best;
    // unit part of the pivot
    const PadicElem u = A(c, c).divide_by_p(best).lift_to(A.zero().precision()).inverse();
    for (std::size_t i = c + 1; i < m; ++i) {
      if (A(i, c).is_zero()) continue;
      const PadicElem f = A(i, c).divide_by_p(best).lift_to(A.zero().precision()) * u;
      for (std::size_t j = c; j < n; ++j) A(i, j) -= f * A(c, j);
      b[i] -= f * b[c];
    }
  }
  int lost = 0;
  for (int v : pivval) lost += v;
  for (std::size_t i = n; i < m; ++i)
    if (b[i].with_precision(std::max(0, b[i].precision() - lost)) != b[i].zero_like().with_precision(std::max(0, b[i].precision() - lost)))
      throw InconsistencyFound("overdetermined system is inconsistent");
  std::vector<PadicElem> y(n, A.zero());
  for (std::size_t c = n; c-- > 0;) {
    PadicElem r = b[c];
    for (std::size_t j = c + 1; j < n; ++j) r -= A(c, j) * y[j];
    const int v = pivval[static_cast<std::size_t>(c)];
    const PadicElem unit = A(c, c).divide_by_p(v).inverse();
    if (r.valuation() < v) throw InconsistencyFound("system has no integral solution");
    y[c] = (r.divide_by_p(v) * unit).lift_to(A.zero().precision());
  }
  std::vector<PadicElem> x(n, A.zero());
  const int cert = std::max(0, A.zero().precision() - lost);
  for (std::size_t c = 0; c < n; ++c) x[colperm[c]] = y[c].with_precision(cert);
  return x;
}

}  // namespace lamfam
