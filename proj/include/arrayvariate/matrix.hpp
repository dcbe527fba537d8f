#pragma once

// Small dense matrices: LU with partial pivoting, Cholesky, determinant,
// inverse, left inverse. Sized for mode factors (a handful to a few hundred
// rows), not for large-scale work.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "arrayvariate/array.hpp"
#include "arrayvariate/errors.hpp"

namespace arrayvariate {

/// Pivot ratio below which a factorization is declared singular.
inline constexpr double kSingularPivotRatio = 1e-12;

/// Row-major dense matrix with zero-based (row, col) access.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw ShapeError("matrix dimensions must be positive");
  }

  /// Row-by-row literal, e.g. {{1, 2}, {3, 4}}.
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    if (rows_ == 0 || cols_ == 0) throw ShapeError("matrix dimensions must be positive");
    a_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ShapeError("ragged matrix literal");
      a_.insert(a_.end(), r.begin(), r.end());
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static DenseMatrix diagonal(std::span<const double> d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  static DenseMatrix diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }

  /// Builds from row-major values.
  static DenseMatrix from_rows(std::size_t rows, std::size_t cols, std::vector<double> values) {
    if (values.size() != rows * cols) throw ShapeError("value count does not match dimensions");
    DenseMatrix m(rows, cols);
    m.a_ = std::move(values);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }

  /// Row-major storage.
  std::span<const double> values() const noexcept { return a_; }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    require_same(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  DenseMatrix& operator-=(const DenseMatrix& o) {
    require_same(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  DenseMatrix& operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
  }
  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }
  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  void require_same(const DenseMatrix& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw ShapeError("matrix dimension mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

inline DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Vector matvec(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw ShapeError("matvec: dimension mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

inline double trace(const DenseMatrix& a) {
  if (!a.square()) throw ShapeError("trace of a non-square matrix");
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("matrix dimension mismatch");
  return max_abs_diff(a.values(), b.values());
}

/// PA = LU with unit-lower L and upper U packed into one matrix.
class LuDecomposition {
 public:
  explicit LuDecomposition(const DenseMatrix& a) : lu_(a), perm_(a.rows()) {
    if (!a.square()) throw ShapeError("LU of a non-square matrix");
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    double max_pivot = 0.0;
    double min_pivot = INFINITY;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
        std::swap(perm_[k], perm_[p]);
        sign_ = -sign_;
      }
      const double pivot = lu_(k, k);
      max_pivot = std::max(max_pivot, std::abs(pivot));
      min_pivot = std::min(min_pivot, std::abs(pivot));
      if (pivot == 0.0) continue;
      for (std::size_t i = k + 1; i < n; ++i) {
        const double f = (lu_(i, k) /= pivot);
        if (f == 0.0) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
    singular_ = !(max_pivot > 0.0) || min_pivot < kSingularPivotRatio * max_pivot;
  }

  bool singular() const noexcept { return singular_; }

  double determinant() const {
    double d = sign_;
    for (std::size_t i = 0; i < lu_.rows(); ++i) d *= lu_(i, i);
    return d;
  }

  /// log|det A|; -inf for an exactly singular matrix.
  double log_abs_determinant() const {
    double s = 0.0;
    for (std::size_t i = 0; i < lu_.rows(); ++i) s += std::log(std::abs(lu_(i, i)));
    return s;
  }

  Vector solve(std::span<const double> b) const {
    require_regular();
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw ShapeError("solve: right-hand side length mismatch");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
      x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = x[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
      x[i] = s / lu_(i, i);
    }
    return x;
  }

  DenseMatrix inverse() const {
    require_regular();
    const std::size_t n = lu_.rows();
    DenseMatrix inv(n, n);
    Vector e(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      std::fill(e.begin(), e.end(), 0.0);
      e[c] = 1.0;
      const Vector col = solve(e);
      for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
    }
    return inv;
  }

 private:
  void require_regular() const {
    if (singular_) throw SingularityError("matrix is singular to working precision");
  }

  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
  double sign_ = 1.0;
  bool singular_ = false;
};

/// A = L L' for symmetric positive definite A. Only the lower triangle is read.
class Cholesky {
 public:
  explicit Cholesky(const DenseMatrix& a) : l_(a.rows(), a.cols()) {
    if (!a.square()) throw ShapeError("Cholesky of a non-square matrix");
    const std::size_t n = a.rows();
    // Pivots of the elimination are the squared diagonal entries of L.
    double max_pivot = 0.0;
    double min_pivot = INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
      double d = a(j, j);
      for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
      if (!(d > 0.0)) throw SingularityError("matrix is not positive definite");
      max_pivot = std::max(max_pivot, d);
      min_pivot = std::min(min_pivot, d);
      const double ljj = std::sqrt(d);
      l_(j, j) = ljj;
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = a(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
        l_(i, j) = s / ljj;
      }
    }
    if (min_pivot < kSingularPivotRatio * max_pivot)
      throw SingularityError("matrix is not positive definite to working precision");
  }

  const DenseMatrix& lower() const noexcept { return l_; }

  double log_determinant() const {
    double s = 0.0;
    for (std::size_t i = 0; i < l_.rows(); ++i) s += std::log(l_(i, i));
    return 2.0 * s;
  }

  /// Solves L y = b.
  Vector solve_lower(std::span<const double> b) const {
    const std::size_t n = l_.rows();
    if (b.size() != n) throw ShapeError("solve: right-hand side length mismatch");
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i];
      for (std::size_t j = 0; j < i; ++j) s -= l_(i, j) * y[j];
      y[i] = s / l_(i, i);
    }
    return y;
  }

  Vector solve(std::span<const double> b) const {
    Vector x = solve_lower(b);
    const std::size_t n = l_.rows();
    for (std::size_t i = n; i-- > 0;) {
      double s = x[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= l_(j, i) * x[j];
      x[i] = s / l_(i, i);
    }
    return x;
  }

 private:
  DenseMatrix l_;
};

inline double lu_det(const DenseMatrix& a) { return LuDecomposition(a).determinant(); }

inline DenseMatrix inverse(const DenseMatrix& a) { return LuDecomposition(a).inverse(); }

inline Vector solve(const DenseMatrix& a, std::span<const double> b) {
  return LuDecomposition(a).solve(b);
}

/// Left inverse (A'A)^{-1} A' for full-column-rank A.
inline DenseMatrix l_inverse(const DenseMatrix& a) {
  const DenseMatrix at = transpose(a);
  const Cholesky chol(matmul(at, a));
  DenseMatrix out(a.cols(), a.rows());
  Vector col(a.cols());
  for (std::size_t c = 0; c < a.rows(); ++c) {
    for (std::size_t r = 0; r < a.cols(); ++r) col[r] = at(r, c);
    const Vector x = chol.solve(col);
    for (std::size_t r = 0; r < a.cols(); ++r) out(r, c) = x[r];
  }
  return out;
}

}  // namespace arrayvariate
