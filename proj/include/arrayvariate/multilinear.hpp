#pragma once

// R-matrix multiplication (A_1)^1 (A_2)^2 ... (A_i)^i X: one matrix applied
// along each mode, and the multilinear least-squares estimator built on it.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "arrayvariate/array.hpp"
#include "arrayvariate/errors.hpp"
#include "arrayvariate/kronecker.hpp"
#include "arrayvariate/matrix.hpp"

namespace arrayvariate {

/// One map per mode; map j is q_j x m_j.
using ModeMaps = std::vector<DenseMatrix>;

namespace detail {

inline void require_conformable(std::span<const DenseMatrix> maps, const Shape& shape) {
  if (maps.size() != shape.order())
    throw ShapeError(std::to_string(maps.size()) + " mode maps for an order-" +
                     std::to_string(shape.order()) + " array");
  for (std::size_t j = 0; j < maps.size(); ++j)
    if (maps[j].cols() != shape.dims()[j])
      throw ShapeError("map for mode " + std::to_string(j + 1) + " has " +
                       std::to_string(maps[j].cols()) + " columns, mode extent is " +
                       std::to_string(shape.dims()[j]));
}

}  // namespace detail

/// Applies `a` (q x m_mode) along one-based `mode`.
inline DataArray mode_multiply(const DenseMatrix& a, std::size_t mode, const DataArray& x) {
  const Shape& s = x.shape();
  if (mode < 1 || mode > s.order()) throw ShapeError("mode out of range");
  const std::size_t m = s.extent(mode);
  if (a.cols() != m)
    throw ShapeError("map for mode " + std::to_string(mode) + " has " + std::to_string(a.cols()) +
                     " columns, mode extent is " + std::to_string(m));
  std::size_t left = 1;
  for (std::size_t k = 0; k + 1 < mode; ++k) left *= s.dims()[k];
  const std::size_t right = s.size() / (left * m);
  const std::size_t q = a.rows();

  std::vector<std::size_t> dims = s.dims();
  dims[mode - 1] = q;
  DataArray y{Shape(dims)};
  const auto in = x.data();
  auto out = y.data();
  // x viewed as left x m x right, y as left x q x right, both first index fastest.
  for (std::size_t r = 0; r < right; ++r) {
    const double* xs = in.data() + r * left * m;
    double* ys = out.data() + r * left * q;
    for (std::size_t b = 0; b < m; ++b) {
      const double* xcol = xs + b * left;
      for (std::size_t c = 0; c < q; ++c) {
        const double w = a(c, b);
        if (w == 0.0) continue;
        double* ycol = ys + c * left;
        for (std::size_t l = 0; l < left; ++l) ycol[l] += w * xcol[l];
      }
    }
  }
  return y;
}

/// (A_1)^1 ... (A_i)^i X, evaluated one mode at a time in order 1..i.
inline DataArray r_multiply(std::span<const DenseMatrix> maps, const DataArray& x) {
  detail::require_conformable(maps, x.shape());
  DataArray y = x;
  for (std::size_t j = 0; j < maps.size(); ++j) y = mode_multiply(maps[j], j + 1, y);
  return y;
}

/// Direct nested-sum evaluation of R-matrix multiplication. Cost is
/// prod(q_j) * prod(m_j); intended as a reference for testing.
inline DataArray r_multiply_oracle(std::span<const DenseMatrix> maps, const DataArray& x) {
  const Shape& s = x.shape();
  detail::require_conformable(maps, s);
  std::vector<std::size_t> out_dims(maps.size());
  for (std::size_t j = 0; j < maps.size(); ++j) out_dims[j] = maps[j].rows();
  const Shape out_shape(out_dims);
  DataArray y(out_shape);
  for (std::size_t p = 1; p <= out_shape.size(); ++p) {
    const auto q = multi_index(p, out_shape);
    double total = 0.0;
    for (std::size_t k = 1; k <= s.size(); ++k) {
      const auto r = multi_index(k, s);
      double w = 1.0;
      for (std::size_t j = 0; j < maps.size() && w != 0.0; ++j) w *= maps[j](q[j] - 1, r[j] - 1);
      total += w * x[k - 1];
    }
    y[p - 1] = total;
  }
  return y;
}

/// max |rvec(r_multiply(maps, X)) - (A_1 ⊗ⁱ ... ⊗ⁱ A_i) rvec(X)|.
inline double monolinear_equiv_check(std::span<const DenseMatrix> maps, const DataArray& x) {
  const DataArray y = r_multiply(maps, x);
  const Vector l = matvec(inv_kron_chain(maps), x.data());
  return max_abs_diff(y.data(), l);
}

/// Deviation between applying `b` then `a` and applying the products a_j b_j.
inline double composition_check(std::span<const DenseMatrix> a, std::span<const DenseMatrix> b,
                                const DataArray& x) {
  if (a.size() != b.size()) throw ShapeError("map chains of different length");
  const DataArray sequential = r_multiply(a, r_multiply(b, x));
  ModeMaps prod;
  prod.reserve(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) prod.push_back(matmul(a[j], b[j]));
  const DataArray combined = r_multiply(prod, x);
  if (sequential.shape() != combined.shape()) throw ShapeError("composed shapes differ");
  return max_abs_diff(sequential.data(), combined.data());
}

/// Minimizer of ||Y - (A_1)^1 ... (A_i)^i X||^2 over X: applies the left
/// inverse of each map along its mode.
inline DataArray multilinear_lstsq(std::span<const DenseMatrix> maps, const DataArray& y) {
  if (maps.size() != y.order())
    throw ShapeError(std::to_string(maps.size()) + " mode maps for an order-" +
                     std::to_string(y.order()) + " array");
  ModeMaps pinv;
  pinv.reserve(maps.size());
  for (std::size_t j = 0; j < maps.size(); ++j) {
    if (maps[j].rows() != y.shape().dims()[j])
      throw ShapeError("map for mode " + std::to_string(j + 1) + " has " +
                       std::to_string(maps[j].rows()) + " rows, mode extent is " +
                       std::to_string(y.shape().dims()[j]));
    try {
      pinv.push_back(l_inverse(maps[j]));
    } catch (const SingularityError&) {
      throw SingularityError("map for mode " + std::to_string(j + 1) + " is rank deficient", j + 1);
    }
  }
  return r_multiply(pinv, y);
}

}  // namespace arrayvariate
