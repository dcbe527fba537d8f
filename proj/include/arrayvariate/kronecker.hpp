#pragma once

// Inverse Kronecker product A ⊗ⁱ B = B ⊗ A and chains of it.
//
// With rvec ordering (first index fastest), applying A_j along mode j of an
// array is the same as multiplying its rvec by A_1 ⊗ⁱ A_2 ⊗ⁱ ... ⊗ⁱ A_i.
// Chains are materialized only for checking; hot paths work mode by mode.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "arrayvariate/errors.hpp"
#include "arrayvariate/matrix.hpp"

namespace arrayvariate {

using FactorList = std::vector<DenseMatrix>;

/// Ordinary Kronecker product: block (j,k) is (A)_{jk} B.
inline DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ia = 0; ia < a.rows(); ++ia)
    for (std::size_t ja = 0; ja < a.cols(); ++ja) {
      const double s = a(ia, ja);
      for (std::size_t ib = 0; ib < b.rows(); ++ib)
        for (std::size_t jb = 0; jb < b.cols(); ++jb)
          out(ia * b.rows() + ib, ja * b.cols() + jb) = s * b(ib, jb);
    }
  return out;
}

/// A ⊗ⁱ B: block (j,k) of the result is A scaled by (B)_{jk}.
inline DenseMatrix inv_kron(const DenseMatrix& a, const DenseMatrix& b) { return kron(b, a); }

/// Left fold A_1 ⊗ⁱ A_2 ⊗ⁱ ... ⊗ⁱ A_i.
inline DenseMatrix inv_kron_chain(std::span<const DenseMatrix> factors) {
  if (factors.empty()) throw ShapeError("empty factor list");
  DenseMatrix acc = factors[0];
  for (std::size_t j = 1; j < factors.size(); ++j) acc = inv_kron(acc, factors[j]);
  return acc;
}

namespace detail {

inline void require_square_factors(std::span<const DenseMatrix> factors) {
  if (factors.empty()) throw ShapeError("empty factor list");
  for (std::size_t j = 0; j < factors.size(); ++j)
    if (!factors[j].square())
      throw ShapeError("factor " + std::to_string(j + 1) + " is not square");
}

/// Exponent of det(A_j) in the chain determinant: product of the other orders.
inline double det_exponent(std::span<const DenseMatrix> factors, std::size_t j) {
  double e = 1.0;
  for (std::size_t k = 0; k < factors.size(); ++k)
    if (k != j) e *= static_cast<double>(factors[k].rows());
  return e;
}

}  // namespace detail

/// det(A_1 ⊗ⁱ ... ⊗ⁱ A_i) = prod_j det(A_j)^{prod_{k≠j} m_k}. Overflows for
/// large chains; densities use chain_log_abs_det instead.
inline double chain_det(std::span<const DenseMatrix> factors) {
  detail::require_square_factors(factors);
  double d = 1.0;
  for (std::size_t j = 0; j < factors.size(); ++j)
    d *= std::pow(lu_det(factors[j]), detail::det_exponent(factors, j));
  return d;
}

/// sum_j (prod_{k≠j} m_k) log|det A_j|.
inline double chain_log_abs_det(std::span<const DenseMatrix> factors) {
  detail::require_square_factors(factors);
  double s = 0.0;
  for (std::size_t j = 0; j < factors.size(); ++j)
    s += detail::det_exponent(factors, j) * LuDecomposition(factors[j]).log_abs_determinant();
  return s;
}

inline double chain_trace(std::span<const DenseMatrix> factors) {
  detail::require_square_factors(factors);
  double t = 1.0;
  for (const auto& f : factors) t *= trace(f);
  return t;
}

}  // namespace arrayvariate
