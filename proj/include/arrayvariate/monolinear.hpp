#pragma once

// The monolinear form of an array normal: rvec(X) ~ N_m(rvec(M), Λ).
// Marginals and conditionals are taken here, on the materialized Λ; the
// Kronecker structure is not preserved by conditioning in general.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "arrayvariate/array.hpp"
#include "arrayvariate/densities.hpp"
#include "arrayvariate/errors.hpp"
#include "arrayvariate/kronecker.hpp"
#include "arrayvariate/matrix.hpp"

namespace arrayvariate {

/// Largest m for which the m x m covariance is materialized.
inline constexpr std::size_t kMaxMonolinearDimension = 4096;

class MonolinearNormal {
 public:
  MonolinearNormal(Vector mean, DenseMatrix covariance)
      : mean_(std::move(mean)), cov_(std::move(covariance)), chol_(checked(cov_, mean_.size())) {}

  const Vector& mean() const noexcept { return mean_; }
  const DenseMatrix& covariance() const noexcept { return cov_; }
  const Cholesky& cholesky() const noexcept { return chol_; }
  std::size_t dimension() const noexcept { return mean_.size(); }

  double logpdf(std::span<const double> x) const {
    if (x.size() != mean_.size()) throw ShapeError("point dimension does not match");
    Vector d(x.begin(), x.end());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] -= mean_[k];
    const Vector y = chol_.solve_lower(d);
    double q = 0.0;
    for (double v : y) q += v * v;
    return -0.5 * q - 0.5 * static_cast<double>(d.size()) * kLogTwoPi -
           0.5 * chol_.log_determinant();
  }

 private:
  static const DenseMatrix& checked(const DenseMatrix& c, std::size_t m) {
    if (m == 0) throw ShapeError("empty mean");
    if (c.rows() != m || c.cols() != m)
      throw ShapeError("covariance must be " + std::to_string(m) + "x" + std::to_string(m));
    double scale = 1.0;
    for (double v : c.values()) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (std::abs(c(i, j) - c(j, i)) > 1e-10 * scale)
          throw ShapeError("covariance is not symmetric");
    return c;
  }

  Vector mean_;
  DenseMatrix cov_;
  Cholesky chol_;
};

/// Mean rvec(M) and covariance K K', K = A_1 ⊗ⁱ ... ⊗ⁱ A_i.
inline MonolinearNormal to_monolinear(const KroneckerModel& model) {
  if (model.dimension() > kMaxMonolinearDimension)
    throw CapacityError("monolinear form of dimension " + std::to_string(model.dimension()) +
                        " exceeds the limit of " + std::to_string(kMaxMonolinearDimension));
  // K K' = (A_1 A_1') ⊗ⁱ ... ⊗ⁱ (A_i A_i') by the mixed-product law; each
  // factor, hence the chain, is exactly symmetric.
  FactorList grams;
  for (const auto& a : model.factors()) grams.push_back(matmul(a, transpose(a)));
  return MonolinearNormal(rvec(model.mean()), inv_kron_chain(grams));
}

namespace detail {

inline std::vector<std::size_t> zero_based_indices(std::span<const std::size_t> idx,
                                                   std::size_t m) {
  if (idx.empty()) throw IndexError("index set is empty");
  std::vector<std::size_t> out;
  out.reserve(idx.size());
  std::vector<bool> seen(m, false);
  for (std::size_t i : idx) {
    if (i < 1 || i > m)
      throw IndexError("index " + std::to_string(i) + " out of range 1.." + std::to_string(m));
    if (seen[i - 1]) throw IndexError("index " + std::to_string(i) + " repeated");
    seen[i - 1] = true;
    out.push_back(i - 1);
  }
  return out;
}

inline DenseMatrix submatrix(const DenseMatrix& a, std::span<const std::size_t> rows,
                             std::span<const std::size_t> cols) {
  DenseMatrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = a(rows[i], cols[j]);
  return out;
}

}  // namespace detail

/// Distribution of the coordinates `keep` (one-based, in the given order).
inline MonolinearNormal marginal(const MonolinearNormal& dist, std::span<const std::size_t> keep) {
  const auto s = detail::zero_based_indices(keep, dist.dimension());
  Vector mean(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) mean[i] = dist.mean()[s[i]];
  return MonolinearNormal(std::move(mean), detail::submatrix(dist.covariance(), s, s));
}

/// Distribution of the remaining coordinates (ascending order) given that
/// coordinates `given` (one-based) equal `values`.
inline MonolinearNormal conditional(const MonolinearNormal& dist,
                                    std::span<const std::size_t> given,
                                    std::span<const double> values) {
  const std::size_t m = dist.dimension();
  const auto g = detail::zero_based_indices(given, m);
  if (g.size() >= m) throw IndexError("conditioning set must be a proper subset");
  if (values.size() != g.size()) throw ShapeError("one conditioning value per index required");
  std::vector<bool> in_g(m, false);
  for (std::size_t i : g) in_g[i] = true;
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < m; ++i)
    if (!in_g[i]) s.push_back(i);

  const DenseMatrix& cov = dist.covariance();
  const LuDecomposition gg(detail::submatrix(cov, g, g));
  if (gg.singular()) throw SingularityError("covariance of the conditioning block is singular");
  const DenseMatrix sg = detail::submatrix(cov, s, g);

  Vector resid(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) resid[i] = values[i] - dist.mean()[g[i]];
  const Vector w = gg.solve(resid);
  Vector mean(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    double v = dist.mean()[s[i]];
    for (std::size_t k = 0; k < g.size(); ++k) v += sg(i, k) * w[k];
    mean[i] = v;
  }

  // Λ_SS - Λ_SG Λ_GG^{-1} Λ_GS, one column of Λ_GG^{-1} Λ_GS at a time.
  DenseMatrix c = detail::submatrix(cov, s, s);
  Vector col(g.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    for (std::size_t k = 0; k < g.size(); ++k) col[k] = cov(g[k], s[j]);
    const Vector h = gg.solve(col);
    for (std::size_t i = 0; i < s.size(); ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) acc += sg(i, k) * h[k];
      c(i, j) -= acc;
    }
  }
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) c(i, j) = c(j, i) = 0.5 * (c(i, j) + c(j, i));
  return MonolinearNormal(std::move(mean), std::move(c));
}

}  // namespace arrayvariate
