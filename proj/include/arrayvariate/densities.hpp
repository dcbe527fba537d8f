#pragma once

// Spherical kernels and log-densities of Kronecker-structured elliptical
// arrays X = (A_1)^1 ... (A_i)^i Z + M, where Z has a spherical density
// f(||Z||^2) on R^m, m = m_1 ... m_i.
//
// Everything is computed in log space; exp() of a log-density underflows or
// overflows quickly once m is in the hundreds.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "arrayvariate/array.hpp"
#include "arrayvariate/errors.hpp"
#include "arrayvariate/kronecker.hpp"
#include "arrayvariate/matrix.hpp"
#include "arrayvariate/multilinear.hpp"

namespace arrayvariate {

struct NormalKernel {};

struct StudentTKernel {
  double df;
};

/// User-supplied kernel: density c(k) * f(t) on R^k, given in log form.
/// The library does not normalize it; `log_normalizer(k)` must make it a
/// density on R^k.
struct CustomKernel {
  std::function<double(double t)> log_shape;
  std::function<double(std::size_t k)> log_normalizer;
};

class Kernel {
 public:
  using Variant = std::variant<NormalKernel, StudentTKernel, CustomKernel>;

  Kernel() = default;

  static Kernel normal() { return Kernel(NormalKernel{}); }
  static Kernel student_t(double df) {
    if (!(df > 0.0) || !std::isfinite(df))
      throw ParameterError("degrees of freedom must be positive, got " + std::to_string(df));
    return Kernel(StudentTKernel{df});
  }
  /// Spherical Cauchy, the t kernel with one degree of freedom.
  static Kernel cauchy() { return student_t(1.0); }
  static Kernel custom(CustomKernel k) {
    if (!k.log_shape || !k.log_normalizer)
      throw ParameterError("custom kernel needs both a shape and a normalizer");
    return Kernel(std::move(k));
  }

  const Variant& variant() const noexcept { return v_; }
  bool is_normal() const noexcept { return std::holds_alternative<NormalKernel>(v_); }
  bool is_student_t() const noexcept { return std::holds_alternative<StudentTKernel>(v_); }
  bool is_custom() const noexcept { return std::holds_alternative<CustomKernel>(v_); }
  /// Degrees of freedom of a t kernel.
  double df() const {
    if (!is_student_t()) throw ParameterError("kernel has no degrees of freedom");
    return std::get<StudentTKernel>(v_).df;
  }

  std::string name() const {
    if (is_normal()) return "normal";
    if (is_student_t()) return df() == 1.0 ? "cauchy" : "t";
    return "custom";
  }

 private:
  explicit Kernel(Variant v) : v_(std::move(v)) {}
  Variant v_ = NormalKernel{};
};

inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;  // log(2π)

namespace detail {

inline void require_dim(std::size_t k) {
  if (k < 1) throw DomainError("dimension must be at least 1");
}

/// log Γ((v+k)/2) - log Γ(v/2) - (k/2) log(vπ)
inline double t_log_normalizer(double v, std::size_t k) {
  const double kd = static_cast<double>(k);
  return std::lgamma(0.5 * (v + kd)) - std::lgamma(0.5 * v) -
         0.5 * kd * std::log(v * std::numbers::pi);
}

}  // namespace detail

/// log f(t) for the spherical density on R^k, evaluated at t = x'x.
inline double kernel_log_pdf(const Kernel& kernel, double t, std::size_t k) {
  if (!(t >= 0.0)) throw DomainError("kernel argument must be nonnegative");
  detail::require_dim(k);
  const double kd = static_cast<double>(k);
  return std::visit(
      [&](const auto& kern) -> double {
        using K = std::decay_t<decltype(kern)>;
        if constexpr (std::is_same_v<K, NormalKernel>) {
          return -0.5 * kd * kLogTwoPi - 0.5 * t;
        } else if constexpr (std::is_same_v<K, StudentTKernel>) {
          const double v = kern.df;
          return detail::t_log_normalizer(v, k) - 0.5 * (v + kd) * std::log1p(t / v);
        } else {
          return kern.log_normalizer(k) + kern.log_shape(t);
        }
      },
      kernel.variant());
}

inline double kernel_pdf(const Kernel& kernel, double t, std::size_t k) {
  return std::exp(kernel_log_pdf(kernel, t, k));
}

/// log of k(r) = 2 π^{k/2} / Γ(k/2) r^{k-1} f(r^2), the density of r = ||x||.
inline double radial_log_pdf(const Kernel& kernel, double r, std::size_t k) {
  if (!(r >= 0.0)) throw DomainError("radius must be nonnegative");
  detail::require_dim(k);
  const double kd = static_cast<double>(k);
  const double log_surface = std::log(2.0) + 0.5 * kd * std::log(std::numbers::pi) -
                             std::lgamma(0.5 * kd);
  const double log_power = k == 1 ? 0.0 : (kd - 1.0) * std::log(r);
  return log_surface + log_power + kernel_log_pdf(kernel, r * r, k);
}

inline double radial_pdf(const Kernel& kernel, double r, std::size_t k) {
  return std::exp(radial_log_pdf(kernel, r, k));
}

/// sum_j (prod_{k≠j} m_k) log|det A_j|, the log of the Jacobian divisor of
/// X = (A_1)^1 ... (A_i)^i Z + M. `squared` doubles it (the log-determinant
/// of the implied covariance K K').
inline double log_jacobian(std::span<const DenseMatrix> factors, bool squared = false) {
  detail::require_square_factors(factors);
  double s = 0.0;
  for (std::size_t j = 0; j < factors.size(); ++j) {
    const LuDecomposition lu(factors[j]);
    if (lu.singular())
      throw SingularityError("factor " + std::to_string(j + 1) + " is singular", j + 1);
    s += detail::det_exponent(factors, j) * lu.log_abs_determinant();
  }
  return squared ? 2.0 * s : s;
}

/// Location M, one non-singular square factor per mode, and a kernel.
/// Factor inverses and the log-Jacobian are computed once at construction.
class KroneckerModel {
 public:
  KroneckerModel(DataArray mean, FactorList factors, Kernel kernel = Kernel::normal())
      : mean_(std::move(mean)), factors_(std::move(factors)), kernel_(std::move(kernel)) {
    if (factors_.size() != mean_.order())
      throw ShapeError(std::to_string(factors_.size()) + " factors for an order-" +
                       std::to_string(mean_.order()) + " mean");
    for (std::size_t j = 0; j < factors_.size(); ++j) {
      const std::size_t mj = mean_.shape().dims()[j];
      if (factors_[j].rows() != mj || factors_[j].cols() != mj)
        throw ShapeError("factor " + std::to_string(j + 1) + " must be " + std::to_string(mj) +
                         "x" + std::to_string(mj));
    }
    log_jacobian_ = arrayvariate::log_jacobian(factors_);
    inverses_.reserve(factors_.size());
    for (const auto& f : factors_) inverses_.push_back(inverse(f));
  }

  /// Zero mean of the shape implied by square factors.
  static KroneckerModel centered(FactorList factors, Kernel kernel = Kernel::normal()) {
    std::vector<std::size_t> dims;
    for (const auto& f : factors) dims.push_back(f.rows());
    return KroneckerModel(DataArray(Shape(dims)), std::move(factors), std::move(kernel));
  }

  const DataArray& mean() const noexcept { return mean_; }
  const FactorList& factors() const noexcept { return factors_; }
  const FactorList& inverse_factors() const noexcept { return inverses_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  const Shape& shape() const noexcept { return mean_.shape(); }
  std::size_t dimension() const noexcept { return mean_.size(); }
  double log_jacobian() const noexcept { return log_jacobian_; }

  KroneckerModel with_kernel(Kernel k) const {
    KroneckerModel copy = *this;
    copy.kernel_ = std::move(k);
    return copy;
  }

 private:
  DataArray mean_;
  FactorList factors_;
  FactorList inverses_;
  Kernel kernel_;
  double log_jacobian_ = 0.0;
};

/// Z = (A_1^{-1})^1 ... (A_i^{-1})^i (X - M).
inline DataArray standardize(const KroneckerModel& model, const DataArray& x) {
  if (x.shape() != model.shape())
    throw ShapeError("array shape " + x.shape().to_string() + " does not match model shape " +
                     model.shape().to_string());
  return r_multiply(model.inverse_factors(), x - model.mean());
}

/// X = (A_1)^1 ... (A_i)^i Z + M, the inverse of standardize.
inline DataArray unstandardize(const KroneckerModel& model, const DataArray& z) {
  if (z.shape() != model.shape()) throw ShapeError("array shape does not match model shape");
  return r_multiply(model.factors(), z) + model.mean();
}

/// Log-density under the model's kernel.
inline double logpdf_elliptical(const KroneckerModel& model, const DataArray& x) {
  const double q = sq_norm(standardize(model, x));
  return kernel_log_pdf(model.kernel(), q, model.dimension()) - model.log_jacobian();
}

/// Array normal log-density with the model's location and factors. The
/// model's own kernel is not consulted.
inline double logpdf_normal(const KroneckerModel& model, const DataArray& x) {
  const double q = sq_norm(standardize(model, x));
  const double m = static_cast<double>(model.dimension());
  return -0.5 * q - 0.5 * m * kLogTwoPi - model.log_jacobian();
}

/// Array t log-density with `df` degrees of freedom, using the model's
/// location and factors:
/// log Γ((v+m)/2) - log Γ(v/2) - (m/2) log(vπ) - ((v+m)/2) log(1 + q/v) - log J.
inline double logpdf_t(const KroneckerModel& model, const DataArray& x, double df) {
  if (!(df > 0.0)) throw ParameterError("degrees of freedom must be positive");
  const double q = sq_norm(standardize(model, x));
  const std::size_t m = model.dimension();
  return detail::t_log_normalizer(df, m) -
         0.5 * (df + static_cast<double>(m)) * std::log1p(q / df) - model.log_jacobian();
}

/// exp(logpdf_elliptical); overflow/underflow prone for large arrays.
inline double pdf_elliptical(const KroneckerModel& model, const DataArray& x) {
  return std::exp(logpdf_elliptical(model, x));
}

}  // namespace arrayvariate
