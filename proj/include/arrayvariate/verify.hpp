#pragma once

// Monte Carlo checks of the density and sampler contracts. Each check draws
// from its own RandomStream(seed), so a report is reproducible from
// (name, seed, n).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "arrayvariate/array.hpp"
#include "arrayvariate/densities.hpp"
#include "arrayvariate/errors.hpp"
#include "arrayvariate/monolinear.hpp"
#include "arrayvariate/sampling.hpp"

namespace arrayvariate {

inline constexpr double kMomentZLimit = 3.0;
inline constexpr double kCovarianceZLimit = 5.0;
inline constexpr double kKsAlpha = 0.01;
inline constexpr std::size_t kMaxNormalizationDimension = 6;
inline constexpr std::size_t kMaxCovarianceDimension = 16;

/// Outcome of one Monte Carlo check.
///
/// normalization: estimate = mean importance weight, target = 1,
///                statistic = (estimate - 1) / stderr, passed iff |z| <= 3.
/// covariance:    estimate/target/stderr are the sample covariance entry,
///                its target and its standard error at the worst entry,
///                statistic = max |z| over entries, passed iff <= 5.
/// radial:        estimate = KS p-value, target = alpha = 0.01,
///                statistic = KS distance, stderr = 0, passed iff p >= alpha.
struct McReport {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  double statistic = 0.0;
  bool passed = false;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  /// `name estimate stderr target statistic passed n seed`, reals with 17
  /// significant digits, passed as 1/0.
  std::string to_record() const {
    std::ostringstream os;
    os << std::setprecision(17) << name << ' ' << estimate << ' ' << std_error << ' ' << target
       << ' ' << statistic << ' ' << (passed ? 1 : 0) << ' ' << n << ' ' << seed;
    return os.str();
  }

  static McReport from_record(const std::string& line) {
    std::istringstream is(line);
    McReport r;
    int passed = 0;
    if (!(is >> r.name >> r.estimate >> r.std_error >> r.target >> r.statistic >> passed >> r.n >>
          r.seed))
      throw FormatError("report", 1, "malformed report record");
    r.passed = passed != 0;
    return r;
  }
};

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

/// P(K > lambda) for the Kolmogorov distribution.
inline double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Theta-function form converges fast for small lambda.
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    double s = 0.0;
    for (int j = 1; j <= 9; j += 2) s += std::pow(y, j * j);
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s;
  }
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    s += (j % 2 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

struct KsResult {
  double distance;
  double p_value;
};

/// One-sample KS test; `sorted` must be ascending and `cdf` gives the model
/// CDF at each sorted point.
inline KsResult ks_test_sorted(std::span<const double> sorted, std::span<const double> cdf) {
  const std::size_t n = sorted.size();
  if (n == 0 || cdf.size() != n) throw ShapeError("KS test needs matching non-empty inputs");
  const double nd = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    d = std::max(d, std::abs(static_cast<double>(k + 1) / nd - cdf[k]));
    d = std::max(d, std::abs(cdf[k] - static_cast<double>(k) / nd));
  }
  const double rn = std::sqrt(nd);
  return {d, kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d)};
}

inline KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  std::vector<double> f(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) f[k] = cdf(samples[k]);
  return ks_test_sorted(samples, f);
}

// ---------------------------------------------------------------------------
// Quadrature of the radial density

namespace detail {

using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;

inline double integrate_checked(const std::function<double(double)>& f, double a, double b,
                                double abs_tol) {
  double err = 0.0;
  double v = 0.0;
  if (std::isfinite(a) && std::isfinite(b)) {
    // Boost 1.74 compares an unscaled error estimate with a scaled tolerance,
    // so short intervals recurse to max depth. Integrate over [0, 1] instead.
    const double w = b - a;
    v = Quadrature::integrate([&](double t) { return w * f(a + w * t); }, 0.0, 1.0, 15, 1e-13, &err);
  } else {
    v = Quadrature::integrate(f, a, b, 15, 1e-13, &err);
  }
  if (!std::isfinite(v) || !(err <= abs_tol))
    throw NumericError("quadrature failed to converge (error estimate " + std::to_string(err) +
                       ")");
  return v;
}

}  // namespace detail

/// Integral of radial_pdf over [0, inf).
inline double radial_total_mass(const Kernel& kernel, std::size_t k) {
  return detail::integrate_checked([&](double r) { return radial_pdf(kernel, r, k); }, 0.0,
                                   std::numeric_limits<double>::infinity(), 1e-8);
}

/// CDF of the radial law at each point of ascending `sorted`, by adaptive
/// quadrature of radial_pdf accumulated between consecutive points.
inline std::vector<double> radial_cdf_sorted(const Kernel& kernel, std::size_t k,
                                             std::span<const double> sorted) {
  std::vector<double> out(sorted.size());
  const auto f = [&](double r) { return radial_pdf(kernel, r, k); };
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < prev) throw DomainError("radii must be sorted and nonnegative");
    if (sorted[i] > prev) acc += detail::integrate_checked(f, prev, sorted[i], 1e-10);
    prev = sorted[i];
    out[i] = std::min(acc, 1.0);
  }
  return out;
}

inline double radial_cdf(const Kernel& kernel, std::size_t k, double r) {
  const double pts[] = {r};
  return radial_cdf_sorted(kernel, k, pts)[0];
}

/// Integral of exp(logpdf_elliptical) over the real line for a model with a
/// single cell.
inline double normalization_by_quadrature(const KroneckerModel& model) {
  if (model.dimension() != 1) throw CapacityError("quadrature normalization needs m = 1");
  const double inf = std::numeric_limits<double>::infinity();
  return detail::integrate_checked(
      [&](double x) { return pdf_elliptical(model, DataArray(model.shape(), Vector{x})); }, -inf,
      inf, 1e-10);
}

// ---------------------------------------------------------------------------
// Checks

/// Importance-sampling estimate of the integral of exp(logpdf_elliptical).
/// Proposal: the same family (Gaussian for custom kernels) with the first
/// factor doubled, i.e. scale matrix 4 K K'.
inline McReport check_normalization(const KroneckerModel& model, std::size_t n,
                                    std::uint64_t seed) {
  if (model.dimension() > kMaxNormalizationDimension)
    throw CapacityError("normalization check needs m <= " +
                        std::to_string(kMaxNormalizationDimension));
  if (n < 2) throw ParameterError("normalization check needs at least two draws");
  FactorList wide = model.factors();
  wide[0] *= 2.0;
  const Kernel proposal_kernel = model.kernel().is_custom() ? Kernel::normal() : model.kernel();
  const KroneckerModel proposal(model.mean(), std::move(wide), proposal_kernel);

  RandomStream stream(seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const DataArray x = sample_elliptical_one(proposal, stream);
    const double w = std::exp(logpdf_elliptical(model, x) - logpdf_elliptical(proposal, x));
    const double delta = w - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (w - mean);
  }
  McReport r;
  r.name = "normalization";
  r.estimate = mean;
  r.std_error = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  r.target = 1.0;
  r.statistic = (mean - 1.0) / r.std_error;
  r.passed = std::abs(r.statistic) <= kMomentZLimit;
  r.n = n;
  r.seed = seed;
  return r;
}

/// Covariance of rvec(X) implied by the model: K K' for the normal kernel,
/// v/(v-2) K K' for t kernels with v > 2.
inline DenseMatrix implied_covariance(const KroneckerModel& model) {
  DenseMatrix cov = to_monolinear(model.with_kernel(Kernel::normal())).covariance();
  if (model.kernel().is_normal()) return cov;
  if (model.kernel().is_custom()) throw CapabilityError("no covariance for custom kernels");
  const double v = model.kernel().df();
  if (!(v > 2.0)) throw ParameterError("t covariance needs more than two degrees of freedom");
  cov *= v / (v - 2.0);
  return cov;
}

/// Entrywise comparison of the sample covariance of n draws with
/// implied_covariance; passed iff every |z| <= 5.
inline McReport check_covariance(const KroneckerModel& model, std::size_t n, std::uint64_t seed) {
  const std::size_t m = model.dimension();
  if (m > kMaxCovarianceDimension)
    throw CapacityError("covariance check needs m <= " + std::to_string(kMaxCovarianceDimension));
  if (n < 2) throw ParameterError("covariance check needs at least two draws");
  const DenseMatrix target = implied_covariance(model);

  RandomStream stream(seed);
  std::vector<double> draws;
  draws.reserve(n * m);
  for (std::size_t k = 0; k < n; ++k) {
    const DataArray x = sample_elliptical_one(model, stream);
    draws.insert(draws.end(), x.data().begin(), x.data().end());
  }
  Vector mean(m, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < m; ++i) mean[i] += draws[k * m + i];
  for (double& v : mean) v /= static_cast<double>(n);

  McReport r;
  r.name = "covariance";
  r.n = n;
  r.seed = seed;
  r.statistic = 0.0;
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      double s2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double p = (draws[k * m + i] - mean[i]) * (draws[k * m + j] - mean[j]);
        s += p;
        s2 += p * p;
      }
      const double est = s / nd;
      const double var = std::max(0.0, s2 / nd - est * est);
      const double se = std::sqrt(var / nd);
      const double diff = est - target(i, j);
      const double z = se > 0.0 ? std::abs(diff) / se : (diff == 0.0 ? 0.0 : INFINITY);
      if (z >= r.statistic) {
        r.statistic = z;
        r.estimate = est;
        r.target = target(i, j);
        r.std_error = se;
      }
    }
  r.passed = r.statistic <= kCovarianceZLimit;
  return r;
}

/// KS test of sample_radius draws against the quadrature CDF of radial_pdf.
inline McReport check_radial(const Kernel& kernel, std::size_t m, std::size_t n,
                             std::uint64_t seed) {
  if (m < 1) throw DomainError("dimension must be at least 1");
  if (n < 1) throw ParameterError("radial check needs at least one draw");
  RandomStream stream(seed);
  std::vector<double> r(n);
  for (double& v : r) v = sample_radius(kernel, m, stream);
  std::sort(r.begin(), r.end());
  const auto cdf = radial_cdf_sorted(kernel, m, r);
  const KsResult ks = ks_test_sorted(r, cdf);
  McReport rep;
  rep.name = "radial";
  rep.estimate = ks.p_value;
  rep.std_error = 0.0;
  rep.target = kKsAlpha;
  rep.statistic = ks.distance;
  rep.passed = ks.p_value >= kKsAlpha;
  rep.n = n;
  rep.seed = seed;
  return rep;
}

}  // namespace arrayvariate
