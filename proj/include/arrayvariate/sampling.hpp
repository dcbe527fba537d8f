#pragma once

// Exact samplers built on the stochastic representation x = r u: u uniform on
// the unit sphere of R^m, r an independent radius with density
// 2 π^{m/2} / Γ(m/2) r^{m-1} f(r^2).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <thread>
#include <variant>
#include <vector>

#include "arrayvariate/array.hpp"
#include "arrayvariate/densities.hpp"
#include "arrayvariate/errors.hpp"
#include "arrayvariate/multilinear.hpp"

namespace arrayvariate {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of the stream owned by parallel task `task` under `master`:
/// mix64(master ^ mix64(task)).
constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t task) noexcept {
  return mix64(master ^ mix64(task));
}

/// Single-owner source of variates. Identical seeds give bitwise identical
/// sequences with the same standard library build.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  RandomStream(const RandomStream&) = delete;
  RandomStream& operator=(const RandomStream&) = delete;
  RandomStream(RandomStream&&) = default;
  RandomStream& operator=(RandomStream&&) = default;

  std::uint64_t seed() const noexcept { return seed_; }

  double normal() { return normal_(engine_); }

  /// Uniform on [0, 1).
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  double chi_square(double dof) { return std::chi_squared_distribution<double>(dof)(engine_); }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

inline DataArray sample_std_normal_array(const Shape& shape, RandomStream& stream) {
  DataArray z(shape);
  for (double& v : z.data()) v = stream.normal();
  return z;
}

/// Uniform direction on the unit sphere in R^m.
inline Vector sample_sphere(std::size_t m, RandomStream& stream) {
  if (m < 1) throw DomainError("sphere dimension must be at least 1");
  Vector u(m);
  double norm2 = 0.0;
  while (!(norm2 > 0.0)) {
    norm2 = 0.0;
    for (double& v : u) {
      v = stream.normal();
      norm2 += v * v;
    }
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : u) v *= inv;
  return u;
}

/// Radius ||x|| of a spherical draw in R^m.
/// Normal: sqrt of a chi-square(m) draw. t(v): ||z|| / sqrt(w / v) with
/// z ~ N(0, I_m), w ~ chi-square(v).
inline double sample_radius(const Kernel& kernel, std::size_t m, RandomStream& stream) {
  if (m < 1) throw DomainError("dimension must be at least 1");
  if (kernel.is_custom()) throw CapabilityError("no radial sampler for custom kernels");
  double z2 = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double z = stream.normal();
    z2 += z * z;
  }
  if (kernel.is_normal()) return std::sqrt(z2);
  const double v = kernel.df();
  const double w = stream.chi_square(v);
  return std::sqrt(z2 / (w / v));
}

/// One draw X = (A_1)^1 ... (A_i)^i unrvec(r u) + M.
inline DataArray sample_elliptical_one(const KroneckerModel& model, RandomStream& stream) {
  const std::size_t m = model.dimension();
  Vector u = sample_sphere(m, stream);
  const double r = sample_radius(model.kernel(), m, stream);
  for (double& v : u) v *= r;
  return unstandardize(model, unrvec(std::move(u), model.shape()));
}

inline std::vector<DataArray> sample_elliptical(const KroneckerModel& model, std::size_t n,
                                                RandomStream& stream) {
  if (model.kernel().is_custom()) throw CapabilityError("no sampler for custom kernels");
  std::vector<DataArray> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(sample_elliptical_one(model, stream));
  return out;
}

/// Splits n draws into `tasks` contiguous blocks; block t is drawn from
/// RandomStream(child_seed(master_seed, t)) and blocks are concatenated in
/// task order, so the result depends on (master_seed, tasks) only.
inline std::vector<DataArray> sample_elliptical_parallel(const KroneckerModel& model,
                                                         std::size_t n,
                                                         std::uint64_t master_seed,
                                                         std::size_t tasks) {
  if (tasks == 0) throw ParameterError("task count must be positive");
  if (model.kernel().is_custom()) throw CapabilityError("no sampler for custom kernels");
  std::vector<std::vector<DataArray>> blocks(tasks);
  {
    std::vector<std::jthread> workers;
    workers.reserve(tasks);
    for (std::size_t t = 0; t < tasks; ++t) {
      const std::size_t begin = n * t / tasks;
      const std::size_t end = n * (t + 1) / tasks;
      workers.emplace_back([&, t, count = end - begin] {
        RandomStream stream(child_seed(master_seed, t));
        blocks[t] = sample_elliptical(model, count, stream);
      });
    }
  }
  std::vector<DataArray> out;
  out.reserve(n);
  for (auto& b : blocks)
    for (auto& x : b) out.push_back(std::move(x));
  return out;
}

}  // namespace arrayvariate
