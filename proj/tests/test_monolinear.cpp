#include <gtest/gtest.h>

#include <cmath>

#include "arrayvariate/monolinear.hpp"
#include "arrayvariate/sampling.hpp"
#include "properties.hpp"

namespace av = arrayvariate;
using av::DataArray;
using av::DenseMatrix;
using av::MonolinearNormal;
using av::Shape;

namespace {

using Index = std::vector<std::size_t>;

MonolinearNormal random_monolinear(av::testing::Rng& rng, std::size_t m) {
  const DenseMatrix g = av::testing::well_conditioned(rng, m);
  return MonolinearNormal(av::rvec(av::testing::random_array(rng, Shape{m})),
                          av::matmul(g, av::transpose(g)));
}

void expect_same(const MonolinearNormal& a, const MonolinearNormal& b, double tol) {
  ASSERT_EQ(a.dimension(), b.dimension());
  EXPECT_LE(av::max_abs_diff(a.mean(), b.mean()), tol);
  EXPECT_LE(av::max_abs_diff(a.covariance(), b.covariance()), tol);
}

}  // namespace

TEST(ToMonolinear, Examples) {
  const auto id = av::KroneckerModel::centered({DenseMatrix::identity(2), DenseMatrix::identity(3)});
  EXPECT_EQ(av::to_monolinear(id).covariance(), DenseMatrix::identity(6));

  const DenseMatrix a{{1, 2}, {0.5, -1}};
  const auto one = av::KroneckerModel::centered({a});
  EXPECT_LE(av::max_abs_diff(av::to_monolinear(one).covariance(), av::matmul(a, av::transpose(a))), 1e-15);

  const auto two = av::KroneckerModel::centered({DenseMatrix::diagonal({1, 2}), DenseMatrix{{3}}});
  EXPECT_EQ(av::to_monolinear(two).covariance(), DenseMatrix::diagonal({9, 36}));
}

TEST(ToMonolinear, MeanIsRvec) {
  av::testing::Rng rng(1);
  const DataArray mean = av::testing::random_array(rng, Shape{2, 3});
  const av::KroneckerModel model(mean, av::testing::well_conditioned_factors(rng, {2, 3}));
  EXPECT_EQ(av::to_monolinear(model).mean(), av::rvec(mean));
}

TEST(ToMonolinear, SizeGuard) {
  const auto big = av::KroneckerModel::centered({DenseMatrix::identity(65), DenseMatrix::identity(65)});
  EXPECT_THROW(av::to_monolinear(big), av::CapacityError);
  const auto ok = av::KroneckerModel::centered({DenseMatrix::identity(16), DenseMatrix::identity(16)});
  EXPECT_EQ(av::to_monolinear(ok).dimension(), 256u);
}

TEST(ToMonolinear, CovarianceIsSymmetricPositiveDefinite) {
  av::testing::Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto dims = av::testing::random_dims(rng, 3, 4, 48);
    const auto model = av::KroneckerModel::centered(av::testing::well_conditioned_factors(rng, dims));
    const MonolinearNormal d = av::to_monolinear(model);
    EXPECT_EQ(d.covariance(), av::transpose(d.covariance()));
    EXPECT_GT(av::testing::sym_eigenvalues(d.covariance()).front(), 0.0);
  }
}

TEST(MonolinearNormal, RejectsInvalidCovariance) {
  EXPECT_THROW(MonolinearNormal(av::Vector{0, 0}, DenseMatrix{{1, 0.5}, {0.4, 1}}), av::ShapeError);
  EXPECT_THROW(MonolinearNormal(av::Vector{0, 0}, DenseMatrix::identity(3)), av::ShapeError);
  EXPECT_THROW(MonolinearNormal(av::Vector{0, 0}, DenseMatrix{{1, 2}, {2, 1}}), av::SingularityError);
}

TEST(MonolinearNormal, LogpdfMatchesEigenOracle) {
  av::testing::Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    const MonolinearNormal d = random_monolinear(rng, av::testing::uniform_size(rng, 1, 8));
    const av::Vector x = av::rvec(av::testing::random_array(rng, Shape{d.dimension()}));
    const double expected = av::testing::mvn_logpdf_oracle(
        av::testing::to_eigen(x), av::testing::to_eigen(d.mean()), av::testing::to_eigen(d.covariance()));
    EXPECT_NEAR(d.logpdf(x), expected, 1e-10);
  }
}

TEST(Marginal, Examples) {
  av::testing::Rng rng(4);
  const MonolinearNormal d = random_monolinear(rng, 4);
  expect_same(av::marginal(d, Index{1, 2, 3, 4}), d, 0.0);

  const MonolinearNormal diag(av::Vector{1, 2, 3}, DenseMatrix::diagonal({4, 5, 6}));
  const MonolinearNormal m = av::marginal(diag, Index{3, 1});
  EXPECT_EQ(m.mean(), (av::Vector{3, 1}));
  EXPECT_EQ(m.covariance(), DenseMatrix::diagonal({6, 4}));
}

TEST(Marginal, Errors) {
  const MonolinearNormal d(av::Vector{0, 0, 0}, DenseMatrix::identity(3));
  EXPECT_THROW(av::marginal(d, Index{}), av::IndexError);
  EXPECT_THROW(av::marginal(d, Index{0}), av::IndexError);
  EXPECT_THROW(av::marginal(d, Index{4}), av::IndexError);
  EXPECT_THROW(av::marginal(d, Index{2, 2}), av::IndexError);
}

TEST(Marginal, AgreesWithSampledMoments) {
  av::testing::Rng rng(5);
  const std::vector<std::size_t> dims{2, 2};
  const av::KroneckerModel model(av::testing::random_array(rng, Shape(dims)),
                                 av::testing::well_conditioned_factors(rng, dims));
  const MonolinearNormal full = av::to_monolinear(model);
  av::RandomStream s(6);
  constexpr std::size_t n = 50000;
  const auto draws = av::sample_elliptical(model, n, s);
  for (std::size_t i = 1; i <= 4; ++i) {
    const MonolinearNormal m = av::marginal(full, Index{i});
    const double mu = m.mean()[0], var = m.covariance()(0, 0);
    double sum = 0.0, sum2 = 0.0;
    for (const auto& x : draws) {
      sum += x[i - 1];
      sum2 += (x[i - 1] - mu) * (x[i - 1] - mu);
    }
    EXPECT_LE(std::abs(sum / n - mu), 3 * std::sqrt(var / n));
    EXPECT_LE(std::abs(sum2 / n - var), 3 * var * std::sqrt(2.0 / n));
  }
}

TEST(Conditional, BivariateExample) {
  for (double rho : {-0.8, 0.0, 0.3, 0.95}) {
    const MonolinearNormal d(av::Vector{0, 0}, DenseMatrix{{1, rho}, {rho, 1}});
    for (double y : {-1.5, 0.0, 2.0}) {
      const MonolinearNormal c = av::conditional(d, Index{2}, av::Vector{y});
      EXPECT_NEAR(c.mean()[0], rho * y, 1e-15);
      EXPECT_NEAR(c.covariance()(0, 0), 1 - rho * rho, 1e-15);
    }
  }
}

TEST(Conditional, AgreesWithRejectionWindowSampling) {
  const double rho = 0.6, y = 1.0, half_width = 0.025;
  const DenseMatrix a{{1, 0}, {rho, std::sqrt(1 - rho * rho)}};
  const auto model = av::KroneckerModel::centered({a});
  const MonolinearNormal c = av::conditional(av::to_monolinear(model), Index{2}, av::Vector{y});
  av::RandomStream s(7);
  double sum = 0.0, sum2 = 0.0;
  std::size_t kept = 0;
  for (std::size_t k = 0; k < 1000000; ++k) {
    const DataArray x = av::sample_elliptical_one(model, s);
    if (std::abs(x[1] - y) > half_width) continue;
    ++kept;
    sum += x[0];
    sum2 += x[0] * x[0];
  }
  ASSERT_GT(kept, 10000u);
  const double mean = sum / kept, var = sum2 / kept - mean * mean;
  const double cvar = c.covariance()(0, 0);
  EXPECT_LE(std::abs(mean - c.mean()[0]), 4 * std::sqrt(cvar / kept));
  EXPECT_LE(std::abs(var - cvar), 4 * cvar * std::sqrt(2.0 / kept));
}

TEST(Conditional, DiagonalLeavesKeptBlockUnchanged) {
  const MonolinearNormal d(av::Vector{1, 2, 3}, DenseMatrix::diagonal({4, 5, 6}));
  const MonolinearNormal c = av::conditional(d, Index{2}, av::Vector{100});
  EXPECT_EQ(c.mean(), (av::Vector{1, 3}));
  EXPECT_EQ(c.covariance(), DenseMatrix::diagonal({4, 6}));
}

TEST(Conditional, Errors) {
  const MonolinearNormal d(av::Vector{0, 0, 0}, DenseMatrix::identity(3));
  EXPECT_THROW(av::conditional(d, Index{}, av::Vector{}), av::IndexError);
  EXPECT_THROW(av::conditional(d, Index{1, 2, 3}, av::Vector{0, 0, 0}), av::IndexError);
  EXPECT_THROW(av::conditional(d, Index{5}, av::Vector{0}), av::IndexError);
  EXPECT_THROW(av::conditional(d, Index{1}, av::Vector{0, 1}), av::ShapeError);
}

TEST(Conditional, ConsistentWithMarginalization) {
  av::testing::Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = av::testing::uniform_size(rng, 3, 8);
    const MonolinearNormal d = random_monolinear(rng, m);
    // Condition on all but coordinate j directly, and via the marginal on
    // {j} plus a random subset of the rest followed by conditioning on it.
    const std::size_t j = av::testing::uniform_size(rng, 1, m);
    Index g_all, g_sub, keep{j};
    av::Vector v_all, v_sub;
    for (std::size_t i = 1; i <= m; ++i) {
      if (i == j) continue;
      const double value = std::normal_distribution<double>()(rng);
      g_all.push_back(i);
      v_all.push_back(value);
      if (rng() % 2) {
        g_sub.push_back(i);
        v_sub.push_back(value);
      }
    }
    if (g_sub.empty()) {
      g_sub.push_back(g_all[0]);
      v_sub.push_back(v_all[0]);
    }
    Index rest;
    for (std::size_t i = 1; i <= m; ++i)
      if (i != j && std::find(g_sub.begin(), g_sub.end(), i) == g_sub.end()) rest.push_back(i);

    // Direct: conditioning on the subset only, then marginal on j.
    const MonolinearNormal direct_sub = av::conditional(d, g_sub, v_sub);
    Index sorted_keep = keep;
    sorted_keep.insert(sorted_keep.end(), g_sub.begin(), g_sub.end());
    std::sort(sorted_keep.begin(), sorted_keep.end());
    const MonolinearNormal marg = av::marginal(d, sorted_keep);
    Index g_in_marg;
    for (std::size_t k = 0; k < sorted_keep.size(); ++k)
      if (sorted_keep[k] != j) g_in_marg.push_back(k + 1);
    av::Vector v_in_marg;
    for (std::size_t k = 0; k < sorted_keep.size(); ++k)
      if (sorted_keep[k] != j)
        v_in_marg.push_back(v_sub[std::find(g_sub.begin(), g_sub.end(), sorted_keep[k]) - g_sub.begin()]);
    const MonolinearNormal via_marginal = av::conditional(marg, g_in_marg, v_in_marg);
    const std::size_t pos_j = static_cast<std::size_t>(
        std::count_if(rest.begin(), rest.end(), [&](std::size_t i) { return i < j; }));
    const MonolinearNormal direct_j = av::marginal(direct_sub, Index{pos_j + 1});
    expect_same(via_marginal, direct_j, 1e-10);

    // Sequential conditioning on the subset and then the remainder matches
    // conditioning on everything but j at once.
    const MonolinearNormal all = av::conditional(d, g_all, v_all);
    if (!rest.empty()) {
      Index g_rest;
      av::Vector v_rest;
      for (std::size_t k = 0; k < rest.size(); ++k) {
        const std::size_t pos = k + (rest[k] > j ? 1 : 0);
        g_rest.push_back(pos + 1);
        v_rest.push_back(v_all[std::find(g_all.begin(), g_all.end(), rest[k]) - g_all.begin()]);
      }
      expect_same(av::conditional(direct_sub, g_rest, v_rest), all, 1e-10);
    } else {
      expect_same(direct_sub, all, 1e-10);
    }
  }
}

TEST(Conditional, CovarianceIndependentOfValues) {
  av::testing::Rng rng(9);
  for (int t = 0; t < 30; ++t) {
    const MonolinearNormal d = random_monolinear(rng, 6);
    const Index g{2, 5};
    const MonolinearNormal a = av::conditional(d, g, av::Vector{0.3, -1.0});
    const MonolinearNormal b = av::conditional(d, g, av::Vector{7.0, 2.5});
    EXPECT_EQ(a.covariance(), b.covariance());
    EXPECT_GT(av::testing::sym_eigenvalues(a.covariance()).front(), 0.0);
  }
}

TEST(Monolinear, DensityConsistency) {
  av::testing::Rng rng(10);
  for (int t = 0; t < 100; ++t) {
    const auto dims = av::testing::random_dims(rng, 4, 4, 24);
    const av::KroneckerModel model(av::testing::random_array(rng, Shape(dims)),
                                   av::testing::well_conditioned_factors(rng, dims));
    const DataArray x = model.mean() + av::testing::random_array(rng, model.shape());
    const double a = std::exp(av::logpdf_normal(model, x));
    const double b = std::exp(av::to_monolinear(model).logpdf(av::rvec(x)));
    EXPECT_NEAR(a, b, 1e-10 * b);
  }
}
