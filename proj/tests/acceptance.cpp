// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Seeds are fixed so every run is identical.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/rayleigh.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "properties.hpp"

namespace av = arrayvariate;
namespace avt = arrayvariate::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [failed: " << what << "]";
    }
  }
};

av::KroneckerModel random_model(avt::Rng& rng, const std::vector<std::size_t>& dims,
                                av::Kernel kernel = av::Kernel::normal()) {
  return av::KroneckerModel(avt::random_array(rng, av::Shape(dims)),
                            avt::well_conditioned_factors(rng, dims), std::move(kernel));
}

// 1. r_multiply against the expanded inverse Kronecker chain.
void monolinear_equivalence(Outcome& o) {
  avt::Rng rng(101);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) worst = std::max(worst, avt::monolinear_trial(rng, 5, 512));
  o.detail << "1000 instances, order <= 5, m <= 512, max dev " << worst;
  o.require(worst <= 1e-10, "max dev <= 1e-10");
}

// 2. Kronecker identity suite, 200 trials per property.
void kronecker_identities(Outcome& o) {
  struct Property {
    const char* name;
    double (*trial)(avt::Rng&);
    double tol;
  };
  const Property props[] = {
      {"mixed-product", avt::mixed_product_trial, 1e-10},
      {"inverse", avt::inverse_law_trial, 1e-9},
      {"l-inverse", avt::l_inverse_law_trial, 1e-9},
      {"bilinearity", avt::bilinearity_trial, 1e-10},
      {"trace", avt::trace_trial, 1e-10},
      {"determinant", avt::determinant_trial, 1e-10},
      {"eigenvalues", avt::eigenvalue_trial, 1e-8},
  };
  avt::Rng rng(202);
  for (const auto& p : props) {
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) worst = std::max(worst, p.trial(rng));
    o.detail << ' ' << p.name << '=' << worst;
    o.require(worst <= p.tol, std::string(p.name));
  }
}

// 3. log_jacobian vs the expanded determinant, and MC normalization.
void jacobian(Outcome& o) {
  avt::Rng rng(303);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto dims = avt::random_dims(rng, 4, 4, 64);
    const auto fs = avt::well_conditioned_factors(rng, dims);
    const double expanded = av::LuDecomposition(av::inv_kron_chain(fs)).log_abs_determinant();
    worst = std::max(worst, std::abs(av::log_jacobian(fs) - expanded));
  }
  o.detail << "log-Jacobian max dev " << worst << " over 100 chains;";
  o.require(worst <= 1e-9, "log-Jacobian dev <= 1e-9");

  const std::vector<std::vector<std::size_t>> shapes{{1}, {2}, {2, 2}, {2, 3}};
  std::uint64_t seed = 3000;
  for (const av::Kernel& k : {av::Kernel::normal(), av::Kernel::student_t(5.0)}) {
    for (const auto& dims : shapes) {
      const av::KroneckerModel model = random_model(rng, dims, k);
      const av::McReport r = av::check_normalization(model, 200000, ++seed);
      o.detail << ' ' << k.name() << "/m=" << model.dimension() << " z=" << r.statistic;
      o.require(r.passed, "normalization " + k.name() + " m=" + std::to_string(model.dimension()));
    }
  }
}

// 4. logpdf_normal vs the materialized monolinear density.
void normal_density(Outcome& o) {
  avt::Rng rng(404);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const av::KroneckerModel model = random_model(rng, avt::random_dims(rng, 4, 4, 24));
    const av::DataArray x = model.mean() + avt::random_array(rng, model.shape());
    const double a = av::logpdf_normal(model, x);
    const double b = av::to_monolinear(model).logpdf(av::rvec(x));
    worst = std::max(worst, std::abs(std::expm1(a - b)));  // |p_a / p_b - 1|
  }
  o.detail << "200 pairs, m <= 24, max relative density dev " << worst;
  o.require(worst <= 1e-10, "relative dev <= 1e-10");
}

double ks_p(std::vector<double> r, const std::function<double(double)>& cdf) {
  return av::ks_test(std::move(r), cdf).p_value;
}

// 5. Radial laws by KS and covariance recovery.
void sampling_laws(Outcome& o) {
  constexpr std::size_t n = 50000;
  const auto radii = [&](const av::Kernel& k, std::size_t m, std::uint64_t seed) {
    av::RandomStream s(seed);
    std::vector<double> r(n);
    for (double& v : r) v = av::sample_radius(k, m, s);
    return r;
  };
  for (std::size_t m : {1, 3, 6}) {
    const boost::math::chi_squared chi2(static_cast<double>(m));
    const double p = ks_p(radii(av::Kernel::normal(), m, 500 + m),
                          [&](double r) { return boost::math::cdf(chi2, r * r); });
    o.detail << " chi_" << m << " p=" << p;
    o.require(p >= 0.01, "chi radial law m=" + std::to_string(m));
  }
  const boost::math::rayleigh rayleigh(1.0);
  const double p_ray =
      ks_p(radii(av::Kernel::normal(), 2, 511), [&](double r) { return boost::math::cdf(rayleigh, r); });
  o.detail << " rayleigh p=" << p_ray;
  o.require(p_ray >= 0.01, "Rayleigh");
  const boost::math::students_t t4(4.0);
  const double p_t = ks_p(radii(av::Kernel::student_t(4.0), 1, 512),
                          [&](double r) { return 2 * boost::math::cdf(t4, r) - 1; });
  o.detail << " folded-t4 p=" << p_t;
  o.require(p_t >= 0.01, "folded t");

  avt::Rng rng(505);
  std::uint64_t seed = 5000;
  for (const auto& dims : std::vector<std::vector<std::size_t>>{{2, 2}, {2, 3}, {2, 2, 2}}) {
    const av::KroneckerModel model = random_model(rng, dims);
    const av::McReport r = av::check_covariance(model, 200000, ++seed);
    o.detail << " cov m=" << model.dimension() << " max|z|=" << r.statistic;
    o.require(r.passed, "covariance m=" + std::to_string(model.dimension()));
  }
}

// 6. Multilinear least squares.
void least_squares(Outcome& o) {
  avt::Rng rng(606);
  double recovery = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto dims = avt::random_dims(rng, 4, 4, 128);
    const av::FactorList maps = avt::well_conditioned_factors(rng, dims);
    const av::DataArray x0 = avt::random_array(rng, av::Shape(dims));
    const av::DataArray x_hat = av::multilinear_lstsq(maps, av::r_multiply(maps, x0));
    recovery = std::max(recovery, av::max_abs_diff(x_hat.data(), x0.data()));
  }
  double gradient = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto inst = avt::overdetermined_lstsq(rng);
    gradient = std::max(gradient, avt::lstsq_fd_gradient(inst, av::multilinear_lstsq(inst.maps, inst.y)));
  }
  const auto inst = avt::overdetermined_lstsq(rng);
  const av::DataArray x_hat = av::multilinear_lstsq(inst.maps, inst.y);
  const double best = avt::lstsq_residual(inst, x_hat);
  int optimal = 0;
  for (int k = 0; k < 100; ++k) {
    av::DataArray delta = avt::random_array(rng, x_hat.shape());
    delta *= (k % 2 ? 1e-1 : 1e-3) / std::sqrt(av::sq_norm(delta));
    optimal += best <= avt::lstsq_residual(inst, x_hat + delta);
  }
  o.detail << "recovery dev " << recovery << ", FD gradient " << gradient << ", optimal in " << optimal
           << "/100 perturbations";
  o.require(recovery <= 1e-9, "recovery <= 1e-9");
  o.require(gradient <= 1e-5, "gradient <= 1e-5");
  o.require(optimal == 100, "100/100 perturbations");
}

// 7. t density against the univariate Student t and the normal limit.
void t_density(Outcome& o) {
  double worst_rel = 0.0;
  for (double v : {1.0, 3.0, 10.0}) {
    const boost::math::students_t dist(v);
    const av::KroneckerModel model(av::DataArray(av::Shape{1}, av::Vector{0.5}), {av::DenseMatrix{{2.0}}});
    for (int i = 0; i <= 100; ++i) {
      const double x = -10.0 + 0.2 * i;
      const double expected = boost::math::pdf(dist, (x - 0.5) / 2.0) / 2.0;
      const double got = std::exp(av::logpdf_t(model, av::DataArray(av::Shape{1}, av::Vector{x}), v));
      worst_rel = std::max(worst_rel, std::abs(got - expected) / expected);
    }
  }
  avt::Rng rng(707);
  double worst_limit = 0.0;
  for (int t = 0; t < 100; ++t) {
    const av::KroneckerModel model = random_model(rng, avt::random_dims(rng, 3, 3, 12));
    const av::DataArray x = av::unstandardize(model, avt::random_array(rng, model.shape()));
    worst_limit = std::max(worst_limit, std::abs(av::logpdf_t(model, x, 1e6) - av::logpdf_normal(model, x)));
  }
  o.detail << "m=1 grid max relative dev " << worst_rel << ", v=1e6 vs normal max dev " << worst_limit;
  o.require(worst_rel <= 1e-12, "univariate reduction <= 1e-12");
  o.require(worst_limit <= 1e-3, "normal limit <= 1e-3");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + ARRAYVARIATE_CLI + "\" " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 8. CLI determinism and sample -> density round trip.
void cli_round_trip(Outcome& o) {
  const fs::path dir = fs::temp_directory_path() / "arrayvariate_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto q = [&](const std::string& name) { return "\"" + (dir / name).string() + "\""; };
  {
    std::ofstream(dir / "a.mat") << "MATV1\ndims 2 2\n2 0.5\n0 1\n";
    std::ofstream(dir / "b.mat") << "MATV1\ndims 3 3\n1 0 0\n0.3 1 0\n0 0.2 3\n";
    std::ofstream(dir / "m.arr") << "ARRV1\ndims 2 3\n1 2\n3 4\n5 6\n";
  }
  const std::string model = "--factor " + q("a.mat") + " --factor " + q("b.mat") + " --mean " + q("m.arr");

  bool identical = true;
  const auto twice = [&](const std::string& args, const std::string& tag) {
    const int c1 = run_cli(args + " --out " + q(tag + "1"));
    const int c2 = run_cli(args + " --out " + q(tag + "2"));
    const std::string s1 = slurp(dir / (tag + "1"));
    const bool same = c1 == c2 && s1 == slurp(dir / (tag + "2")) && !s1.empty();
    identical = identical && same;
    o.require(same, "byte-identical " + tag);
  };
  twice("sample " + model + " --n 50 --seed 7", "sample");
  twice("sample " + model + " --n 50 --seed 7 --kernel t --df 3", "sample_t");
  twice("verify " + model + " --n 10000 --seed 7", "verify");
  twice("radial --dim 6 --kernel cauchy --rmax 4 --steps 40", "radial");

  int round_trips = 0;
  for (const std::string kernel : {"--kernel normal", "--kernel t --df 4", "--kernel cauchy"}) {
    const int sc = run_cli("sample " + model + " " + kernel + " --n 25 --seed 11 --out " + q("draws.arr"));
    const int dc = run_cli("density " + model + " " + kernel + " --input " + q("draws.arr") + " --out " + q("dens.txt"));
    std::istringstream dens(slurp(dir / "dens.txt"));
    int lines = 0;
    bool finite = true;
    for (std::string l; std::getline(dens, l); ++lines) finite = finite && std::isfinite(std::stod(l));
    const bool ok = sc == 0 && dc == 0 && lines == 25 && finite;
    round_trips += ok;
    o.require(ok, "round trip " + kernel);
  }
  fs::remove_all(dir);
  o.detail << "re-runs byte-identical: " << (identical ? "yes" : "no") << ", round trips " << round_trips
           << "/3";
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    void (*run)(Outcome&);
    double max_seconds;
  };
  const Criterion criteria[] = {
      {"AC1 monolinear equivalence", monolinear_equivalence, 30.0},
      {"AC2 Kronecker identity suite", kronecker_identities, 0.0},
      {"AC3 Jacobian correctness", jacobian, 120.0},
      {"AC4 normal density consistency", normal_density, 0.0},
      {"AC5 sampling laws", sampling_laws, 0.0},
      {"AC6 least squares", least_squares, 0.0},
      {"AC7 t-density sanity", t_density, 0.0},
      {"AC8 CLI determinism and round trip", cli_round_trip, 0.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.max_seconds > 0.0) o.require(secs <= c.max_seconds, "runtime limit");
    failures += !o.passed;
    std::printf("[%s] %s: %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", c.label, o.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
