#pragma once

// Command implementations behind the `arrayvariate` executable. Kept in a
// header so tests can drive them in-process.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or format error,
// 3 numerical error (singular or rank-deficient factor).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arrayvariate/arrayvariate.hpp"

namespace arrayvariate::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

inline constexpr std::size_t kMinVerifyDraws = 10000;

struct UsageError : Error {
  using Error::Error;
};

struct CliConfig {
  std::string command;
  std::string kernel = "normal";
  std::optional<double> df;
  std::vector<std::string> factors;
  std::optional<std::string> mean;
  std::vector<std::string> inputs;
  std::size_t n = 1;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
  double rmax = 5.0;
  std::size_t steps = 50;
  std::optional<std::size_t> dim;
};

inline Kernel make_kernel(const CliConfig& cfg) {
  if (cfg.kernel == "t") {
    if (!cfg.df) throw UsageError("--kernel t requires --df");
    return Kernel::student_t(*cfg.df);
  }
  if (cfg.df) throw UsageError("--df is only valid with --kernel t");
  if (cfg.kernel == "normal") return Kernel::normal();
  if (cfg.kernel == "cauchy") return Kernel::cauchy();
  throw UsageError("unknown kernel '" + cfg.kernel + "' (expected normal, t or cauchy)");
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return in;
}

inline FactorList load_factors(const CliConfig& cfg) {
  if (cfg.factors.empty()) throw UsageError("at least one --factor is required");
  FactorList fs;
  for (const auto& path : cfg.factors) {
    auto in = open_input(path);
    fs.push_back(read_matrix(in, path));
  }
  return fs;
}

inline KroneckerModel load_model(const CliConfig& cfg) {
  const Kernel kernel = make_kernel(cfg);
  FactorList fs = load_factors(cfg);
  for (std::size_t j = 0; j < fs.size(); ++j)
    if (!fs[j].square())
      throw UsageError("factor " + std::to_string(j + 1) + " ('" + cfg.factors[j] +
                       "') must be square");
  if (!cfg.mean) return KroneckerModel::centered(std::move(fs), kernel);
  auto in = open_input(*cfg.mean);
  DataArray mean = read_array(in, *cfg.mean);
  if (mean.order() != fs.size())
    throw UsageError(std::to_string(fs.size()) + " factors given for an order-" +
                     std::to_string(mean.order()) + " mean");
  return KroneckerModel(std::move(mean), std::move(fs), kernel);
}

inline std::vector<DataArray> load_inputs(const CliConfig& cfg) {
  if (cfg.inputs.empty()) throw UsageError("at least one --input is required");
  std::vector<DataArray> all;
  for (const auto& path : cfg.inputs) {
    auto in = open_input(path);
    auto arrays = read_arrays(in, path);
    for (auto& a : arrays) all.push_back(std::move(a));
  }
  return all;
}

inline void cmd_sample(const CliConfig& cfg, std::ostream& out) {
  const KroneckerModel model = load_model(cfg);
  RandomStream stream(cfg.seed);
  write_arrays(out, sample_elliptical(model, cfg.n, stream));
}

inline void cmd_density(const CliConfig& cfg, std::ostream& out) {
  const KroneckerModel model = load_model(cfg);
  const auto inputs = load_inputs(cfg);
  out.precision(17);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (inputs[k].shape() != model.shape())
      throw UsageError("input array " + std::to_string(k + 1) + " has shape " +
                       inputs[k].shape().to_string() + ", model shape is " +
                       model.shape().to_string());
    const double lp = model.kernel().is_student_t()
                          ? logpdf_t(model, inputs[k], model.kernel().df())
                          : logpdf_elliptical(model, inputs[k]);
    out << lp << '\n';
  }
}

inline void cmd_lstsq(const CliConfig& cfg, std::ostream& out) {
  const FactorList maps = load_factors(cfg);
  if (cfg.inputs.size() != 1) throw UsageError("lstsq takes exactly one --input");
  auto in = open_input(cfg.inputs[0]);
  const DataArray y = read_array(in, cfg.inputs[0]);
  write_array(out, multilinear_lstsq(maps, y));
}

/// Runs every check whose size guard admits the model; returns true iff all pass.
inline bool cmd_verify(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.n < kMinVerifyDraws)
    throw UsageError("--n must be at least " + std::to_string(kMinVerifyDraws));
  const KroneckerModel model = load_model(cfg);
  const std::size_t m = model.dimension();
  std::vector<McReport> reports;
  if (m <= kMaxNormalizationDimension)
    reports.push_back(check_normalization(model, cfg.n, child_seed(cfg.seed, 0)));
  else
    err << "skipping normalization: m = " << m << " exceeds " << kMaxNormalizationDimension
        << '\n';
  const bool finite_fourth_moment = model.kernel().is_normal() || model.kernel().df() > 4.0;
  if (m <= kMaxCovarianceDimension && finite_fourth_moment)
    reports.push_back(check_covariance(model, cfg.n, child_seed(cfg.seed, 1)));
  else
    err << "skipping covariance: needs m <= " << kMaxCovarianceDimension
        << " and finite fourth moments\n";
  reports.push_back(check_radial(model.kernel(), m, cfg.n, child_seed(cfg.seed, 2)));
  bool all = true;
  for (const auto& r : reports) {
    out << r.to_record() << '\n';
    all = all && r.passed;
  }
  return all;
}

inline void cmd_radial(const CliConfig& cfg, std::ostream& out) {
  const Kernel kernel = make_kernel(cfg);
  if (!(cfg.rmax > 0.0) || !std::isfinite(cfg.rmax)) throw UsageError("--rmax must be positive");
  if (cfg.steps < 1) throw UsageError("--steps must be at least 1");
  std::size_t k = 0;
  if (cfg.dim) {
    k = *cfg.dim;
  } else if (!cfg.factors.empty()) {
    k = 1;
    for (const auto& f : load_factors(cfg)) k *= f.rows();
  } else {
    throw UsageError("radial needs --dim or --factor files");
  }
  if (k < 1) throw UsageError("--dim must be at least 1");
  out.precision(17);
  for (std::size_t s = 0; s <= cfg.steps; ++s) {
    const double r = cfg.rmax * static_cast<double>(s) / static_cast<double>(cfg.steps);
    out << r << ' ' << radial_pdf(kernel, r, k) << '\n';
  }
}

/// Dispatches a parsed config. Output goes to `out` (or --out), diagnostics to `err`.
inline int run(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    std::ostringstream buf;
    int code = kExitOk;
    if (cfg.command == "sample") {
      cmd_sample(cfg, buf);
    } else if (cfg.command == "density") {
      cmd_density(cfg, buf);
    } else if (cfg.command == "lstsq") {
      cmd_lstsq(cfg, buf);
    } else if (cfg.command == "verify") {
      code = cmd_verify(cfg, buf, err) ? kExitOk : kExitVerifyFailed;
    } else if (cfg.command == "radial") {
      cmd_radial(cfg, buf);
    } else {
      throw UsageError("unknown command '" + cfg.command + "'");
    }
    if (cfg.out) {
      std::ofstream f(*cfg.out, std::ios::binary);
      if (!f) throw UsageError("cannot write '" + *cfg.out + "'");
      f << buf.str();
    } else {
      out << buf.str();
    }
    return code;
  } catch (const SingularityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

/// Parses argv and runs the selected command.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Array-variate elliptical distributions with Kronecker-structured scale"};
  app.require_subcommand(1);
  CliConfig cfg;

  const auto add_model = [&](CLI::App* sub) {
    sub->add_option("--kernel", cfg.kernel, "normal, t or cauchy")
        ->check(CLI::IsMember({"normal", "t", "cauchy"}));
    sub->add_option("--df", cfg.df, "degrees of freedom for --kernel t");
    sub->add_option("--factor", cfg.factors, "MATV1 factor file, repeated in mode order");
    sub->add_option("--mean", cfg.mean, "ARRV1 mean array (default zero)");
  };

  auto* sample = app.add_subcommand("sample", "draw arrays from the model");
  add_model(sample);
  sample->add_option("--n", cfg.n, "number of draws");
  sample->add_option("--seed", cfg.seed, "random seed");
  sample->add_option("--out", cfg.out, "output file (default stdout)");

  auto* density = app.add_subcommand("density", "log-density of each input array");
  add_model(density);
  density->add_option("--input", cfg.inputs, "ARRV1 file(s)")->required();
  density->add_option("--out", cfg.out, "output file (default stdout)");

  auto* lstsq = app.add_subcommand("lstsq", "multilinear least squares estimate");
  lstsq->add_option("--factor", cfg.factors, "MATV1 mode map, repeated in mode order");
  lstsq->add_option("--input", cfg.inputs, "ARRV1 observation array")->required();
  lstsq->add_option("--out", cfg.out, "output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Monte Carlo checks of the model");
  add_model(verify);
  cfg.n = 200000;
  verify->add_option("--n", cfg.n, "draws per check (at least 10000)");
  verify->add_option("--seed", cfg.seed, "random seed");
  verify->add_option("--out", cfg.out, "output file (default stdout)");

  auto* radial = app.add_subcommand("radial", "radial density on a grid");
  radial->add_option("--kernel", cfg.kernel, "normal, t or cauchy")
      ->check(CLI::IsMember({"normal", "t", "cauchy"}));
  radial->add_option("--df", cfg.df, "degrees of freedom for --kernel t");
  radial->add_option("--dim", cfg.dim, "dimension k (default: product of factor orders)");
  radial->add_option("--factor", cfg.factors, "MATV1 factor files defining k");
  radial->add_option("--rmax", cfg.rmax, "largest radius");
  radial->add_option("--steps", cfg.steps, "number of grid intervals");
  radial->add_option("--out", cfg.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }
  if (sample->parsed()) {
    cfg.command = "sample";
    if (!sample->count("--n")) cfg.n = 1;
  } else if (density->parsed()) {
    cfg.command = "density";
  } else if (lstsq->parsed()) {
    cfg.command = "lstsq";
  } else if (verify->parsed()) {
    cfg.command = "verify";
  } else {
    cfg.command = "radial";
  }
  return run(cfg, out, err);
}

}  // namespace arrayvariate::cli
