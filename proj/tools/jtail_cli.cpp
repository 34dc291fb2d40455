// jtail: command-line front end for the beta-Jacobi tail estimators.
//
//   jtail estimate --beta 1 --n 10 --p1 1000 --p2 1e9 --x 1.5 --num-samples 10000
//   jtail sweep --config study.json --out study.csv
//   jtail oracle --beta 2 --n 2 --p1 6 --p2 9 --x 1.2,1.4
//   jtail validate [--quick]

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jacobi_tail.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kValidation = 4 };

struct RunFlags {
  std::string config_path;
  std::optional<double> beta;
  std::optional<long long> n;
  std::optional<double> p1;
  std::optional<double> p2;
  std::vector<double> x;
  std::optional<long long> num_samples;
  std::optional<unsigned long long> seed;
  std::optional<std::string> method;
  std::optional<long long> workers;
  std::optional<std::string> out;
  std::optional<double> threshold;
  std::optional<double> oracle_tol;
  bool no_runtime = false;
};

void add_run_flags(CLI::App& sub, RunFlags& f) {
  sub.add_option("--config", f.config_path, "JSON experiment config");
  sub.add_option("--beta", f.beta, "inverse temperature beta");
  sub.add_option("--n", f.n, "matrix size n");
  sub.add_option("--p1", f.p1, "first ensemble parameter");
  sub.add_option("--p2", f.p2, "second ensemble parameter");
  sub.add_option("--x", f.x, "threshold factor(s), comma separated")->delimiter(',');
  sub.add_option("--num-samples", f.num_samples, "replications per x");
  sub.add_option("--seed", f.seed, "master seed");
  sub.add_option("--method", f.method, "is | mc | approx | oracle");
  sub.add_option("--workers", f.workers, "worker threads");
  sub.add_option("--out", f.out, "CSV output path (default: stdout)");
  sub.add_option("--threshold", f.threshold, "regime diagnostic cut-off");
  sub.add_option("--oracle-tol", f.oracle_tol, "absolute tolerance of the n=2 oracle");
  sub.add_flag("--no-runtime", f.no_runtime, "write runtime_ms as 0");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw jtail::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> default_grid() {
  std::vector<double> xs;
  for (int i = 11; i <= 20; ++i) xs.push_back(i / 10.0);
  return xs;
}

// Merges the config file with the command-line overrides, then validates.
jtail::ExperimentConfig build_config(const RunFlags& f, const char* forced_method,
                                     bool grid_default) {
  nlohmann::json doc = nlohmann::json::object();
  if (!f.config_path.empty()) {
    try {
      doc = nlohmann::json::parse(read_file(f.config_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw jtail::ConfigError(f.config_path + ": malformed config: " + e.what());
    }
    if (!doc.is_object()) throw jtail::ConfigError(f.config_path + ": expected a JSON object");
  }
  if (f.beta) doc["beta"] = *f.beta;
  if (f.n) doc["n"] = *f.n;
  if (f.p1) doc["p1"] = *f.p1;
  if (f.p2) doc["p2"] = *f.p2;
  if (!f.x.empty()) doc["x_values"] = f.x;
  if (f.num_samples) doc["num_samples"] = *f.num_samples;
  if (f.seed) doc["seed"] = *f.seed;
  if (f.method) doc["method"] = *f.method;
  if (forced_method) {
    if (doc.contains("method") && doc["method"] != forced_method)
      throw jtail::ConfigError(std::string("this subcommand always uses method ") + forced_method);
    doc["method"] = forced_method;
  }
  if (f.workers) doc["workers"] = *f.workers;
  if (f.out) doc["output_path"] = *f.out;
  if (f.threshold) doc["regime_threshold"] = *f.threshold;
  if (f.oracle_tol) doc["oracle_abs_tol"] = *f.oracle_tol;
  if (grid_default && !doc.contains("x_values")) doc["x_values"] = default_grid();
  try {
    return jtail::config_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw jtail::ConfigError(std::string("config type error: ") + e.what());
  }
}

int run_config(const jtail::ExperimentConfig& cfg, bool no_runtime) {
  jtail::ExperimentOptions eopt;
  eopt.record_runtime = !no_runtime;
  if (cfg.output_path.empty()) {
    jtail::run_experiment(cfg, std::cout, std::cerr, eopt);
    return kOk;
  }
  const std::string partial = cfg.output_path + ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw jtail::ConfigError("cannot write '" + partial + "'");
    jtail::run_experiment(cfg, out, std::cerr, eopt);
    if (!out) throw jtail::NumericalError("write to '" + partial + "' failed");
  }
  std::filesystem::rename(partial, cfg.output_path);
  return kOk;
}

int run_validate(bool quick, int workers, std::uint64_t seed, double perturb) {
  jtail::ValidateOptions vo;
  vo.quick = quick;
  vo.workers = workers;
  vo.seed = seed;
  vo.model_hooks.offdiag_scale = perturb;
  const auto results = jtail::run_validation(vo);
  int failed = 0;
  for (const auto& r : results) {
    std::printf("[%s] %-52s measured %-12.6g tolerance %-12.6g %s\n", r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.measured, r.tolerance, r.detail.c_str());
    if (!r.passed) ++failed;
  }
  std::printf("%d of %zu checks passed%s\n", static_cast<int>(results.size()) - failed,
              results.size(), quick ? " (quick mode)" : "");
  return failed == 0 ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tail probabilities of the largest beta-Jacobi eigenvalue"};
  app.require_subcommand(1);

  RunFlags est_flags, sweep_flags, oracle_flags;
  auto* est = app.add_subcommand("estimate", "estimate the tail at one x");
  add_run_flags(*est, est_flags);
  auto* sweep = app.add_subcommand("sweep", "estimate over an x grid (default 1.1..2.0)");
  add_run_flags(*sweep, sweep_flags);
  auto* oracle = app.add_subcommand("oracle", "exact tail for n = 1 or 2");
  add_run_flags(*oracle, oracle_flags);

  auto* val = app.add_subcommand("validate", "run the self-check battery");
  bool quick = false;
  int val_workers = 1;
  std::uint64_t val_seed = jtail::ValidateOptions{}.seed;
  double perturb = 1.0;
  val->add_flag("--quick", quick, "one tenth of the sample sizes");
  val->add_option("--workers", val_workers, "worker threads")->check(CLI::PositiveNumber);
  val->add_option("--seed", val_seed, "master seed");
  val->add_option("--perturb-offdiag", perturb, "scale the off-diagonal (negative control)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (val->parsed()) return run_validate(quick, val_workers, val_seed, perturb);
    if (est->parsed()) {
      const auto cfg = build_config(est_flags, nullptr, false);
      if (cfg.x_values.size() != 1)
        throw jtail::ConfigError("estimate takes exactly one x; use sweep for a grid");
      return run_config(cfg, est_flags.no_runtime);
    }
    if (sweep->parsed()) return run_config(build_config(sweep_flags, nullptr, true),
                                           sweep_flags.no_runtime);
    if (oracle->parsed()) return run_config(build_config(oracle_flags, "oracle", true),
                                            oracle_flags.no_runtime);
  } catch (const jtail::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const jtail::UsageError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  }
  return kConfig;
}
