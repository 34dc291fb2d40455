#pragma once

// Runs a config over its x grid and writes one CSV row per x.

#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "approximation.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "estimator.hpp"
#include "oracle.hpp"

namespace jtail {

inline constexpr const char* kCsvHeader =
    "beta,n,p1,p2,x,method,num_samples,seed,estimate,log_estimate,std_per_sample,"
    "cov_per_sample,std_error,hit_count,runtime_ms";

/// Shortest round-trip decimal form; NaN (statistic not applicable) is empty.
inline std::string format_real(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw NumericalError("format_real: to_chars failed");
  return {buf, res.ptr};
}

inline std::string format_int(long long v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

inline std::string format_uint(unsigned long long v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

struct ExperimentRow {
  double x = 0.0;
  EstimateReport report;
};

/// Run-time switches that are not part of the experiment itself.
struct ExperimentOptions {
  /// When false runtime_ms is written as 0 so repeated runs are byte-identical.
  bool record_runtime = true;
  JacobiModelHooks model_hooks{};
};

inline std::string csv_row(const ExperimentConfig& cfg, const ExperimentRow& row,
                           bool record_runtime = true) {
  const auto& r = row.report;
  std::string out;
  out += format_real(cfg.beta) + ',';
  out += format_int(cfg.n) + ',';
  out += format_real(cfg.p1) + ',';
  out += format_real(cfg.p2) + ',';
  out += format_real(row.x) + ',';
  out += std::string(method_name(r.method)) + ',';
  out += format_int(r.n_samples) + ',';
  out += format_uint(r.seed) + ',';
  out += format_real(r.estimate) + ',';
  out += format_real(r.log_estimate) + ',';
  out += format_real(r.std_per_sample) + ',';
  out += format_real(r.cov_per_sample) + ',';
  out += format_real(r.std_error) + ',';
  out += (r.hit_count >= 0 ? format_int(r.hit_count) : std::string()) + ',';
  out += format_real(record_runtime ? r.runtime_ms : 0.0);
  return out;
}

/// Evaluates one grid point with the configured method.
inline EstimateReport evaluate_point(const ExperimentConfig& cfg, double x,
                                     const ExperimentOptions& eopt = {}) {
  const ModelParams m = cfg.params().with_x(x);
  RunOptions opt;
  opt.workers = cfg.workers;
  opt.model_hooks = eopt.model_hooks;
  const auto start = std::chrono::steady_clock::now();
  EstimateReport rep;
  switch (cfg.method) {
    case Method::kImportanceSampling:
      return run_is(m, cfg.num_samples, cfg.seed, opt);
    case Method::kDirectMC:
      return run_direct_mc(m, cfg.num_samples, cfg.seed, opt);
    case Method::kApproximation:
      rep.method = Method::kApproximation;
      rep.log_estimate = tail_approx_log(m);
      break;
    case Method::kOracle:
      rep.method = Method::kOracle;
      rep.log_estimate =
          m.n == 1 ? log_oracle_tail_n1(m) : std::log(oracle_tail_n2(m, cfg.oracle_abs_tol));
      break;
  }
  rep.estimate = std::exp(rep.log_estimate);
  rep.seed = cfg.seed;
  rep.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                             start).count();
  return rep;
}

/// One-line regime summary for the diagnostic stream.
inline std::string regime_header(const ExperimentConfig& cfg) {
  const auto rep = regime_check(cfg.params(), cfg.regime_threshold);
  std::string out = "# regime: ";
  out += regime_name(rep.matched);
  out += " (threshold " + format_real(rep.threshold) + ")";
  for (const auto& [name, value] : rep.ratios) out += "  " + name + "=" + format_real(value);
  return out;
}

/// Writes the header and one row per x to `csv`; diagnostics go to `diag`.
/// Each row is flushed as soon as it is computed. A failure is rethrown with
/// the offending x prepended.
inline std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg, std::ostream& csv,
                                                 std::ostream& diag,
                                                 const ExperimentOptions& eopt = {}) {
  diag << regime_header(cfg) << '\n';
  csv << kCsvHeader << '\n';
  std::vector<ExperimentRow> rows;
  for (double x : cfg.x_values) {
    ExperimentRow row{x, {}};
    try {
      row.report = evaluate_point(cfg, x, eopt);
    } catch (const NumericalError& e) {
      throw NumericalError("x=" + format_real(x) + ": " + e.what());
    } catch (const DomainError& e) {
      throw NumericalError("x=" + format_real(x) + ": " + e.what());
    }
    if (row.report.zero_hits) {
      diag << "# x=" << format_real(x) << ": no hits in " << row.report.n_samples
           << " draws; estimate is 0\n";
    }
    if (row.report.clamp_count > 0) {
      diag << "# x=" << format_real(x) << ": " << row.report.clamp_count
           << " eigenvalues clamped into [0,1]\n";
    }
    csv << csv_row(cfg, row, eopt.record_runtime) << '\n';
    csv.flush();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace jtail
