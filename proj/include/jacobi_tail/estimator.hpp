#pragma once

// Importance-sampling and direct Monte Carlo estimators of
// P(lambda_max > p1 x / p) for the beta-Jacobi ensemble.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "logsumexp.hpp"
#include "parallel.hpp"
#include "params.hpp"
#include "sampling.hpp"
#include "specfn.hpp"
#include "tridiag.hpp"

namespace jtail {

enum class Method { kImportanceSampling, kDirectMC, kApproximation, kOracle };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::kImportanceSampling: return "is";
    case Method::kDirectMC: return "mc";
    case Method::kApproximation: return "approx";
    case Method::kOracle: return "oracle";
  }
  return "?";
}

/// A draw from the proposal measure L: n-1 ordered points of
/// J_{n-1}(p1-1, p2-1) and a top point from the truncated exponential that
/// starts at shift_a = max(p1 x / p, largest lower point).
struct ProposalDraw {
  std::vector<double> lower_eigs;
  double shift_a = 0.0;
  double top = 0.0;
};

/// Estimator output. Statistics that do not apply to a method are NaN
/// (hit_count is -1 outside direct Monte Carlo).
struct EstimateReport {
  Method method = Method::kImportanceSampling;
  long n_samples = 0;
  double estimate = 0.0;
  double log_estimate = -std::numeric_limits<double>::infinity();
  double std_per_sample = std::numeric_limits<double>::quiet_NaN();
  double cov_per_sample = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  /// ln of the empirical second moment (1/N) sum F_k^2.
  double log_second_moment = std::numeric_limits<double>::quiet_NaN();
  long hit_count = -1;
  bool zero_hits = false;
  long clamp_count = 0;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
};

struct RunOptions {
  int workers = 1;
  TruncExpMethod trunc_method = TruncExpMethod::kInverseCdf;
  /// Test hook: added to every log weight before accumulation.
  double log_weight_shift = 0.0;
  JacobiModelHooks model_hooks{};
};

/// Parameters of the (n-1)-point ensemble the proposal's lower points come from.
inline ModelParams lower_ensemble(const ModelParams& m) {
  ModelParams out = m;
  out.n = m.n - 1;
  out.p1 = m.p1 - 1;
  out.p2 = m.p2 - 1;
  out.x.reset();
  return out;
}

inline ProposalDraw sample_proposal(const ModelParams& m, RngStream& rng,
                                    const RunOptions& opt = {}, long* clamp_count = nullptr) {
  validate_with_threshold(m);
  ProposalDraw d;
  const double threshold = m.threshold();
  if (m.n > 1) {
    d.lower_eigs = sample_jacobi_ordered(lower_ensemble(m), rng, clamp_count, opt.model_hooks);
  }
  d.shift_a = d.lower_eigs.empty() ? threshold : std::max(threshold, d.lower_eigs.back());
  if (!(d.shift_a < 1.0))
    throw NumericalError("sample_proposal: shift point reached 1 " + m.describe());
  d.top = sample_trunc_exp(rng, {m.rate(), d.shift_a}, opt.trunc_method);
  return d;
}

namespace detail {

// Constant part of ln F_n: ln n + ln A_n.
inline double log_weight_constant(const ModelParams& m) {
  return std::log(static_cast<double>(m.n)) + specfn::log_norm_A(m);
}

inline double log_is_weight_with_constant(const ProposalDraw& d, const ModelParams& m,
                                          double log_const) {
  double log_gap = 0.0;
  for (double v : d.lower_eigs) {
    const double gap = d.top - v;
    if (!(gap > 0)) throw NumericalError("log_is_weight: top does not exceed a lower eigenvalue");
    log_gap += std::log(gap);
  }
  const double log_h = log_h_density(d.top, {m.rate(), d.shift_a});
  if (!std::isfinite(log_h)) throw NumericalError("log_is_weight: top outside proposal support");
  return log_const + m.beta * log_gap + specfn::log_u_n(d.top, m) - log_h;
}

}  // namespace detail

/// ln F_n = ln n + ln A_n + beta sum ln(top - lambda_i) + ln u_n(top) - ln h(top).
inline double log_is_weight(const ProposalDraw& d, const ModelParams& m) {
  validate_with_threshold(m);
  if (!(d.top > m.threshold())) return -std::numeric_limits<double>::infinity();
  return detail::log_is_weight_with_constant(d, m, detail::log_weight_constant(m));
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace detail

/// Summary statistics of a vector of log weights (index order fixed).
inline void summarize_log_weights(const std::vector<double>& log_w, EstimateReport& rep) {
  const auto n = static_cast<double>(log_w.size());
  LogSumExp first, second;
  for (double v : log_w) {
    first.add(v);
    second.add(2 * v);
  }
  rep.log_estimate = first.value() - std::log(n);
  rep.log_second_moment = second.value() - std::log(n);
  rep.estimate = std::exp(rep.log_estimate);
  // Relative spread computed from weights rescaled by the estimate, which is
  // exact where the naive E[F^2] - Est^2 difference would cancel.
  double ss = 0.0;
  for (double v : log_w) {
    const double w = std::exp(v - rep.log_estimate) - 1.0;
    ss += w * w;
  }
  rep.cov_per_sample = std::sqrt(ss / (n - 1));
  const double log_std = rep.log_estimate + std::log(rep.cov_per_sample);
  rep.std_per_sample = rep.cov_per_sample > 0 ? std::exp(log_std) : 0.0;
  rep.std_error = rep.std_per_sample / std::sqrt(n);
}

/// Importance-sampling estimate from N independent proposal draws; replication
/// k (1-based) uses derive_stream(master_seed, k).
inline EstimateReport run_is(const ModelParams& m, long num_samples, std::uint64_t master_seed,
                             const RunOptions& opt = {}) {
  if (num_samples < 2) throw UsageError("run_is: need at least 2 samples");
  validate_with_threshold(m);
  const auto start = std::chrono::steady_clock::now();
  const double log_const = detail::log_weight_constant(m);
  std::vector<double> log_w(static_cast<std::size_t>(num_samples));
  std::vector<long> clamps(static_cast<std::size_t>(num_samples), 0);
  parallel_for(log_w.size(), opt.workers, [&](std::size_t k) {
    RngStream rng = derive_stream(master_seed, k + 1);
    const ProposalDraw d = sample_proposal(m, rng, opt, &clamps[k]);
    log_w[k] = detail::log_is_weight_with_constant(d, m, log_const) + opt.log_weight_shift;
  });
  EstimateReport rep;
  rep.method = Method::kImportanceSampling;
  rep.n_samples = num_samples;
  rep.seed = master_seed;
  summarize_log_weights(log_w, rep);
  for (long c : clamps) rep.clamp_count += c;
  rep.runtime_ms = detail::elapsed_ms(start);
  return rep;
}

/// Crude Monte Carlo: fraction of tridiagonal-model draws whose largest
/// eigenvalue exceeds p1 x / p. Any finite x is accepted.
inline EstimateReport run_direct_mc(const ModelParams& m, long num_samples,
                                    std::uint64_t master_seed, const RunOptions& opt = {}) {
  if (num_samples < 1) throw UsageError("run_direct_mc: need at least 1 sample");
  validate_ensemble(m);
  if (!m.x || !std::isfinite(*m.x)) throw UsageError("run_direct_mc: finite x is required");
  const auto start = std::chrono::steady_clock::now();
  const double threshold = m.threshold();
  std::vector<char> hit(static_cast<std::size_t>(num_samples), 0);
  std::vector<long> clamps(hit.size(), 0);
  parallel_for(hit.size(), opt.workers, [&](std::size_t k) {
    RngStream rng = derive_stream(master_seed, k + 1);
    const auto eigs = sample_jacobi_ordered(m, rng, &clamps[k], opt.model_hooks);
    hit[k] = eigs.back() > threshold ? 1 : 0;
  });
  EstimateReport rep;
  rep.method = Method::kDirectMC;
  rep.n_samples = num_samples;
  rep.seed = master_seed;
  rep.hit_count = 0;
  for (char h : hit) rep.hit_count += h;
  for (long c : clamps) rep.clamp_count += c;
  const auto n = static_cast<double>(num_samples);
  const double ph = static_cast<double>(rep.hit_count) / n;
  rep.estimate = ph;
  rep.log_estimate = std::log(ph);
  rep.zero_hits = rep.hit_count == 0;
  rep.std_per_sample = num_samples > 1 ? std::sqrt(ph * (1 - ph) * n / (n - 1)) : 0.0;
  rep.cov_per_sample = ph > 0 ? rep.std_per_sample / ph : std::numeric_limits<double>::quiet_NaN();
  rep.std_error = rep.std_per_sample / std::sqrt(n);
  rep.log_second_moment = rep.log_estimate;
  rep.runtime_ms = detail::elapsed_ms(start);
  return rep;
}

/// Empirical means of sum_i (p lambda_i - p1)/p1 and sum_i ((p lambda_i - p1)/p1)^2.
struct CenteredMoments {
  double m1 = 0.0;
  double se1 = 0.0;
  double m2 = 0.0;
  double se2 = 0.0;
  long n_draws = 0;
};

inline CenteredMoments validate_centered_moments(const ModelParams& m, long num_draws,
                                                 std::uint64_t master_seed, int workers = 1) {
  if (num_draws < 2) throw UsageError("validate_centered_moments: need at least 2 draws");
  validate_ensemble(m);
  std::vector<double> s1(static_cast<std::size_t>(num_draws));
  std::vector<double> s2(s1.size());
  const double p = m.p();
  parallel_for(s1.size(), workers, [&](std::size_t k) {
    RngStream rng = derive_stream(master_seed, k + 1);
    const auto eigs = sample_jacobi_ordered(m, rng);
    double a = 0.0, b = 0.0;
    for (double v : eigs) {
      const double z = (p * v - m.p1) / m.p1;
      a += z;
      b += z * z;
    }
    s1[k] = a;
    s2[k] = b;
  });
  auto mean_se = [](const std::vector<double>& v) {
    const auto n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, std::sqrt(ss / (n - 1) / n)};
  };
  CenteredMoments out;
  std::tie(out.m1, out.se1) = mean_se(s1);
  std::tie(out.m2, out.se2) = mean_se(s2);
  out.n_draws = num_draws;
  return out;
}

}  // namespace jtail
