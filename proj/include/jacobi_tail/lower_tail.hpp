#pragma once

// Lower tail of the smallest eigenvalue through reflection: if mu ~ J_n(q1, q2)
// then 1 - mu_(1) has the law of lambda_(n) for lambda ~ J_n(q2, q1).

#include <cmath>
#include <cstdint>
#include <string>

#include "approximation.hpp"
#include "errors.hpp"
#include "estimator.hpp"
#include "oracle.hpp"
#include "params.hpp"

namespace jtail {

/// Same ensemble with p1 and p2 exchanged; x is dropped.
inline ModelParams swap_ensemble(const ModelParams& m) {
  ModelParams out = m;
  out.p1 = m.p2;
  out.p2 = m.p1;
  out.x.reset();
  return out;
}

/// Upper-tail problem equivalent to P(mu_(1) < t) for mu ~ J_n(mu.p1, mu.p2).
inline ModelParams upper_tail_equivalent(const ModelParams& mu, double t) {
  validate_ensemble(mu);
  if (!(t > 0 && t < 1)) throw UsageError("lower-tail threshold must lie in (0,1), got " +
                                          std::to_string(t));
  ModelParams lam = swap_ensemble(mu);
  lam.x = (1 - t) * lam.p() / lam.p1;
  return lam;
}

struct LowerTailRequest {
  Method method = Method::kImportanceSampling;
  long num_samples = 10000;
  std::uint64_t seed = 0;
  RunOptions options{};
  double oracle_abs_tol = 1e-10;
};

/// P(mu_(1) < t) computed as the upper tail of the reflected ensemble.
inline EstimateReport smallest_eigenvalue_lower_tail(const ModelParams& mu, double t,
                                                     const LowerTailRequest& req = {}) {
  const ModelParams lam = upper_tail_equivalent(mu, t);
  switch (req.method) {
    case Method::kImportanceSampling:
      return run_is(lam, req.num_samples, req.seed, req.options);
    case Method::kDirectMC:
      return run_direct_mc(lam, req.num_samples, req.seed, req.options);
    case Method::kApproximation: {
      EstimateReport rep;
      rep.method = Method::kApproximation;
      rep.log_estimate = tail_approx_log(lam);
      rep.estimate = std::exp(rep.log_estimate);
      return rep;
    }
    case Method::kOracle: {
      EstimateReport rep;
      rep.method = Method::kOracle;
      if (lam.n == 1) {
        rep.log_estimate = log_oracle_tail_n1(lam);
      } else if (lam.n == 2) {
        rep.log_estimate = std::log(oracle_tail_n2(lam, req.oracle_abs_tol));
      } else {
        throw UsageError("oracle method requires n in {1, 2}");
      }
      rep.estimate = std::exp(rep.log_estimate);
      return rep;
    }
  }
  throw UsageError("unknown method");
}

}  // namespace jtail
