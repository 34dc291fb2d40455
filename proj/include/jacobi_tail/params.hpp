#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "errors.hpp"

namespace jtail {

/// One beta-Jacobi problem instance: ensemble J_n(p1, p2) at inverse temperature
/// beta, plus an optional threshold factor x for the event lambda_max > p1 x / p.
struct ModelParams {
  double beta = 1.0;
  int n = 1;
  double p1 = 1.0;
  double p2 = 1.0;
  std::optional<double> x;

  [[nodiscard]] double p() const { return p1 + p2; }
  [[nodiscard]] double r1n() const { return beta * (p1 - n + 1) / 2; }
  [[nodiscard]] double r2n() const { return beta * (p2 - n + 1) / 2; }

  /// Threshold factor; throws if unset.
  [[nodiscard]] double threshold_factor() const {
    if (!x) throw UsageError("ModelParams: threshold factor x is not set");
    return *x;
  }
  /// Event threshold p1 x / p on the eigenvalue scale.
  [[nodiscard]] double threshold() const { return p1 * threshold_factor() / p(); }
  /// Proposal rate beta p (x - 1) / (2 x).
  [[nodiscard]] double rate() const {
    const double xv = threshold_factor();
    return beta * p() * (xv - 1) / (2 * xv);
  }

  [[nodiscard]] ModelParams with_x(double xv) const {
    ModelParams out = *this;
    out.x = xv;
    return out;
  }

  [[nodiscard]] std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "(beta=" << beta << ", n=" << n << ", p1=" << p1 << ", p2=" << p2;
    if (x) os << ", x=" << *x;
    os << ")";
    return os.str();
  }
};

/// Checks the ensemble part: beta > 0, n >= 1, p1 >= n, p2 >= n, all finite.
inline void validate_ensemble(const ModelParams& m) {
  if (!(std::isfinite(m.beta) && m.beta > 0))
    throw DomainError("beta must be positive and finite " + m.describe());
  if (m.n < 1) throw DomainError("n must be >= 1 " + m.describe());
  if (!(std::isfinite(m.p1) && m.p1 >= m.n))
    throw DomainError("p1 must be finite and >= n " + m.describe());
  if (!(std::isfinite(m.p2) && m.p2 >= m.n))
    throw DomainError("p2 must be finite and >= n " + m.describe());
}

/// Ensemble checks plus x > 1 and p1 x / p < 1.
inline void validate_with_threshold(const ModelParams& m) {
  validate_ensemble(m);
  if (!m.x) throw UsageError("threshold factor x is required " + m.describe());
  if (!(std::isfinite(*m.x) && *m.x > 1))
    throw DomainError("threshold factor x must exceed 1 " + m.describe());
  if (!(m.threshold() < 1))
    throw DomainError("threshold p1*x/p must be below 1 " + m.describe());
}

}  // namespace jtail
