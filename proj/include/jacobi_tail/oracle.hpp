#pragma once

// Exact and brute-force tail oracles for n = 1 and n = 2, used to check the
// samplers and estimators at small n.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "errors.hpp"
#include "params.hpp"
#include "specfn.hpp"

namespace jtail {

/// P(lambda > p1 x / p) at n = 1, where the ensemble is Beta(beta p1/2, beta p2/2).
inline double log_oracle_tail_n1(const ModelParams& m) {
  validate_ensemble(m);
  if (m.n != 1) throw UsageError("oracle_tail_n1 requires n = 1, got " + std::to_string(m.n));
  const double t = m.threshold();
  if (t <= 0) return 0.0;
  if (t >= 1) return -std::numeric_limits<double>::infinity();
  return specfn::log_reg_inc_beta_upper(m.beta * m.p1 / 2, m.beta * m.p2 / 2, t);
}

inline double oracle_tail_n1(const ModelParams& m) { return std::exp(log_oracle_tail_n1(m)); }

struct QuadratureResult {
  double value;
  double abs_error;
};

namespace detail {

inline constexpr unsigned kQuadMaxDepth = 18;

// Adaptive Gauss-Kronrod on [a, b]; `rel_tol` is relative to the L1 norm.
template <typename F>
QuadratureResult gk_integrate(F&& f, double a, double b, double rel_tol) {
  double err = 0.0;
  double l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, kQuadMaxDepth, rel_tol, &err, &l1);
  return {v, err};
}

// Tanh-sinh on [a, b]; tolerates integrable endpoint singularities such as
// (1 - y)^(-1/4). `rel_tol` is relative to the L1 norm.
template <typename F>
QuadratureResult ts_integrate(F&& f, double a, double b, double rel_tol) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0;
  double l1 = 0.0;
  const double v = integrator.integrate(f, a, b, rel_tol, &err, &l1);
  return {v, err};
}

// ln of the n = 1 density at y.
inline double log_density_n1(double y, const ModelParams& m) {
  return specfn::log_u_n(y, m) - specfn::log_beta(m.beta * m.p1 / 2, m.beta * m.p2 / 2);
}

// ln of the ordered n = 2 density 2 f_2(x1, x2), x1 < x2.
struct LogDensityN2 {
  explicit LogDensityN2(const ModelParams& m)
      : beta(m.beta), r1m1(m.r1n() - 1), r2m1(m.r2n() - 1),
        log_const(std::log(2.0) + specfn::log_jacobi_normalizer(m)) {}
  double operator()(double x1, double x2) const {
    return log_const + beta * std::log(x2 - x1) + r1m1 * (std::log(x1) + std::log(x2)) +
           r2m1 * (std::log1p(-x1) + std::log1p(-x2));
  }
  double beta, r1m1, r2m1, log_const;
};

}  // namespace detail

/// Brute-force n = 1 tail by quadrature of the beta density (cross-check of
/// the continued fraction).
inline QuadratureResult oracle_tail_n1_quadrature(const ModelParams& m, double rel_tol = 1e-12) {
  validate_ensemble(m);
  if (m.n != 1) throw UsageError("oracle_tail_n1_quadrature requires n = 1");
  const double t = std::clamp(m.threshold(), 0.0, 1.0);
  // shift by the log mode to keep the integrand O(1)
  const double mode = std::clamp((m.r1n() - 1) / (m.r1n() + m.r2n() - 2), 1e-12, 1 - 1e-12);
  const double shift = detail::log_density_n1(mode, m);
  auto f = [&](double y) {
    if (!(y > 0 && y < 1)) return 0.0;
    return std::exp(detail::log_density_n1(y, m) - shift);
  };
  // split at the mode so the peak sits on a panel edge
  QuadratureResult out{0.0, 0.0};
  if (t < mode) {
    const auto a = detail::ts_integrate(f, t, mode, rel_tol);
    const auto b = detail::ts_integrate(f, mode, 1.0, rel_tol);
    out = {a.value + b.value, a.abs_error + b.abs_error};
  } else {
    out = detail::ts_integrate(f, t, 1.0, rel_tol);
  }
  const double scale = std::exp(shift);
  return {out.value * scale, out.abs_error * scale};
}

/// P(lambda_(2) > p1 x / p) at n = 2 by nested tanh-sinh quadrature of the
/// ordered joint density over {x1 < x2, x2 > threshold}. Thresholds <= 0
/// integrate the whole simplex. Throws NumericalError when the estimated
/// error exceeds abs_tol.
inline QuadratureResult oracle_tail_n2_detailed(const ModelParams& m, double abs_tol) {
  validate_ensemble(m);
  if (m.n != 2) throw UsageError("oracle_tail_n2 requires n = 2, got " + std::to_string(m.n));
  if (!(abs_tol > 0)) throw UsageError("oracle_tail_n2: abs_tol must be positive");
  const double t = std::clamp(m.threshold(), 0.0, 1.0);
  if (t >= 1.0) return {0.0, 0.0};
  const detail::LogDensityN2 logf(m);

  // Global max-shift: locate the log-density peak on a grid.
  constexpr int kGrid = 256;
  double shift = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < kGrid; ++i) {
    for (int j = 1; j < i; ++j) {
      shift = std::max(shift, logf(static_cast<double>(j) / kGrid, static_cast<double>(i) / kGrid));
    }
  }
  const double scale = std::exp(shift);
  // Tolerances are relative to the integral's L1 norm, which is at most the
  // total mass 1 in unshifted units.
  const double inner_tol = std::max(0.1 * abs_tol, 1e-15);
  const double outer_tol = std::max(0.5 * abs_tol, 1e-15);

  double inner_err_max = 0.0;
  auto inner = [&](double x2) {
    if (!(x2 > 0 && x2 < 1)) return 0.0;
    auto g = [&](double x1) {
      if (!(x1 > 0 && x1 < x2)) return 0.0;
      return std::exp(logf(x1, x2) - shift);
    };
    const auto r = detail::ts_integrate(g, 0.0, x2, inner_tol);
    inner_err_max = std::max(inner_err_max, r.abs_error);
    return r.value;
  };
  const auto outer = detail::ts_integrate(inner, t, 1.0, outer_tol);
  const double value = outer.value * scale;
  const double err = (outer.abs_error + inner_err_max * (1.0 - t)) * scale;
  if (!(err <= abs_tol) || !std::isfinite(value)) {
    throw NumericalError("oracle_tail_n2: quadrature did not reach abs_tol " +
                         std::to_string(abs_tol) + " (estimated error " + std::to_string(err) +
                         ", value " + std::to_string(value) + ")");
  }
  return {value, err};
}

inline double oracle_tail_n2(const ModelParams& m, double abs_tol = 1e-10) {
  return oracle_tail_n2_detailed(m, abs_tol).value;
}

}  // namespace jtail
