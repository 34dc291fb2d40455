#pragma once

// Log-domain special functions. Everything here is a pure function of its
// arguments and returns natural logs unless the name says otherwise.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "params.hpp"

namespace jtail::specfn {

namespace detail {

inline constexpr double kStirlingCutoff = 30.0;
inline constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

// B_{2k} / (2k (2k - 1)) for k = 1..8.
inline constexpr std::array<double, 8> kStirlingCoeffs = {
    1.0 / 12.0,           -1.0 / 360.0,       1.0 / 1260.0,         -1.0 / 1680.0,
    1.0 / 1188.0,         -691.0 / 360360.0,  1.0 / 156.0,          -3617.0 / 122400.0,
};

// Sum of the Bernoulli correction terms of the Stirling series at z >= 30.
inline double stirling_tail(double z) {
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double sum = 0.0;
  double pw = inv;
  for (double c : kStirlingCoeffs) {
    const double term = c * pw;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    pw *= inv2;
  }
  return sum;
}

inline void require_positive(double z, const char* what) {
  if (!(std::isfinite(z) && z > 0))
    throw DomainError(std::string(what) + ": argument must be positive and finite, got " +
                      std::to_string(z));
}

}  // namespace detail

/// ln Gamma(z) for z > 0. Stirling series with Bernoulli corrections above 30,
/// upward recurrence below.
inline double log_gamma(double z) {
  detail::require_positive(z, "log_gamma");
  if (z >= detail::kStirlingCutoff) {
    return (z - 0.5) * std::log(z) - z + detail::kHalfLog2Pi + detail::stirling_tail(z);
  }
  // ln Gamma(z) = ln Gamma(z + m) - ln(z (z+1) ... (z+m-1))
  double shifted = z;
  double log_prod = 0.0;
  double prod = 1.0;
  while (shifted < detail::kStirlingCutoff) {
    prod *= shifted;
    if (prod < 1e-200 || prod > 1e200) {
      log_prod += std::log(prod);
      prod = 1.0;
    }
    shifted += 1.0;
  }
  log_prod += std::log(prod);
  return log_gamma(shifted) - log_prod;
}

/// ln Gamma(z + d) - ln Gamma(z) for z > 0, d >= 0, without forming the two
/// large terms separately once both arguments are in the Stirling range.
inline double log_gamma_ratio(double z, double d) {
  detail::require_positive(z, "log_gamma_ratio");
  if (!(std::isfinite(d) && d >= 0))
    throw DomainError("log_gamma_ratio: shift must be non-negative and finite");
  if (d == 0) return 0.0;
  if (z < detail::kStirlingCutoff) {
    return log_gamma(z + d) - log_gamma(z);
  }
  const double w = z + d;
  // (w - 1/2) ln w - (z - 1/2) ln z - d  =  (z - 1/2) log1p(d/z) + d ln w - d
  const double main = (z - 0.5) * std::log1p(d / z) + d * std::log(w) - d;
  return main + (detail::stirling_tail(w) - detail::stirling_tail(z));
}

/// ln B(a, b) with the large argument handled through log_gamma_ratio.
inline double log_beta(double a, double b) {
  detail::require_positive(a, "log_beta");
  detail::require_positive(b, "log_beta");
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  return log_gamma(lo) - log_gamma_ratio(hi, lo);
}

namespace detail {

// Continued fraction for I_t(a, b) (modified Lentz), valid and fast for
// t < (a + 1) / (a + b + 2). Returns the fraction value without the front factor.
inline double inc_beta_cf(double a, double b, double t) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * t / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  const long max_iter = 1000 + static_cast<long>(20.0 * std::sqrt(std::max(a, b)));
  for (long m = 1; m <= max_iter; ++m) {
    const double md = static_cast<double>(m);
    const double m2 = 2.0 * md;
    double aa = md * (b - md) * t / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * t / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("reg_inc_beta: continued fraction did not converge (a=" +
                       std::to_string(a) + ", b=" + std::to_string(b) +
                       ", t=" + std::to_string(t) + ")");
}

inline void check_inc_beta_args(double a, double b, double t) {
  require_positive(a, "reg_inc_beta");
  require_positive(b, "reg_inc_beta");
  if (!(t >= 0.0 && t <= 1.0))
    throw DomainError("reg_inc_beta: t must lie in [0,1], got " + std::to_string(t));
}

// ln of the mass on the side of t that the continued fraction evaluates
// directly: returns {log value, true if it is the lower mass I_t(a,b)}.
struct DirectSide {
  double log_mass;
  bool is_lower;
};

inline DirectSide inc_beta_direct(double a, double b, double t) {
  const double log_front = a * std::log(t) + b * std::log1p(-t) - log_beta(a, b);
  if (t < (a + 1.0) / (a + b + 2.0)) {
    return {log_front + std::log(inc_beta_cf(a, b, t)) - std::log(a), true};
  }
  return {log_front + std::log(inc_beta_cf(b, a, 1.0 - t)) - std::log(b), false};
}

}  // namespace detail

/// Regularized incomplete beta I_t(a, b).
inline double reg_inc_beta(double a, double b, double t) {
  detail::check_inc_beta_args(a, b, t);
  if (t == 0.0) return 0.0;
  if (t == 1.0) return 1.0;
  const auto side = detail::inc_beta_direct(a, b, t);
  const double v = std::exp(side.log_mass);
  return side.is_lower ? v : 1.0 - v;
}

/// ln(1 - I_t(a, b)), accurate deep in the upper tail.
inline double log_reg_inc_beta_upper(double a, double b, double t) {
  detail::check_inc_beta_args(a, b, t);
  if (t == 0.0) return 0.0;
  if (t == 1.0) return -std::numeric_limits<double>::infinity();
  const auto side = detail::inc_beta_direct(a, b, t);
  if (!side.is_lower) return side.log_mass;
  return std::log1p(-std::exp(side.log_mass));
}

/// ln A_n^{p1,p2}: the Gamma ratio linking the n-point ordered density to the
/// (n-1)-point density of J_{n-1}(p1-1, p2-1). Large Gamma factors are paired
/// (Gamma(beta p/2) with the larger of Gamma(beta p1/2), Gamma(beta p2/2), and
/// Gamma(beta(p-1)/2) with Gamma(beta(p-n)/2)) so only differences of the size
/// of the smaller parameter are summed.
inline double log_norm_A(const ModelParams& m) {
  validate_ensemble(m);
  const double hb = m.beta / 2;
  const double p = m.p();
  const double lo = std::min(m.p1, m.p2);
  const double hi = std::max(m.p1, m.p2);
  const double small = log_gamma(1 + hb) - log_gamma(1 + hb * m.n);
  // Gamma(beta p/2) / Gamma(beta hi/2): shift beta lo / 2.
  const double top_pair = log_gamma_ratio(hb * hi, hb * lo);
  // Gamma(beta (p-1)/2) / Gamma(beta (p-n)/2): shift beta (n-1) / 2.
  const double mid_pair = log_gamma_ratio(hb * (p - m.n), hb * (m.n - 1));
  const double out = small + top_pair + mid_pair - log_gamma(hb * lo);
  if (!std::isfinite(out)) throw NumericalError("log_norm_A: non-finite result " + m.describe());
  return out;
}

/// ln C_n^{p1,p2}, the normalizing constant of the unordered joint density
/// of J_n(p1, p2). Direct product of Gamma factors; intended for moderate
/// parameters (oracles and cross-checks).
inline double log_jacobi_normalizer(const ModelParams& m) {
  validate_ensemble(m);
  const double hb = m.beta / 2;
  const double p = m.p();
  double out = 0.0;
  for (int j = 1; j <= m.n; ++j) {
    out += log_gamma(1 + hb) + log_gamma(hb * (p - m.n + j)) - log_gamma(1 + hb * j) -
           log_gamma(hb * (m.p1 - m.n + j)) - log_gamma(hb * (m.p2 - m.n + j));
  }
  return out;
}

/// The five terms of the large-parameter expansion of ln A_n; summed by
/// log_norm_A_asymptotic.
struct AsymptoticTerms {
  double p1_term;
  double p2_term;
  double n_term;
  double half_log_term;
  double linear_term;
  [[nodiscard]] double sum() const {
    return p1_term + p2_term + n_term + half_log_term + linear_term;
  }
};

inline AsymptoticTerms log_norm_A_asymptotic_terms(const ModelParams& m) {
  validate_ensemble(m);
  const double p = m.p();
  const double b = m.beta;
  return {
      b * m.p1 / 2 * std::log(p / m.p1),
      b * m.p2 / 2 * std::log(p / m.p2),
      b * (m.n - 1) / 2 * std::log(p / m.n),
      0.5 * std::log(b * m.p1),
      0.5 * b * m.n,
  };
}

/// Large-parameter expansion of ln A_n with the o(beta n) remainder dropped.
/// Meaningful for n << p1 << p2; not enforced.
inline double log_norm_A_asymptotic(const ModelParams& m) {
  return log_norm_A_asymptotic_terms(m).sum();
}

/// ln u_n(y) = (r1n - 1) ln y + (r2n - 1) ln(1 - y), for 0 < y < 1.
inline double log_u_n(double y, const ModelParams& m) {
  if (!(y > 0.0 && y < 1.0))
    throw DomainError("log_u_n: y must lie in (0,1), got " + std::to_string(y));
  return (m.r1n() - 1) * std::log(y) + (m.r2n() - 1) * std::log1p(-y);
}

}  // namespace jtail::specfn
