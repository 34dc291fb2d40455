#pragma once

#include <cmath>
#include <map>
#include <string>

#include "errors.hpp"
#include "params.hpp"
#include "specfn.hpp"

namespace jtail {

/// Which leading constant the closed-form tail uses.
enum class Prefactor {
  /// 2 n A_n x / ((x - 1) beta p): the endpoint integral of u_n evaluated
  /// with the exponential rate beta p (x - 1) / (2 x).
  kEndpointIntegral,
  /// 2 n A_n / (beta p), as the closed form is usually quoted. Off by
  /// ln(x / (x - 1)) already at n = 1.
  kAsPublished,
};

/// ln of the closed-form approximation of P(lambda_max > p1 x / p):
///   ln(2 n A_n / (beta p)) [+ ln(x / (x - 1))] + beta (n - 1) ln(p1 (x - 1) / p)
///   + ln u_n(p1 x / p) - beta n^2 / (2 p1 (x - 1)^2)
inline double tail_approx_log(const ModelParams& m,
                              Prefactor prefactor = Prefactor::kEndpointIntegral) {
  validate_with_threshold(m);
  const double x = *m.x;
  const double p = m.p();
  const double n = m.n;
  double out = std::log(2.0) + std::log(n) + specfn::log_norm_A(m) - std::log(m.beta * p) +
               m.beta * (n - 1) * std::log(m.p1 * (x - 1) / p) +
               specfn::log_u_n(m.threshold(), m) -
               m.beta * n * n / (2 * m.p1 * (x - 1) * (x - 1));
  if (prefactor == Prefactor::kEndpointIntegral) out += std::log(x / (x - 1));
  return out;
}

enum class Regime { kH0, kH1, kH2, kNone };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::kH0: return "H0";
    case Regime::kH1: return "H1";
    case Regime::kH2: return "H2";
    case Regime::kNone: return "none";
  }
  return "?";
}

/// Diagnostic ratios behind the three parameter-growth regimes and the
/// regime they point to.
///
/// The asymptotic relations are read against the cut-off tau = `threshold`:
///   "a << b"  when a/b <= tau^(3/2)   (negligible)
///   "a = O(b)" when a/b <= tau^(1/2)  (bounded, comparable at most)
/// and the clause shared by all regimes, (log n)/n v n/p1 << beta, is accepted
/// at the bounded level. H0 needs both growth ratios negligible, H1 both
/// bounded, H2 needs n p1 << p2 and n << p1. The strongest match wins.
struct RegimeReport {
  std::map<std::string, double> ratios;
  Regime matched = Regime::kNone;
  double threshold = 0.1;
  double negligible_cutoff = 0.0;
  double bounded_cutoff = 0.0;
};

inline RegimeReport regime_check(const ModelParams& m, double threshold = 0.1) {
  validate_ensemble(m);
  if (!(threshold > 0 && threshold < 1)) throw UsageError("regime threshold must lie in (0,1)");
  const double b = m.beta;
  const double n = m.n;
  RegimeReport rep;
  rep.threshold = threshold;
  rep.negligible_cutoff = std::pow(threshold, 1.5);
  rep.bounded_cutoff = std::sqrt(threshold);

  const double growth = b * n * m.p1 * m.p1 / m.p2;
  const double spread = std::pow(b * n, 5) / std::pow(b * m.p1, 3);
  const double log_over = std::log(n) / (b * n);
  const double n_over = n / (b * m.p1);
  const double np1_p2 = n * m.p1 / m.p2;
  const double n_p1 = n / m.p1;
  rep.ratios = {
      {"beta*n*p1^2/p2", growth},        {"(beta*n)^5/(beta*p1)^3", spread},
      {"log(n)/(beta*n)", log_over},     {"n/(beta*p1)", n_over},
      {"n*p1/p2", np1_p2},               {"n/p1", n_p1},
  };
  const auto negligible = [&](double r) { return r <= rep.negligible_cutoff; };
  const auto bounded = [&](double r) { return r <= rep.bounded_cutoff; };
  const bool shared = bounded(log_over) && bounded(n_over);
  if (shared && negligible(growth) && negligible(spread)) {
    rep.matched = Regime::kH0;
  } else if (shared && bounded(growth) && bounded(spread)) {
    rep.matched = Regime::kH1;
  } else if (shared && negligible(np1_p2) && negligible(n_p1)) {
    rep.matched = Regime::kH2;
  }
  return rep;
}

}  // namespace jtail
