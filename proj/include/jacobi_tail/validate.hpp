#pragma once

// Fast self-check battery behind `jtail validate`. Every check reports the
// tolerance it was judged against and the value it measured.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "approximation.hpp"
#include "estimator.hpp"
#include "oracle.hpp"
#include "sampling.hpp"
#include "tridiag.hpp"

namespace jtail {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct ValidateOptions {
  /// Quick mode cuts every sample size by 10; the statistical tolerances are
  /// multiples of the standard error and so widen by sqrt(10).
  bool quick = false;
  std::uint64_t seed = 20240601;
  int workers = 1;
  JacobiModelHooks model_hooks{};
};

namespace detail {

inline CheckResult make_check(std::string name, double measured, double tol, std::string detail) {
  return {std::move(name), measured, tol, measured <= tol, std::move(detail)};
}

inline long scaled(long n, bool quick) { return quick ? std::max(n / 10, 20L) : n; }

inline constexpr double kSigmas = 4.0;

}  // namespace detail

inline std::vector<CheckResult> run_validation(const ValidateOptions& vo = {}) {
  std::vector<CheckResult> out;
  RunOptions ro;
  ro.workers = vo.workers;
  ro.model_hooks = vo.model_hooks;

  // Trace identities on the generating variates.
  {
    const ModelParams m{2.0, 12, 100.0, 400.0, std::nullopt};
    const long draws = detail::scaled(20000, vo.quick);
    double worst1 = 0.0, worst2 = 0.0;
    for (long k = 0; k < draws; ++k) {
      RngStream rng = derive_stream(vo.seed, static_cast<std::uint64_t>(k + 1));
      const auto t = build_jacobi_tridiagonal(m, rng, vo.model_hooks);
      const auto eig = eig_sym_tridiag(t);
      double s1 = 0.0, s2 = 0.0;
      for (double v : eig) {
        s1 += v;
        s2 += v * v;
      }
      worst1 = std::max(worst1, std::abs(s1 - trace_from_generators(t)));
      worst2 = std::max(worst2, std::abs(s2 - trace_sq_from_generators(t)));
    }
    const double tol = 1e-10 * m.n;
    const std::string where = std::to_string(draws) + " draws at " + m.describe();
    out.push_back(detail::make_check("trace identity: sum lambda = sum a", worst1, tol,
                                     "max abs deviation over " + where));
    out.push_back(detail::make_check("trace identity: sum lambda^2 = sum a^2 + 2 sum b^2", worst2,
                                     tol, "max abs deviation over " + where));
  }

  // Normalization of the truncated-exponential proposal density.
  {
    double worst = 0.0;
    for (double rate : {1e-8, 0.5, 1.0, 5.0, 50.0, 5e3, 1e4, 5e6}) {
      for (double lower : {0.0, 0.3, 0.9, 0.999}) {
        const TruncExpParams tp{rate, lower};
        const auto h = [&](double y) { return std::exp(log_h_density(y, tp)); };
        // split so the adaptive rule sees the boundary layer of width 1/rate
        const double mid = std::min(1.0, lower + 50.0 / rate);
        double mass = detail::gk_integrate(h, lower, mid, 1e-13).value;
        if (mid < 1.0) mass += detail::gk_integrate(h, mid, 1.0, 1e-13).value;
        worst = std::max(worst, std::abs(mass - 1.0));
      }
    }
    out.push_back(detail::make_check("proposal density integrates to 1", worst, 1e-8,
                                     "max |int h - 1| over rate x lower grid"));
  }

  // Beta sampler means.
  {
    const long draws = detail::scaled(40000, vo.quick);
    double worst = 0.0;
    for (auto [a, b] : {std::pair{0.5, 0.5}, std::pair{3.0, 7.0}, std::pair{1e4, 2e4}}) {
      RngStream rng = derive_stream(vo.seed ^ 0xbe7a, static_cast<std::uint64_t>(a * 7 + b));
      double sum = 0.0;
      for (long k = 0; k < draws; ++k) sum += sample_beta(rng, a, b);
      const double mean = a / (a + b);
      const double sd = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1)));
      worst = std::max(worst, std::abs(sum / draws - mean) / (sd / std::sqrt(draws)));
    }
    out.push_back(detail::make_check("beta sampler mean", worst, 5.0,
                                     "max |mean - a/(a+b)| in standard errors"));
  }

  // n = 1: importance sampling against the incomplete beta function.
  {
    const ModelParams m{2.0, 1, 50.0, 200.0, 1.5};
    const double exact = oracle_tail_n1(m);
    const auto rep = run_is(m, detail::scaled(20000, vo.quick), vo.seed, ro);
    out.push_back(detail::make_check("n=1 importance sampling vs exact tail",
                                     std::abs(rep.estimate - exact) / rep.std_error,
                                     detail::kSigmas,
                                     "exact " + std::to_string(exact) + ", estimate " +
                                         std::to_string(rep.estimate) + " (standard errors)"));
  }

  // n = 2: both estimators against the quadrature oracle.
  {
    const ModelParams m{2.0, 2, 6.0, 9.0, 1.8};
    const double exact = oracle_tail_n2(m, 1e-10);
    const auto mc = run_direct_mc(m, detail::scaled(100000, vo.quick), vo.seed, ro);
    const auto is = run_is(m, detail::scaled(20000, vo.quick), vo.seed, ro);
    out.push_back(detail::make_check("n=2 direct Monte Carlo vs quadrature",
                                     std::abs(mc.estimate - exact) / mc.std_error, detail::kSigmas,
                                     "exact " + std::to_string(exact) + ", estimate " +
                                         std::to_string(mc.estimate) + " (standard errors)"));
    out.push_back(detail::make_check("n=2 importance sampling vs quadrature",
                                     std::abs(is.estimate - exact) / is.std_error, detail::kSigmas,
                                     "exact " + std::to_string(exact) + ", estimate " +
                                         std::to_string(is.estimate) + " (standard errors)"));
  }

  // Centered moments of the spectrum. The band is the size of the neglected
  // terms n^2/p + n/(beta p1) + n^2/p1^2 around the leading n^2/p1.
  {
    const ModelParams m{2.0, 8, 400.0, 2000.0, std::nullopt};
    const auto cm = validate_centered_moments(m, detail::scaled(10000, vo.quick), vo.seed,
                                              vo.workers);
    const double n = m.n;
    const double band = n * n / m.p() + n / (m.beta * m.p1) + n * n / (m.p1 * m.p1);
    out.push_back(detail::make_check(
        "centered second moment near n^2/p1", std::abs(cm.m2 - n * n / m.p1),
        band + detail::kSigmas * cm.se2,
        "mean " + std::to_string(cm.m2) + " vs " + std::to_string(n * n / m.p1)));
    out.push_back(detail::make_check("centered first moment near 0", std::abs(cm.m1),
                                     band + detail::kSigmas * cm.se1,
                                     "mean " + std::to_string(cm.m1)));
  }
  return out;
}

}  // namespace jtail
