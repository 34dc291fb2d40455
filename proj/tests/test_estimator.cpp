#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "jacobi_tail/estimator.hpp"
#include "jacobi_tail/lower_tail.hpp"
#include "jacobi_tail/oracle.hpp"
#include "support/stats.hpp"

using namespace jtail;

namespace {

void expect_same_report(const EstimateReport& a, const EstimateReport& b) {
  EXPECT_EQ(a.method, b.method);
  EXPECT_EQ(a.n_samples, b.n_samples);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.log_estimate, b.log_estimate);
  EXPECT_EQ(a.std_per_sample, b.std_per_sample);
  if (!std::isnan(a.cov_per_sample) || !std::isnan(b.cov_per_sample)) {
    EXPECT_EQ(a.cov_per_sample, b.cov_per_sample);
  }
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(a.log_second_moment, b.log_second_moment);
  EXPECT_EQ(a.hit_count, b.hit_count);
  EXPECT_EQ(a.clamp_count, b.clamp_count);
  EXPECT_EQ(a.seed, b.seed);
}

}  // namespace

// ---- oracles ---------------------------------------------------------------

TEST(OracleN1, SymmetricMedian) {
  const ModelParams m{2.0, 1, 7.0, 7.0, 1.0};  // threshold p1 x / p = 0.5
  EXPECT_NEAR(oracle_tail_n1(m), 0.5, 1e-14);
}

TEST(OracleN1, VanishesAtTheTop) {
  const ModelParams m{2.0, 1, 7.0, 7.0, std::nullopt};
  EXPECT_LT(oracle_tail_n1(m.with_x(1.9999)), 1e-20);
  EXPECT_EQ(oracle_tail_n1(m.with_x(2.0)), 0.0);
  EXPECT_THROW(oracle_tail_n1({2.0, 2, 7.0, 7.0, 1.5}), UsageError);
}

TEST(OracleN1, ContinuedFractionMatchesQuadrature) {
  for (const ModelParams m : {ModelParams{2.0, 1, 50.0, 200.0, 1.5},
                              ModelParams{1.0, 1, 10.0, 20.0, 1.2},
                              ModelParams{0.5, 1, 4.0, 3.0, 1.1},
                              ModelParams{10.0, 1, 30.0, 300.0, 2.5}}) {
    const double cf = oracle_tail_n1(m);
    const auto q = oracle_tail_n1_quadrature(m);
    EXPECT_NEAR(cf, q.value, 1e-8 * cf) << m.describe();
  }
}

TEST(OracleN2, FullSimplexHasUnitMass) {
  const double tol = 1e-10;
  for (const ModelParams m : {ModelParams{2.0, 2, 6.0, 9.0, 0.0}, ModelParams{1.0, 2, 3.0, 4.0, 0.0},
                              ModelParams{4.0, 2, 10.0, 25.0, 0.0}}) {
    EXPECT_NEAR(oracle_tail_n2(m, tol), 1.0, 10 * tol) << m.describe();
  }
}

TEST(OracleN2, VanishesAtTheTop) {
  const ModelParams m{2.0, 2, 6.0, 9.0, std::nullopt};
  EXPECT_LT(oracle_tail_n2(m.with_x(2.49)), 1e-8);
  EXPECT_EQ(oracle_tail_n2(m.with_x(2.5)), 0.0);
  EXPECT_GT(oracle_tail_n2(m.with_x(1.2)), oracle_tail_n2(m.with_x(1.4)));
}

// At n = 2 with beta = 2, P(lambda_max <= t) has a closed form via the
// Selberg-type integral; instead check against a coarse 2-D midpoint sum.
TEST(OracleN2, AgreesWithMidpointRule) {
  const ModelParams m{2.0, 2, 6.0, 9.0, 1.5};
  const double t = m.threshold();
  const int g = 1500;
  const double lc = std::log(2.0) + specfn::log_jacobi_normalizer(m);
  double s = 0.0;
  for (int i = 0; i < g; ++i) {
    const double x2 = t + (1 - t) * (i + 0.5) / g;
    for (int j = 0; j < g; ++j) {
      const double x1 = x2 * (j + 0.5) / g;
      const double lf = lc + m.beta * std::log(x2 - x1) + (m.r1n() - 1) * std::log(x1 * x2) +
                        (m.r2n() - 1) * std::log((1 - x1) * (1 - x2));
      s += std::exp(lf) * x2 / g * (1 - t) / g;
    }
  }
  EXPECT_NEAR(oracle_tail_n2(m), s, 1e-5);
}

// ---- proposal and weight ---------------------------------------------------

TEST(Proposal, BaseCase) {
  const ModelParams m{2.0, 1, 50.0, 200.0, 1.5};
  RngStream rng = derive_stream(1, 1);
  for (int i = 0; i < 1000; ++i) {
    const auto d = sample_proposal(m, rng);
    EXPECT_TRUE(d.lower_eigs.empty());
    EXPECT_EQ(d.shift_a, m.threshold());
    EXPECT_GT(d.top, m.threshold());
    EXPECT_LT(d.top, 1.0);
  }
}

TEST(Proposal, TopAlwaysAboveThresholdAndLowerPoints) {
  const ModelParams m{2.0, 6, 20.0, 40.0, 1.3};
  for (std::uint64_t k = 1; k <= 1000000; ++k) {
    RngStream rng = derive_stream(2, k);
    const auto d = sample_proposal(m, rng);
    ASSERT_EQ(d.lower_eigs.size(), 5u);
    ASSERT_GT(d.top, m.threshold());
    ASSERT_GT(d.top, d.shift_a);
    ASSERT_GE(d.shift_a, m.threshold());
    ASSERT_GE(d.shift_a, d.lower_eigs.back());
    ASSERT_LT(d.top, 1.0);
    for (std::size_t i = 1; i < d.lower_eigs.size(); ++i)
      ASSERT_LT(d.lower_eigs[i - 1], d.lower_eigs[i]);
    const double lw = log_is_weight(d, m);
    ASSERT_TRUE(std::isfinite(lw));
  }
}

// Conditional law of the top point: resimulate with the lower points frozen.
TEST(Proposal, TopFollowsTruncatedExponentialGivenLowerPoints) {
  const ModelParams m{2.0, 4, 12.0, 20.0, 1.2};
  RngStream rng = derive_stream(3, 1);
  const auto base = sample_proposal(m, rng);
  const TruncExpParams tp{m.rate(), base.shift_a};
  const std::size_t n = 10000;
  std::vector<double> tops(n);
  RngStream rng2 = derive_stream(3, 2);
  for (auto& y : tops) y = sample_trunc_exp(rng2, tp);
  const auto cdf = [&](double y) {
    return std::expm1(-tp.rate * (y - tp.lower)) / std::expm1(-tp.rate * (1 - tp.lower));
  };
  EXPECT_TRUE(jtail_test::ks_one_sample_passes(jtail_test::ks_one_sample(tops, cdf), n));
  EXPECT_DOUBLE_EQ(base.shift_a, std::max(m.threshold(), base.lower_eigs.back()));
}

TEST(LogIsWeight, NEqualsOneByHand) {
  const ModelParams m{2.0, 1, 50.0, 200.0, 1.5};
  const ProposalDraw d{{}, m.threshold(), 0.4};
  const double expected = -specfn::log_beta(m.beta * m.p1 / 2, m.beta * m.p2 / 2) +
                          specfn::log_u_n(0.4, m) - log_h_density(0.4, {m.rate(), m.threshold()});
  EXPECT_NEAR(log_is_weight(d, m), expected, 1e-10 * std::abs(expected));
}

TEST(LogIsWeight, LowerPointsEnterThroughVandermonde) {
  const ModelParams m{3.0, 3, 10.0, 15.0, 1.2};
  const ProposalDraw d{{0.1, 0.5}, 0.5, 0.7};
  const double expected = std::log(3.0) + specfn::log_norm_A(m) +
                          3.0 * (std::log(0.6) + std::log(0.2)) + specfn::log_u_n(0.7, m) -
                          log_h_density(0.7, {m.rate(), 0.5});
  EXPECT_NEAR(log_is_weight(d, m), expected, 1e-12 * std::abs(expected));
  const ProposalDraw below{{0.1, 0.3}, m.threshold(), m.threshold() * 0.99};
  EXPECT_EQ(log_is_weight(below, m), -std::numeric_limits<double>::infinity());
}

// ---- estimators ------------------------------------------------------------

TEST(RunIs, UnbiasedAtNEqualsOne) {
  for (const ModelParams m :
       {ModelParams{2.0, 1, 50.0, 200.0, 1.5}, ModelParams{0.5, 1, 20.0, 60.0, 1.6},
        ModelParams{1.0, 1, 100.0, 1000.0, 2.0}, ModelParams{10.0, 1, 40.0, 80.0, 1.4},
        ModelParams{1.0, 1, 5.0, 5.0, 1.5}}) {
    const auto rep = run_is(m, 100000, 123);
    const double exact = oracle_tail_n1(m);
    EXPECT_LE(std::abs(rep.estimate - exact), 3.5 * rep.std_error)
        << m.describe() << " exact=" << exact << " est=" << rep.estimate;
  }
}

TEST(RunIs, ReportInvariants) {
  const ModelParams m{1.0, 5, 50.0, 500.0, 1.5};
  const auto rep = run_is(m, 5000, 9);
  EXPECT_EQ(rep.method, Method::kImportanceSampling);
  EXPECT_EQ(rep.n_samples, 5000);
  EXPECT_EQ(rep.seed, 9u);
  EXPECT_EQ(rep.hit_count, -1);
  EXPECT_DOUBLE_EQ(rep.estimate, std::exp(rep.log_estimate));
  EXPECT_NEAR(rep.cov_per_sample * rep.estimate, rep.std_per_sample, 1e-12 * rep.std_per_sample);
  EXPECT_NEAR(rep.std_error, rep.std_per_sample / std::sqrt(5000.0), 1e-14 * rep.std_error);
  // second moment >= squared estimate (non-negative variance)
  EXPECT_GE(rep.log_second_moment, 2 * rep.log_estimate - 1e-12);
  EXPECT_THROW(run_is(m, 1, 9), UsageError);
}

TEST(RunIs, DeterministicAcrossWorkerCounts) {
  const ModelParams m{1.0, 10, 1e3, 1e9, 1.4};
  const auto one = run_is(m, 3000, 2024, {.workers = 1});
  for (int w : {2, 4, 8}) expect_same_report(one, run_is(m, 3000, 2024, {.workers = w}));
}

TEST(RunIs, LogShiftScalesEstimateExactly) {
  const ModelParams m{1.0, 10, 1e3, 1e9, 1.6};
  const auto base = run_is(m, 2000, 5);
  for (double c : {-700.0, 3.25, 900.0}) {
    RunOptions opt;
    opt.log_weight_shift = c;
    const auto shifted = run_is(m, 2000, 5, opt);
    EXPECT_NEAR(shifted.log_estimate - base.log_estimate, c, 1e-12 * std::abs(c) + 1e-12);
    EXPECT_NEAR(shifted.cov_per_sample, base.cov_per_sample, 1e-12 * base.cov_per_sample);
  }
}

TEST(RunIs, NoIndicatorLossAtStudyScale) {
  const ModelParams m{1.0, 10, 1e3, 1e9, 2.0};
  const auto rep = run_is(m, 2000, 6);
  EXPECT_TRUE(std::isfinite(rep.log_estimate));
  EXPECT_LT(rep.log_estimate, -100);
  EXPECT_EQ(rep.estimate, std::exp(rep.log_estimate));
}

TEST(RunDirectMc, ZeroHitsAboveSupport) {
  const ModelParams m{2.0, 3, 6.0, 9.0, 2.6};  // p1 x / p > 1
  const auto rep = run_direct_mc(m, 1000, 1);
  EXPECT_EQ(rep.hit_count, 0);
  EXPECT_TRUE(rep.zero_hits);
  EXPECT_EQ(rep.estimate, 0.0);
  EXPECT_EQ(rep.log_estimate, -std::numeric_limits<double>::infinity());
  EXPECT_TRUE(std::isnan(rep.cov_per_sample));
}

TEST(RunDirectMc, BinomialStatistics) {
  const ModelParams m{2.0, 2, 6.0, 9.0, 1.4};
  const auto rep = run_direct_mc(m, 20000, 3);
  const double ph = static_cast<double>(rep.hit_count) / 20000;
  EXPECT_DOUBLE_EQ(rep.estimate, ph);
  EXPECT_NEAR(rep.std_per_sample, std::sqrt(ph * (1 - ph) * 20000.0 / 19999.0), 1e-15);
  EXPECT_THROW(run_direct_mc(m, 0, 3), UsageError);
}

TEST(RunDirectMc, DeterministicAcrossWorkerCounts) {
  const ModelParams m{2.0, 5, 12.0, 20.0, 1.3};
  const auto one = run_direct_mc(m, 5000, 31, {.workers = 1});
  for (int w : {3, 8}) expect_same_report(one, run_direct_mc(m, 5000, 31, {.workers = w}));
}

TEST(Estimators, AgreeWithOracleAtNEqualsTwo) {
  const ModelParams m{2.0, 2, 6.0, 9.0, 1.6};
  const double exact = oracle_tail_n2(m);
  const auto mc = run_direct_mc(m, 200000, 8);
  const auto is = run_is(m, 50000, 8);
  EXPECT_LE(std::abs(mc.estimate - exact), 3.5 * mc.std_error) << exact << " " << mc.estimate;
  EXPECT_LE(std::abs(is.estimate - exact), 3.5 * is.std_error) << exact << " " << is.estimate;
}

// A setting with P around 1e-2 where both estimators are informative.
TEST(Estimators, CrossConsistencyModeratelyRare) {
  const ModelParams m{1.0, 4, 20.0, 40.0, 2.0};
  const auto mc = run_direct_mc(m, 100000, 17);
  ASSERT_GT(mc.estimate, 1e-3);
  ASSERT_LT(mc.estimate, 1e-1);
  const auto is = run_is(m, 50000, 18);
  EXPECT_LE(std::abs(is.estimate - mc.estimate),
            3.5 * std::hypot(is.std_error, mc.std_error))
      << is.estimate << " vs " << mc.estimate;
}

TEST(CenteredMomentsOp, WorkersDoNotChangeResult) {
  const ModelParams m{2.0, 4, 30.0, 60.0, std::nullopt};
  const auto a = validate_centered_moments(m, 2000, 4, 1);
  const auto b = validate_centered_moments(m, 2000, 4, 4);
  EXPECT_EQ(a.m1, b.m1);
  EXPECT_EQ(a.m2, b.m2);
}

// ---- lower tail ------------------------------------------------------------

TEST(LowerTail, SwapIsAnInvolution) {
  const ModelParams mu{2.0, 3, 9.0, 14.0, 1.3};
  const ModelParams twice = swap_ensemble(swap_ensemble(mu)).with_x(1.3);
  const auto a = run_is(mu, 2000, 3);
  const auto b = run_is(twice, 2000, 3);
  expect_same_report(a, b);
}

TEST(LowerTail, NEqualsOneBetaReflection) {
  const ModelParams mu{2.0, 1, 30.0, 20.0, std::nullopt};
  const double t = 0.45;
  // P(mu < t) = I_t(beta q1/2, beta q2/2)
  const double exact = specfn::reg_inc_beta(mu.beta * mu.p1 / 2, mu.beta * mu.p2 / 2, t);
  LowerTailRequest req;
  req.method = Method::kOracle;
  EXPECT_NEAR(smallest_eigenvalue_lower_tail(mu, t, req).estimate, exact, 1e-12);
  req.method = Method::kImportanceSampling;
  req.num_samples = 100000;
  req.seed = 4;
  const auto rep = smallest_eigenvalue_lower_tail(mu, t, req);
  EXPECT_LE(std::abs(rep.estimate - exact), 3.5 * rep.std_error);
}

TEST(LowerTail, NEqualsTwoMatchesSwappedQuadrature) {
  const ModelParams mu{2.0, 2, 9.0, 6.0, std::nullopt};
  const double t = 0.35;
  LowerTailRequest req;
  req.method = Method::kOracle;
  const double exact = smallest_eigenvalue_lower_tail(mu, t, req).estimate;
  // Independent: integrate the mu density over {x1 < t} directly.
  const detail::LogDensityN2 logf(mu);
  const auto outer = detail::gk_integrate(
      [&](double x1) {
        if (!(x1 > 0 && x1 < 1)) return 0.0;
        return detail::gk_integrate(
                   [&](double x2) {
                     if (!(x2 > x1 && x2 < 1)) return 0.0;
                     return std::exp(logf(x1, x2));
                   },
                   x1, 1.0, 1e-12)
            .value;
      },
      0.0, t, 1e-11);
  EXPECT_NEAR(exact, outer.value, 1e-8);
  req.method = Method::kDirectMC;
  req.num_samples = 100000;
  const auto mc = smallest_eigenvalue_lower_tail(mu, t, req);
  EXPECT_LE(std::abs(mc.estimate - exact), 3.5 * mc.std_error);
}

TEST(LowerTail, ThresholdOutsideUnitIntervalRejected) {
  const ModelParams mu{2.0, 2, 9.0, 6.0, std::nullopt};
  EXPECT_THROW(upper_tail_equivalent(mu, 0.0), UsageError);
  EXPECT_THROW(upper_tail_equivalent(mu, 1.0), UsageError);
}
