#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "jacobi_tail/sampling.hpp"
#include "support/stats.hpp"

using namespace jtail;
using jtail_test::ks_one_sample;
using jtail_test::ks_one_sample_passes;
using jtail_test::ks_two_sample;
using jtail_test::ks_two_sample_passes;
using jtail_test::mean_var;

namespace {

std::vector<double> uniforms(RngStream rng, std::size_t n) {
  std::vector<double> out(n);
  for (auto& u : out) u = rng.uniform();
  return out;
}

}  // namespace

TEST(RngStream, SameSeedSameSequence) {
  EXPECT_EQ(uniforms(derive_stream(42, 7), 1000), uniforms(derive_stream(42, 7), 1000));
  RngStream a(5, 0), b(5, 0);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, SeedAndIndexSensitivity) {
  EXPECT_NE(uniforms(derive_stream(42, 7), 10), uniforms(derive_stream(43, 7), 10));
  EXPECT_NE(uniforms(derive_stream(42, 7), 10), uniforms(derive_stream(42, 8), 10));
  EXPECT_EQ(derive_stream(42, 7).stream_id(), 7u);
}

TEST(RngStream, NeighbouringStreamsLookIndependent) {
  const std::size_t n = 10000;
  const auto a = uniforms(derive_stream(2024, 0), n);
  const auto b = uniforms(derive_stream(2024, 1), n);
  EXPECT_TRUE(ks_two_sample_passes(ks_two_sample(a, b), n, n));
  EXPECT_TRUE(ks_one_sample_passes(ks_one_sample(a, [](double x) { return x; }), n));
}

TEST(RngStream, PairwiseCorrelationSmall) {
  const std::size_t n = 20000;
  std::vector<std::vector<double>> streams;
  for (std::uint64_t i = 0; i < 8; ++i) streams.push_back(uniforms(derive_stream(99, i), n));
  for (std::size_t i = 0; i < streams.size(); ++i) {
    for (std::size_t j = i + 1; j < streams.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += (streams[i][k] - 0.5) * (streams[j][k] - 0.5);
      const double corr = s / n * 12.0;
      EXPECT_LT(std::abs(corr), 4.5 / std::sqrt(static_cast<double>(n))) << i << "," << j;
    }
  }
}

TEST(RngStream, NormalMoments) {
  RngStream rng = derive_stream(3, 3);
  std::vector<double> v(100000);
  for (auto& x : v) x = rng.normal();
  const auto mv = mean_var(v);
  EXPECT_LT(std::abs(mv.mean), 4 / std::sqrt(1e5));
  EXPECT_LT(std::abs(mv.var - 1), 4 * std::sqrt(2 / 1e5));
}

TEST(SampleGamma, ExponentialMean) {
  RngStream rng = derive_stream(1, 1);
  double s = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) s += sample_gamma(rng, 1.0);
  EXPECT_NEAR(s / n, 1.0, 4 / std::sqrt(1e5));
}

TEST(SampleGamma, HugeShape) {
  const double shape = 5e8;
  const int n = 1000;
  RngStream rng = derive_stream(1, 2);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += sample_gamma(rng, shape) / shape;
  EXPECT_NEAR(s / n, 1.0, 4 / std::sqrt(shape) / std::sqrt(static_cast<double>(n)));
}

TEST(SampleGamma, SmallShape) {
  const double shape = 0.3;
  const int n = 100000;
  RngStream rng = derive_stream(1, 3);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = sample_gamma(rng, shape);
    ASSERT_GT(g, 0.0);
    s += g;
  }
  EXPECT_NEAR(s / n, shape, 4 * std::sqrt(shape / n));
}

TEST(SampleGamma, RejectsBadShape) {
  RngStream rng(1, 1);
  EXPECT_THROW(sample_gamma(rng, 0.0), DomainError);
  EXPECT_THROW(sample_gamma(rng, -2.0), DomainError);
  EXPECT_THROW(sample_gamma(rng, std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(SampleBeta, UniformCase) {
  const int n = 100000;
  RngStream rng = derive_stream(8, 1);
  int below = 0;
  for (int i = 0; i < n; ++i) below += sample_beta(rng, 1, 1) < 0.5;
  EXPECT_NEAR(static_cast<double>(below) / n, 0.5, 4 * 0.5 / std::sqrt(static_cast<double>(n)));
}

TEST(SampleBeta, MeanAndVariance37) {
  const int n = 100000;
  RngStream rng = derive_stream(8, 2);
  std::vector<double> v(n);
  for (auto& x : v) x = sample_beta(rng, 3, 7);
  const auto mv = mean_var(v);
  const double var = 21.0 / 1100.0;
  EXPECT_NEAR(mv.mean, 0.3, 4 * std::sqrt(var / n));
  EXPECT_NEAR(mv.var, var, 5 * std::sqrt((mv.m4 - mv.var * mv.var) / n));
}

// Twenty (a, b) pairs spread log-uniformly over [0.5, 1e10].
TEST(SampleBeta, MomentsAcrossTenDecades) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> expo(std::log10(0.5), 10.0);
  const int n = 10000;
  for (int pair = 0; pair < 20; ++pair) {
    const double a = std::pow(10.0, expo(gen));
    const double b = std::pow(10.0, expo(gen));
    RngStream rng = derive_stream(500, static_cast<std::uint64_t>(pair));
    std::vector<double> v(n);
    for (auto& x : v) {
      x = sample_beta(rng, a, b);
      ASSERT_GT(x, 0.0);
      ASSERT_LT(x, 1.0);
    }
    const auto mv = mean_var(v);
    const double mean = a / (a + b);
    const double var = a * b / ((a + b) * (a + b) * (a + b + 1));
    EXPECT_NEAR(mv.mean, mean, 5 * std::sqrt(var / n)) << "a=" << a << " b=" << b;
    EXPECT_NEAR(mv.var, var, 5 * std::sqrt((mv.m4 - mv.var * mv.var) / n))
        << "a=" << a << " b=" << b;
  }
}

TEST(TruncExp, SupportAndErrors) {
  RngStream rng = derive_stream(4, 4);
  for (auto method : {TruncExpMethod::kRejection, TruncExpMethod::kInverseCdf}) {
    for (int i = 0; i < 20000; ++i) {
      const double y = sample_trunc_exp(rng, {2.0, 0.5}, method);
      ASSERT_GT(y, 0.5);
      ASSERT_LT(y, 1.0);
    }
  }
  EXPECT_THROW(sample_trunc_exp(rng, {0.0, 0.5}), DomainError);
  EXPECT_THROW(sample_trunc_exp(rng, {1.0, 1.0}), DomainError);
  EXPECT_THROW(sample_trunc_exp(rng, {1.0, -0.1}), DomainError);
}

TEST(TruncExp, FlatLimitIsUniform) {
  const std::size_t n = 100000;
  RngStream rng = derive_stream(4, 5);
  std::vector<double> v(n);
  for (auto& y : v) y = sample_trunc_exp(rng, {1e-12, 0.25});
  EXPECT_TRUE(ks_one_sample_passes(ks_one_sample(v, [](double y) { return (y - 0.25) / 0.75; }), n));
}

TEST(TruncExp, MatchesItsCdf) {
  const std::size_t n = 100000;
  const TruncExpParams tp{7.5, 0.3};
  RngStream rng = derive_stream(4, 6);
  std::vector<double> v(n);
  for (auto& y : v) y = sample_trunc_exp(rng, tp);
  const auto cdf = [&](double y) {
    return std::expm1(-tp.rate * (y - tp.lower)) / std::expm1(-tp.rate * (1 - tp.lower));
  };
  EXPECT_TRUE(ks_one_sample_passes(ks_one_sample(v, cdf), n));
}

TEST(TruncExp, RejectionAndInverseCdfAgree) {
  const std::size_t n = 100000;
  for (const TruncExpParams tp : {TruncExpParams{2.0, 0.5}, TruncExpParams{40.0, 0.1},
                                  TruncExpParams{0.3, 0.9}}) {
    RngStream r1 = derive_stream(77, 1), r2 = derive_stream(77, 2);
    std::vector<double> a(n), b(n);
    for (auto& y : a) y = sample_trunc_exp(r1, tp, TruncExpMethod::kRejection);
    for (auto& y : b) y = sample_trunc_exp(r2, tp, TruncExpMethod::kInverseCdf);
    EXPECT_TRUE(ks_two_sample_passes(ks_two_sample(a, b), n, n)) << tp.rate << " " << tp.lower;
  }
}

TEST(LogHDensity, ValueByHand) {
  const TruncExpParams tp{2.0, 0.5};
  const double expected = std::log(2 * std::exp(-0.5) / (1 - std::exp(-1.0)));
  EXPECT_NEAR(log_h_density(0.75, tp), expected, 1e-14);
  EXPECT_NEAR(std::exp(log_h_density(0.75, tp)), 1.9190348, 1e-6);
  EXPECT_EQ(log_h_density(0.49, tp), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(log_h_density(1.0, tp), -std::numeric_limits<double>::infinity());
}

TEST(LogHDensity, IntegratesToOne) {
  for (double rate : {1e-8, 1.0, 2.0, 1e4}) {
    for (double lower : {0.0, 0.5, 0.999}) {
      const TruncExpParams tp{rate, lower};
      double err = 0.0;
      const double q = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double y) { return std::exp(log_h_density(y, tp)); }, lower, 1.0, 20, 1e-13, &err);
      EXPECT_NEAR(q, 1.0, 1e-8) << "rate=" << rate << " lower=" << lower;
    }
  }
}
