#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "errors.hpp"

namespace jtail {

/// splitmix64 finalizer; a full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// A deterministic random stream. All samplers below draw only through
/// next_u64, so a stream's output depends on (seed, stream_id) alone.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : engine_(seed), seed_(seed), stream_id_(stream_id) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  /// Standard normal, Marsaglia polar method (no cached second variate, so
  /// the stream state is the engine state only).
  double normal() {
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
  }

  /// Exp(1).
  double exponential() { return -std::log(uniform_open()); }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

/// Stream `index` of the family rooted at `master_seed`. Replication k of an
/// experiment always uses index k, independent of how work is scheduled.
inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t index) {
  const std::uint64_t s = mix64(mix64(master_seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
  return RngStream(s, index);
}

/// Gamma(shape, 1). Marsaglia-Tsang squeeze for shape >= 1, the
/// Gamma(shape+1) * U^(1/shape) boost below 1.
inline double sample_gamma(RngStream& rng, double shape) {
  if (!(std::isfinite(shape) && shape > 0))
    throw DomainError("sample_gamma: shape must be positive and finite, got " +
                      std::to_string(shape));
  if (shape < 1.0) {
    const double g = sample_gamma(rng, shape + 1.0);
    // log-space to keep U^(1/shape) from underflowing for tiny shapes
    const double out = std::exp(std::log(g) + std::log(rng.uniform_open()) / shape);
    return out > 0 ? out : std::numeric_limits<double>::min();
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = rng.normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    const double z2 = z * z;
    if (u < 1.0 - 0.0331 * z2 * z2) return d * v;
    if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

/// Beta(a, b) as G_a / (G_a + G_b), re-drawn until strictly inside (0, 1).
inline double sample_beta(RngStream& rng, double a, double b) {
  if (!(std::isfinite(a) && a > 0 && std::isfinite(b) && b > 0))
    throw DomainError("sample_beta: parameters must be positive and finite");
  for (;;) {
    const double ga = sample_gamma(rng, a);
    const double gb = sample_gamma(rng, b);
    const double x = ga / (ga + gb);
    if (x > 0.0 && x < 1.0) return x;
  }
}

/// Truncated shifted exponential on (lower, 1) with the given rate.
struct TruncExpParams {
  double rate;
  double lower;
  double upper = 1.0;
};

inline void validate(const TruncExpParams& tp) {
  if (!(std::isfinite(tp.rate) && tp.rate > 0))
    throw DomainError("TruncExpParams: rate must be positive and finite");
  if (!(tp.lower >= 0 && tp.lower < tp.upper && tp.upper == 1.0))
    throw DomainError("TruncExpParams: need 0 <= lower < upper = 1");
}

enum class TruncExpMethod {
  kRejection,  // shifted exponential, retried until below the upper bound
  kInverseCdf,
};

inline constexpr long kTruncExpRetryCap = 1'000'000;

/// ln of the normalizer 1 - exp(-rate (upper - lower)).
inline double log_trunc_exp_mass(const TruncExpParams& tp) {
  return std::log(-std::expm1(-tp.rate * (tp.upper - tp.lower)));
}

inline double sample_trunc_exp(RngStream& rng, const TruncExpParams& tp,
                               TruncExpMethod method = TruncExpMethod::kInverseCdf) {
  validate(tp);
  if (method == TruncExpMethod::kRejection) {
    for (long i = 0; i < kTruncExpRetryCap; ++i) {
      const double y = tp.lower + rng.exponential() / tp.rate;
      if (y < tp.upper && y > tp.lower) return y;
    }
    throw NumericalError("sample_trunc_exp: rejection retry cap reached (rate=" +
                         std::to_string(tp.rate) + ", lower=" + std::to_string(tp.lower) + ")");
  }
  const double span = tp.upper - tp.lower;
  const double em = std::expm1(-tp.rate * span);  // in (-1, 0)
  for (long i = 0; i < kTruncExpRetryCap; ++i) {
    const double u = rng.uniform_open();
    // F^{-1}(u) = lower - log1p(u * expm1(-rate span)) / rate
    const double y = tp.lower - std::log1p(u * em) / tp.rate;
    if (y > tp.lower && y < tp.upper) return y;
  }
  throw NumericalError("sample_trunc_exp: inverse-CDF produced no interior draw");
}

/// ln h(y) for the truncated exponential; -inf outside (lower, upper).
inline double log_h_density(double y, const TruncExpParams& tp) {
  validate(tp);
  if (!(y > tp.lower && y < tp.upper)) return -std::numeric_limits<double>::infinity();
  return std::log(tp.rate) - tp.rate * (y - tp.lower) - log_trunc_exp_mass(tp);
}

}  // namespace jtail
