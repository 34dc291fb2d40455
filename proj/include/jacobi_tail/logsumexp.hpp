#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace jtail {

/// Streaming log(sum exp(v_i)). Rescales the running sum whenever a new
/// maximum arrives, so no term is exponentiated above exp(0).
class LogSumExp {
 public:
  void add(double v) {
    if (v == -kInf) return;
    if (v <= max_) {
      sum_ += std::exp(v - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    }
  }

  [[nodiscard]] double value() const {
    if (max_ == -kInf) return -kInf;
    return max_ + std::log(sum_);
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  double max_ = -kInf;
  double sum_ = 0.0;
};

inline double log_sum_exp(std::span<const double> values) {
  LogSumExp acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

}  // namespace jtail
