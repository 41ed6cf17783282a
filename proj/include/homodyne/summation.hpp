#pragma once

#include <cmath>

namespace homodyne {

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double value) noexcept {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) compensation_ += (sum_ - t) + value;
    else compensation_ += (value - t) + sum_;
    sum_ = t;
  }

  CompensatedSum& operator+=(double value) noexcept {
    add(value);
    return *this;
  }

  /// Infinite partial sums are returned as is; the compensation term is NaN then.
  double value() const noexcept { return std::isfinite(sum_) ? sum_ + compensation_ : sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace homodyne
