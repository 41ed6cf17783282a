#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "homodyne/error.hpp"
#include "homodyne/pattern.hpp"
#include "homodyne/summation.hpp"

namespace homodyne {

struct DiagonalEstimate {
  int n = 0;
  double rho_nn = 0.0;
  /// Standard error of the mean of pi f_nn(x_k); the primary error bar.
  double sigma_nn = 0.0;
  /// sqrt((1/N) <(pi f_nn)^2>), the uncentered form.  Overstates the error
  /// whenever rho_nn != 0.
  double sigma_nn_uncentered = 0.0;
  std::size_t n_samples = 0;
};

/// rho_nn = (pi/N) sum_k f_nn(x_k) for n = 0..n_max over calibrated quadratures.
inline std::vector<DiagonalEstimate> sample_diagonals(std::span<const double> x, int n_max = 1) {
  if (x.empty()) throw DataError("cannot sample density-matrix diagonals from an empty data set");
  detail::require_domain(n_max >= 0 && n_max <= kMaxPatternOrder, "n_max must lie in 0..3");
  const auto count = static_cast<double>(x.size());

  std::vector<DiagonalEstimate> out;
  std::vector<double> values(x.size());
  for (int n = 0; n <= n_max; ++n) {
    CompensatedSum sum;
    CompensatedSum sum_sq;
    for (std::size_t k = 0; k < x.size(); ++k) {
      values[k] = std::numbers::pi * pattern_function(n, x[k]);
      sum += values[k];
      sum_sq += values[k] * values[k];
    }
    DiagonalEstimate e;
    e.n = n;
    e.n_samples = x.size();
    e.rho_nn = sum.value() / count;
    e.sigma_nn_uncentered = std::sqrt(sum_sq.value() / count / count);
    if (x.size() > 1) {
      CompensatedSum centered;
      for (double v : values) centered += (v - e.rho_nn) * (v - e.rho_nn);
      e.sigma_nn = std::sqrt(centered.value() / (count - 1.0) / count);
    }
    if (!(e.sigma_nn > 0.0)) e.sigma_nn = e.sigma_nn_uncentered;
    out.push_back(e);
  }
  return out;
}

}  // namespace homodyne
