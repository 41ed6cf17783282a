#pragma once

// Kernel density estimate of the phase-averaged marginal from a histogram,
// symmetrized about X = 0 and tabulated on a uniform half-line grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homodyne/error.hpp"
#include "homodyne/histogram.hpp"
#include "homodyne/summation.hpp"

namespace homodyne {

/// Even function tabulated at x_i = i * spacing, i = 0 .. values.size()-1.
struct GridDensity {
  double spacing = 0.0;
  std::vector<double> values;
  double bandwidth = 0.0;  // kernel bandwidth that produced it; 0 for analytic input

  double grid_max() const { return spacing * static_cast<double>(values.size() - 1); }
  double x(std::size_t i) const { return spacing * static_cast<double>(i); }
};

/// Tabulates an even function f on [0, grid_max] with `points` nodes.
template <class F>
GridDensity tabulate(F&& f, double grid_max, std::size_t points) {
  detail::require_domain(points >= 2 && grid_max > 0.0, "grid needs >= 2 points and positive extent");
  GridDensity g;
  g.spacing = grid_max / static_cast<double>(points - 1);
  g.values.resize(points);
  for (std::size_t i = 0; i < points; ++i) g.values[i] = f(g.x(i));
  return g;
}

struct SmoothingOptions {
  double bandwidth_scale = 1.0;
  std::optional<double> bandwidth;  // overrides the rule of thumb when set
  double grid_max = 6.0;
  std::size_t grid_points = 2001;
  std::size_t min_samples = 1000;  // enforced only for the automatic bandwidth
};

/// Silverman's rule of thumb, 0.9 min(sd, IQR/1.349) n^(-1/5), from binned data.
inline double silverman_bandwidth(const MarginalHistogram& h) {
  if (h.n_total == 0) throw DataError("bandwidth of an empty histogram");
  const auto n = static_cast<double>(h.n_total);
  CompensatedSum s1;
  for (std::size_t i = 0; i < h.bins(); ++i) s1 += static_cast<double>(h.counts[i]) * h.center(i);
  const double mean = s1.value() / n;
  CompensatedSum s2;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double d = h.center(i) - mean;
    s2 += static_cast<double>(h.counts[i]) * d * d;
  }
  const double sd = std::sqrt(s2.value() / n);

  // Quantiles by linear interpolation inside the bin holding the target rank.
  auto quantile = [&](double q) {
    const double target = q * n;
    double cum = 0.0;
    for (std::size_t i = 0; i < h.bins(); ++i) {
      const auto c = static_cast<double>(h.counts[i]);
      if (c > 0.0 && cum + c >= target) return h.edges[i] + h.width(i) * (target - cum) / c;
      cum += c;
    }
    return h.edges.back();
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.349);
  if (!(spread > 0.0)) throw DataError("histogram has zero spread; bandwidth undefined");
  return 0.9 * spread * std::pow(n, -0.2);
}

/// Gaussian-kernel estimate (K(x) + K(-x)) / 2 with kernels at the bin centers,
/// normalized by the in-range count.  The per-bin term is symmetric in x, so
/// the result is exactly even.
inline double symmetric_kde(const MarginalHistogram& h, double bandwidth, double x) {
  constexpr double kCutoff = 10.0;  // kernels beyond 10 bandwidths contribute < e^-50
  const double inv_norm = 1.0 / (static_cast<double>(h.n_total) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  const double reach = kCutoff * bandwidth;
  const double ax = std::abs(x);

  // Bin index range whose edges overlap [lo, hi].
  auto bin_range = [&h](double lo, double hi) {
    const auto first = std::upper_bound(h.edges.begin(), h.edges.end(), lo) - h.edges.begin();
    const auto last = std::lower_bound(h.edges.begin(), h.edges.end(), hi) - h.edges.begin();
    return std::pair<std::size_t, std::size_t>{static_cast<std::size_t>(std::max<std::ptrdiff_t>(first - 1, 0)),
                                               static_cast<std::size_t>(std::min<std::ptrdiff_t>(last, static_cast<std::ptrdiff_t>(h.bins())))};
  };
  CompensatedSum sum;
  auto accumulate = [&](std::pair<std::size_t, std::size_t> range) {
    for (std::size_t i = range.first; i < range.second; ++i) {
      if (h.counts[i] == 0) continue;
      const double c = h.center(i);
      const double up = (ax - c) / bandwidth;
      const double down = (-ax - c) / bandwidth;
      sum += static_cast<double>(h.counts[i]) * 0.5 * (std::exp(-0.5 * up * up) + std::exp(-0.5 * down * down));
    }
  };
  const auto near_pos = bin_range(ax - reach, ax + reach);
  const auto near_neg = bin_range(-ax - reach, -ax + reach);
  if (near_neg.second >= near_pos.first) {
    accumulate({near_neg.first, std::max(near_neg.second, near_pos.second)});
  } else {
    accumulate(near_neg);
    accumulate(near_pos);
  }
  return sum.value() * inv_norm;
}

inline GridDensity smooth_marginal(const MarginalHistogram& h, const SmoothingOptions& options = {}) {
  double bandwidth = 0.0;
  if (options.bandwidth) {
    if (h.n_total == 0) throw DataError("cannot smooth an empty histogram");
    bandwidth = *options.bandwidth;
  } else {
    if (h.n_total < options.min_samples)
      throw DataError("smoothing needs at least " + std::to_string(options.min_samples) + " in-range samples");
    bandwidth = silverman_bandwidth(h);
  }
  bandwidth *= options.bandwidth_scale;
  detail::require_domain(bandwidth > 0.0 && std::isfinite(bandwidth), "bandwidth must be positive");
  GridDensity g = tabulate([&](double x) { return symmetric_kde(h, bandwidth, x); }, options.grid_max,
                           options.grid_points);
  g.bandwidth = bandwidth;
  return g;
}

}  // namespace homodyne
