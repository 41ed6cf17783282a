#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "homodyne/error.hpp"

namespace homodyne {

/// Counts over half-open bins [edges[i], edges[i+1]).  Samples below the first
/// edge go to `underflow`, samples at or above the last edge to `overflow`;
/// `n_total` counts only in-range samples.
struct MarginalHistogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::size_t n_total = 0;
  std::size_t underflow = 0;
  std::size_t overflow = 0;

  std::size_t bins() const { return counts.size(); }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  std::size_t all_samples() const { return n_total + underflow + overflow; }

  /// counts[i] / (all_samples * width(i)).
  double density(std::size_t i) const {
    return static_cast<double>(counts[i]) / (static_cast<double>(all_samples()) * width(i));
  }
};

/// `bins` equal bins spanning [lo, hi].
inline std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
  detail::require_domain(bins > 0 && hi > lo, "uniform_edges needs bins > 0 and hi > lo");
  std::vector<double> edges(bins + 1);
  const double w = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) edges[i] = lo + w * static_cast<double>(i);
  edges.back() = hi;
  return edges;
}

/// Bins of width `width` laid out symmetrically about zero, with one bin
/// centered on the origin, covering at least [-half_range, half_range].
inline std::vector<double> centered_edges(double width, double half_range) {
  detail::require_domain(width > 0.0 && half_range > 0.0, "centered_edges needs positive width and range");
  const auto half_bins = static_cast<std::size_t>(std::ceil(half_range / width - 0.5));
  const std::size_t bins = 2 * half_bins + 1;
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    edges[i] = width * (static_cast<double>(i) - static_cast<double>(half_bins) - 0.5);
  return edges;
}

inline MarginalHistogram bin_samples(std::span<const double> x, std::vector<double> edges) {
  if (x.empty()) throw DataError("cannot bin an empty sample set");
  detail::require_domain(edges.size() >= 2, "a histogram needs at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    detail::require_domain(edges[i] > edges[i - 1], "histogram edges must be strictly increasing");

  MarginalHistogram h;
  h.counts.assign(edges.size() - 1, 0);
  for (double v : x) {
    if (v < edges.front()) {
      ++h.underflow;
    } else if (v >= edges.back()) {
      ++h.overflow;
    } else {
      const auto it = std::upper_bound(edges.begin(), edges.end(), v);
      ++h.counts[static_cast<std::size_t>(it - edges.begin()) - 1];
      ++h.n_total;
    }
  }
  h.edges = std::move(edges);
  return h;
}

}  // namespace homodyne
