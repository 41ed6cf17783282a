#pragma once

// End-to-end reconstruction of one dataset: calibrate on the vacuum run,
// rescale the Fock run, fit eta, smooth and Abel-invert the marginal, and
// sample the density-matrix diagonals.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "homodyne/abel.hpp"
#include "homodyne/budget.hpp"
#include "homodyne/calibration.hpp"
#include "homodyne/dataset.hpp"
#include "homodyne/efficiency_fit.hpp"
#include "homodyne/histogram.hpp"
#include "homodyne/rng.hpp"
#include "homodyne/sampling.hpp"
#include "homodyne/smoothing.hpp"
#include "homodyne/summation.hpp"

namespace homodyne {

inline constexpr std::string_view kLibraryVersion = "1.0.0";

struct ReconstructionOptions {
  CalibrationOptions calibration{};
  EfficiencyFitOptions fit{};
  double bandwidth_scale = 1.0;
  double grid_max = 6.0;
  std::size_t grid_points = 2001;
  double bin_width = 0.005;  // histogram feeding the smoother
  std::size_t radial_points = 301;
  int n_max = 3;
  std::size_t bootstrap_replicates = 50;
  std::uint64_t bootstrap_seed = 0x5eed;
  std::vector<double> sensitivity_scales{0.5, 1.0, 2.0};
};

struct WignerOrigin {
  double value = 0.0;         // reconstructed W(0) from the Abel inversion
  double stderr_value = 0.0;  // bootstrap standard error
  double from_rho11 = 0.0;    // (2/pi)(1 - 2 rho_11)
  double from_rho11_stderr = 0.0;
  double from_eta_fit = 0.0;  // (2/pi)(1 - 2 eta_hat)
  /// |value - from_eta_fit| within two combined standard errors.
  bool consistent = false;
};

struct BandwidthSensitivity {
  double scale = 1.0;
  double bandwidth = 0.0;
  double wigner_origin = 0.0;
};

struct Provenance {
  std::string version{kLibraryVersion};
  std::vector<std::pair<std::string, std::string>> dataset_header;
  std::string options;  // canonical key=value rendering of ReconstructionOptions
  std::string config_hash;
};

struct RunReport {
  Source analysis_source = Source::fock_run;
  CalibrationResult calibration;
  EfficiencyFit efficiency_fit;
  std::vector<DiagonalEstimate> diagonals;         // analysis stream
  std::vector<DiagonalEstimate> vacuum_diagonals;  // vacuum run through its own calibration
  WignerOrigin wigner_origin;
  double bandwidth = 0.0;
  std::vector<BandwidthSensitivity> bandwidth_sensitivity;
  std::optional<BudgetResult> budget;
  std::optional<AgreementCheck> agreement;
  Provenance provenance;
};

struct Reconstruction {
  RunReport report;
  MarginalHistogram histogram;  // calibrated analysis stream
  GridDensity density;          // smoothed marginal
  RadialWignerProfile profile;
};

/// FNV-1a, rendered as 16 hex digits.
inline std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

inline std::string canonical_options(const ReconstructionOptions& o) {
  std::string s;
  auto kv = [&s](const std::string& k, const std::string& v) { s += k + "=" + v + "\n"; };
  kv("calibration_method", to_string(o.calibration.method));
  kv("calibration_min_samples", std::to_string(o.calibration.min_samples));
  kv("fit_method", to_string(o.fit.method));
  kv("fit_min_samples", std::to_string(o.fit.min_samples));
  kv("bandwidth_scale", format_double(o.bandwidth_scale));
  kv("grid_max", format_double(o.grid_max));
  kv("grid_points", std::to_string(o.grid_points));
  kv("bin_width", format_double(o.bin_width));
  kv("radial_points", std::to_string(o.radial_points));
  kv("n_max", std::to_string(o.n_max));
  kv("bootstrap_replicates", std::to_string(o.bootstrap_replicates));
  kv("bootstrap_seed", std::to_string(o.bootstrap_seed));
  return s;
}

namespace detail {

inline double wigner_origin_of(const GridDensity& density) {
  const double origin = 0.0;
  return abel_inverse(density, std::span<const double>(&origin, 1)).values.front();
}

// Poisson bootstrap of the histogram: each bin count is redrawn as Poisson(count).
inline MarginalHistogram poisson_resample(const MarginalHistogram& h, RandomStream& stream) {
  MarginalHistogram r = h;
  r.n_total = 0;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    if (h.counts[i] == 0) continue;
    std::poisson_distribution<long long> draw(static_cast<double>(h.counts[i]));
    r.counts[i] = static_cast<std::size_t>(draw(stream));
    r.n_total += r.counts[i];
  }
  return r;
}

}  // namespace detail

/// Bootstrap standard errors of the profile at each radius, with the
/// smoothing bandwidth held fixed.
inline std::vector<double> bootstrap_profile_stderr(const MarginalHistogram& h, const GridDensity& density,
                                                    std::span<const double> radii, std::size_t replicates,
                                                    std::uint64_t seed) {
  std::vector<double> out(radii.size(), 0.0);
  if (replicates < 2) return out;
  std::vector<CompensatedSum> sum(radii.size()), sum_sq(radii.size());
  SmoothingOptions smoothing;
  smoothing.bandwidth = density.bandwidth;
  smoothing.grid_max = density.grid_max();
  smoothing.grid_points = density.values.size();
  for (std::size_t b = 0; b < replicates; ++b) {
    RandomStream stream(seed, b);
    const MarginalHistogram resampled = detail::poisson_resample(h, stream);
    const RadialWignerProfile p = abel_inverse(smooth_marginal(resampled, smoothing), radii);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      sum[i] += p.values[i];
      sum_sq[i] += p.values[i] * p.values[i];
    }
  }
  const auto n = static_cast<double>(replicates);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double mean = sum[i].value() / n;
    out[i] = std::sqrt(std::max(0.0, (sum_sq[i].value() - n * mean * mean) / (n - 1.0)));
  }
  return out;
}

inline Reconstruction reconstruct(const Dataset& data, const ReconstructionOptions& options = {}) {
  const std::vector<double> vacuum_raw = data.raw_values(Source::vacuum_run);
  const std::vector<double> fock_raw = data.raw_values(Source::fock_run);

  Reconstruction out;
  RunReport& report = out.report;
  report.calibration = fit_vacuum(vacuum_raw, options.calibration);
  const std::vector<double> vacuum_x = rescale(vacuum_raw, report.calibration);
  report.analysis_source = fock_raw.empty() ? Source::vacuum_run : Source::fock_run;
  const std::vector<double> x = fock_raw.empty() ? vacuum_x : rescale(fock_raw, report.calibration);

  report.efficiency_fit = fit_efficiency(x, options.fit);
  report.diagonals = sample_diagonals(x, options.n_max);
  report.vacuum_diagonals = sample_diagonals(vacuum_x, options.n_max);

  out.histogram = bin_samples(x, centered_edges(options.bin_width, options.grid_max));
  SmoothingOptions smoothing;
  smoothing.bandwidth_scale = options.bandwidth_scale;
  smoothing.grid_max = options.grid_max;
  smoothing.grid_points = options.grid_points;
  out.density = smooth_marginal(out.histogram, smoothing);
  report.bandwidth = out.density.bandwidth;

  const std::vector<double> radii = radial_grid(options.grid_max, options.radial_points);
  out.profile = abel_inverse(out.density, radii);
  out.profile.stderr_values = bootstrap_profile_stderr(out.histogram, out.density, radii,
                                                       options.bootstrap_replicates, options.bootstrap_seed);

  const double base_bandwidth = out.density.bandwidth / options.bandwidth_scale;
  for (double scale : options.sensitivity_scales) {
    SmoothingOptions s = smoothing;
    s.bandwidth = base_bandwidth * scale;
    s.bandwidth_scale = 1.0;
    const GridDensity d = smooth_marginal(out.histogram, s);
    report.bandwidth_sensitivity.push_back({scale, d.bandwidth, detail::wigner_origin_of(d)});
  }

  WignerOrigin& w0 = report.wigner_origin;
  w0.value = out.profile.values.front();
  w0.stderr_value = out.profile.stderr_values.front();
  constexpr double kTwoOverPi = 2.0 / std::numbers::pi;
  if (report.diagonals.size() > 1) {
    w0.from_rho11 = kTwoOverPi * (1.0 - 2.0 * report.diagonals[1].rho_nn);
    w0.from_rho11_stderr = 2.0 * kTwoOverPi * report.diagonals[1].sigma_nn;
  }
  w0.from_eta_fit = kTwoOverPi * (1.0 - 2.0 * report.efficiency_fit.eta_hat);
  const double model_stderr = 2.0 * kTwoOverPi * report.efficiency_fit.eta_stderr;
  w0.consistent = std::abs(w0.value - w0.from_eta_fit) <= 2.0 * std::hypot(w0.stderr_value, model_stderr);

  report.provenance.dataset_header = data.header;
  report.provenance.options = canonical_options(options);
  report.provenance.config_hash = fnv1a_hex(report.provenance.options);
  return out;
}

}  // namespace homodyne
