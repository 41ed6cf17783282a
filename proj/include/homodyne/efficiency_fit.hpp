#pragma once

// Fits the mixture efficiency eta to calibrated Fock-run quadratures.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "homodyne/error.hpp"
#include "homodyne/histogram.hpp"
#include "homodyne/states.hpp"
#include "homodyne/summation.hpp"

namespace homodyne {

enum class FitMethod {
  mle,        ///< per-sample maximum likelihood; stderr from observed Fisher information
  histogram,  ///< Pearson least squares on a fixed histogram; stderr from the objective's curvature
};

inline const char* to_string(FitMethod m) { return m == FitMethod::mle ? "mle" : "hist"; }

struct EfficiencyFit {
  double eta_hat = 0.0;
  double eta_stderr = 0.0;
  double objective = 0.0;  // negative log-likelihood (mle) or Pearson chi-square (histogram)
  FitMethod method = FitMethod::mle;
  /// Set when eta_hat sits on, or within two standard errors of, 0 or 1.
  bool at_boundary = false;
  std::size_t iterations = 0;
  std::size_t n_used = 0;
};

struct EfficiencyFitOptions {
  FitMethod method = FitMethod::mle;
  std::size_t min_samples = 1000;
  // Histogram method binning: uniform bins over [-range, range] plus both tails.
  double hist_range = 4.0;
  std::size_t hist_bins = 80;
};

namespace detail {

inline double mle_score(std::span<const double> x, double eta) {
  CompensatedSum s;
  for (double v : x) {
    const double a = 4.0 * v * v - 1.0;
    s += a / (1.0 + eta * a);
  }
  return s.value();
}

inline EfficiencyFit fit_mle(std::span<const double> x) {
  EfficiencyFit fit;
  fit.method = FitMethod::mle;
  const double score0 = mle_score(x, 0.0);
  // A sample at exactly x = 0 has zero likelihood under the pure photon, so the
  // score diverges at eta = 1; bracket just below it instead.
  double upper = 1.0;
  double score1 = mle_score(x, upper);
  if (std::isnan(score1) || score1 == -std::numeric_limits<double>::infinity()) {
    upper = std::nextafter(1.0, 0.0);
    score1 = mle_score(x, upper);
  }
  // The log-likelihood is concave in eta, so the score is decreasing.
  if (score0 <= 0.0) {
    fit.eta_hat = 0.0;
  } else if (score1 >= 0.0) {
    fit.eta_hat = 1.0;
  } else {
    std::uintmax_t iter = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        [x](double eta) { return mle_score(x, eta); }, 0.0, upper, score0, score1,
        [](double a, double b) { return std::abs(b - a) <= 1e-12; }, iter);
    if (iter >= 200) throw NumericalError("efficiency likelihood root did not converge in 200 iterations");
    fit.iterations = iter;
    fit.eta_hat = 0.5 * (lo + hi);
  }

  CompensatedSum info;
  CompensatedSum nll;
  for (double v : x) {
    const double a = 4.0 * v * v - 1.0;
    const double w = 1.0 + fit.eta_hat * a;
    info += a * a / (w * w);
    nll += -std::log(marginal_density(MixtureState(fit.eta_hat), v));
  }
  fit.objective = nll.value();
  fit.eta_stderr = info.value() > 0.0 ? 1.0 / std::sqrt(info.value()) : std::numeric_limits<double>::infinity();
  return fit;
}

inline double pearson_chi_square(const MarginalHistogram& h, double eta) {
  const MixtureState state(eta);
  const auto n = static_cast<double>(h.all_samples());
  CompensatedSum chi;
  auto add = [&](double observed, double mass) {
    const double expected = n * mass;
    if (expected > 0.0) chi += (observed - expected) * (observed - expected) / expected;
  };
  add(static_cast<double>(h.underflow), marginal_cdf(state, h.edges.front()));
  add(static_cast<double>(h.overflow), marginal_sf(state, h.edges.back()));
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double a = h.edges[i];
    const double b = h.edges[i + 1];
    const double mass = b <= 0.0 ? marginal_cdf(state, b) - marginal_cdf(state, a)
                                 : marginal_sf(state, a) - marginal_sf(state, b);
    add(static_cast<double>(h.counts[i]), mass);
  }
  return chi.value();
}

inline EfficiencyFit fit_histogram(std::span<const double> x, const EfficiencyFitOptions& options) {
  const MarginalHistogram h =
      bin_samples(x, uniform_edges(-options.hist_range, options.hist_range, options.hist_bins));
  auto objective = [&h](double eta) { return pearson_chi_square(h, eta); };
  std::uintmax_t iter = 200;
  const auto [eta, chi] = boost::math::tools::brent_find_minima(objective, 0.0, 1.0, 40, iter);
  if (iter >= 200) throw NumericalError("histogram efficiency fit did not converge in 200 iterations");

  EfficiencyFit fit;
  fit.method = FitMethod::histogram;
  fit.iterations = iter;
  fit.eta_hat = std::clamp(eta, 0.0, 1.0);
  fit.objective = chi;
  // chi^2 is close to quadratic in eta: sigma^2 = 2 / chi''.
  constexpr double kStep = 1e-3;
  const double center = std::clamp(fit.eta_hat, kStep, 1.0 - kStep);
  const double curvature =
      (objective(center + kStep) - 2.0 * objective(center) + objective(center - kStep)) / (kStep * kStep);
  fit.eta_stderr = curvature > 0.0 ? std::sqrt(2.0 / curvature) : std::numeric_limits<double>::infinity();
  return fit;
}

}  // namespace detail

inline EfficiencyFit fit_efficiency(std::span<const double> x, const EfficiencyFitOptions& options = {}) {
  if (x.size() < options.min_samples)
    throw DataError("efficiency fit needs at least " + std::to_string(options.min_samples) + " samples, got " +
                    std::to_string(x.size()));
  EfficiencyFit fit = options.method == FitMethod::mle ? detail::fit_mle(x) : detail::fit_histogram(x, options);
  fit.n_used = x.size();
  const double distance = std::min(fit.eta_hat, 1.0 - fit.eta_hat);
  fit.at_boundary = distance <= 0.0 || distance < 2.0 * fit.eta_stderr;
  return fit;
}

}  // namespace homodyne
