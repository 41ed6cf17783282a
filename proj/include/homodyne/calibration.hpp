#pragma once

// Vacuum-run calibration: find the raw-unit scale and origin under which the
// vacuum noise matches the unit vacuum marginal, then map the Fock run into
// dimensionless quadratures.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "homodyne/error.hpp"
#include "homodyne/histogram.hpp"
#include "homodyne/states.hpp"
#include "homodyne/summation.hpp"

namespace homodyne {

enum class CalibrationMethod {
  moments,    ///< sample mean and standard deviation (the Gaussian MLE)
  histogram,  ///< moments refined by least squares on the binned density
};

inline const char* to_string(CalibrationMethod m) {
  return m == CalibrationMethod::moments ? "moments" : "histogram";
}

struct CalibrationOptions {
  CalibrationMethod method = CalibrationMethod::moments;
  std::size_t min_samples = 1000;
};

struct CalibrationResult {
  double scale_hat = 1.0;   // raw units per dimensionless quadrature
  double offset_hat = 0.0;  // raw units
  double fit_residual = 0.0;  // sum of squared density residuals over the bins below
  std::size_t n_used = 0;
  CalibrationMethod method = CalibrationMethod::moments;
  // Scott's-rule binning over mean +- 5 std used for the residual.
  double bin_width = 0.0;
  double range_lo = 0.0;
  double range_hi = 0.0;
};

namespace detail {

// Bin-averaged model density of a vacuum with the given scale and offset.
inline double vacuum_bin_density(double lo, double hi, double scale, double offset) {
  const MixtureState vac = MixtureState::vacuum();
  const double a = (lo - offset) / scale;
  const double b = (hi - offset) / scale;
  const double mass = b <= 0.0 ? marginal_cdf(vac, b) - marginal_cdf(vac, a)
                               : marginal_sf(vac, a) - marginal_sf(vac, b);
  return mass / (hi - lo);
}

inline double histogram_objective(const MarginalHistogram& h, double scale, double offset) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double r = h.density(i) - vacuum_bin_density(h.edges[i], h.edges[i + 1], scale, offset);
    sum += r * r;
  }
  return sum.value();
}

struct VacuumHistogramResidual {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const MarginalHistogram* hist;

  int inputs() const { return 2; }
  int values() const { return static_cast<int>(hist->bins()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    const double scale = std::abs(p[0]);
    for (std::size_t i = 0; i < hist->bins(); ++i)
      r[static_cast<Eigen::Index>(i)] =
          hist->density(i) - vacuum_bin_density(hist->edges[i], hist->edges[i + 1], scale, p[1]);
    return 0;
  }
};

}  // namespace detail

inline CalibrationResult fit_vacuum(std::span<const double> raw, const CalibrationOptions& options = {}) {
  if (raw.size() < options.min_samples)
    throw DataError("vacuum calibration needs at least " + std::to_string(options.min_samples) +
                    " samples, got " + std::to_string(raw.size()));
  const auto n = static_cast<double>(raw.size());
  CompensatedSum sum;
  for (double v : raw) sum += v;
  const double mean = sum.value() / n;
  CompensatedSum sq;
  for (double v : raw) sq += (v - mean) * (v - mean);
  const double sd = std::sqrt(sq.value() / n);
  if (!(sd > 0.0)) throw DataError("vacuum samples have zero variance");

  CalibrationResult result;
  result.method = options.method;
  result.n_used = raw.size();
  result.scale_hat = sd / kVacuumQuadratureStd;
  result.offset_hat = mean;

  result.bin_width = 3.49 * sd * std::cbrt(1.0 / n);
  result.range_lo = mean - 5.0 * sd;
  result.range_hi = mean + 5.0 * sd;
  const auto bins = static_cast<std::size_t>(std::ceil((result.range_hi - result.range_lo) / result.bin_width));
  const MarginalHistogram hist =
      bin_samples(raw, uniform_edges(result.range_lo, result.range_hi, bins));

  if (options.method == CalibrationMethod::histogram) {
    detail::VacuumHistogramResidual functor{&hist};
    Eigen::NumericalDiff<detail::VacuumHistogramResidual> diff(functor);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<detail::VacuumHistogramResidual>> lm(diff);
    Eigen::VectorXd p(2);
    p << result.scale_hat, result.offset_hat;
    const auto status = lm.minimize(p);
    if (status <= 0 || !std::isfinite(p[0]) || !std::isfinite(p[1]) || p[0] == 0.0)
      throw NumericalError("histogram calibration fit failed (status " + std::to_string(status) + ")");
    result.scale_hat = std::abs(p[0]);
    result.offset_hat = p[1];
  }
  result.fit_residual = detail::histogram_objective(hist, result.scale_hat, result.offset_hat);
  return result;
}

/// x = (raw - offset_hat) / scale_hat, elementwise and order-preserving.
inline std::vector<double> rescale(std::span<const double> raw, const CalibrationResult& cal) {
  detail::require_domain(cal.scale_hat > 0.0, "calibration scale must be positive");
  std::vector<double> out;
  out.reserve(raw.size());
  for (double v : raw) out.push_back((v - cal.offset_hat) / cal.scale_hat);
  return out;
}

}  // namespace homodyne
