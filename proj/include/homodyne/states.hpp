#pragma once

// Analytic phase-space models of the vacuum, the single-photon Fock state and
// the efficiency mixture  eta |1><1| + (1 - eta) |0><0|.
//
// Quadrature convention: the vacuum Wigner function is (2/pi) exp(-2 (X^2 + P^2)),
// so the vacuum quadrature variance is 1/4 (standard deviation 1/2).  Every
// other module in the library works in these units.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "homodyne/error.hpp"

namespace homodyne {

/// Standard deviation of the vacuum quadrature distribution.
inline constexpr double kVacuumQuadratureStd = 0.5;

/// sqrt(2/pi): peak of the vacuum marginal.
inline constexpr double kVacuumMarginalPeak = 0.79788456080286535588;  // sqrt(2/pi)

/// Quadrature tolerance for the inverse-CDF root solve.
inline constexpr double kQuantileTolerance = 1e-12;

/// The one-parameter family eta|1><1| + (1-eta)|0><0|.
class MixtureState {
 public:
  explicit MixtureState(double eta) : eta_(eta) {
    detail::require_domain(eta >= 0.0 && eta <= 1.0, "efficiency eta must lie in [0, 1]");
  }

  static MixtureState vacuum() { return MixtureState(0.0); }
  static MixtureState single_photon() { return MixtureState(1.0); }

  double eta() const noexcept { return eta_; }

 private:
  double eta_;
};

/// Phase-averaged Wigner function W(R) at radius R = sqrt(X^2 + P^2).
inline double wigner_radial(const MixtureState& state, double radius) {
  detail::require_domain(radius >= 0.0, "radius must be non-negative");
  const double r2 = radius * radius;
  const double eta = state.eta();
  return (2.0 / std::numbers::pi) * std::exp(-2.0 * r2) * (1.0 - 2.0 * eta + 4.0 * eta * r2);
}

/// W(X, P); the mixture is rotationally symmetric.
inline double wigner(const MixtureState& state, double x, double p) {
  return wigner_radial(state, std::hypot(x, p));
}

/// pr(X) = sqrt(2/pi) exp(-2X^2) (1 - eta + 4 eta X^2).
inline double marginal_density(const MixtureState& state, double x) {
  const double eta = state.eta();
  const double x2 = x * x;
  return kVacuumMarginalPeak * std::exp(-2.0 * x2) * (1.0 - eta + 4.0 * eta * x2);
}

namespace detail {

// Lower-tail CDF for x <= 0; both terms are non-negative so there is no cancellation.
inline double lower_tail_cdf(double eta, double x) {
  const double gaussian = 0.5 * std::erfc(-std::numbers::sqrt2 * x);
  return gaussian - eta * x * kVacuumMarginalPeak * std::exp(-2.0 * x * x);
}

struct IntervalTolerance {
  bool operator()(double a, double b) const { return std::abs(b - a) <= kQuantileTolerance; }
};

// Solves lower_tail_cdf(eta, x) = p for x <= 0, p in (0, 0.5].
inline double lower_tail_quantile(double eta, double p) {
  if (p == 0.5) return 0.0;
  constexpr double kLowerBracket = -10.0;
  auto f = [eta, p](double x) { return lower_tail_cdf(eta, x) - p; };
  std::uintmax_t max_iter = 200;
  const auto [lo, hi] =
      boost::math::tools::toms748_solve(f, kLowerBracket, 0.0, f(kLowerBracket), f(0.0),
                                        IntervalTolerance{}, max_iter);
  if (max_iter >= 200) throw NumericalError("quantile root solve did not converge");
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// P(X' <= x), from the closed-form antiderivative
///   Phi(2x) - eta x sqrt(2/pi) exp(-2x^2).
inline double marginal_cdf(const MixtureState& state, double x) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  if (x <= 0.0) return detail::lower_tail_cdf(state.eta(), x);
  return 1.0 - detail::lower_tail_cdf(state.eta(), -x);
}

/// Survival function P(X' > x), accurate in the upper tail where 1 - cdf underflows.
inline double marginal_sf(const MixtureState& state, double x) {
  if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
  if (x >= 0.0) return detail::lower_tail_cdf(state.eta(), -x);
  return 1.0 - detail::lower_tail_cdf(state.eta(), x);
}

/// Inverse of marginal_cdf for p in (0, 1).  Upper-half probabilities are routed
/// through the survival function so that both tails keep full resolution.
inline double marginal_quantile(const MixtureState& state, double p) {
  detail::require_domain(p > 0.0 && p < 1.0, "quantile probability must lie in (0, 1)");
  if (p <= 0.5) return detail::lower_tail_quantile(state.eta(), p);
  return -detail::lower_tail_quantile(state.eta(), 1.0 - p);
}

/// Inverse of marginal_sf for q in (0, 1).
inline double marginal_isf(const MixtureState& state, double q) {
  detail::require_domain(q > 0.0 && q < 1.0, "survival probability must lie in (0, 1)");
  if (q <= 0.5) return -detail::lower_tail_quantile(state.eta(), q);
  return detail::lower_tail_quantile(state.eta(), 1.0 - q);
}

}  // namespace homodyne
