#pragma once

// Inverse Abel transform of a phase-averaged marginal:
//
//   W(R) = -(1/pi) * integral_R^inf  pr'(X) / sqrt(X^2 - R^2) dX.
//
// With u = sqrt(X^2 - R^2) we have dX / sqrt(X^2 - R^2) = du / X, so
//
//   W(R) = -(1/pi) * integral_0^sqrt(Xmax^2 - R^2)  g(sqrt(R^2 + u^2)) du,
//
// where g(X) = pr'(X) / X is regular everywhere (pr is even, so pr' is odd and
// g(0) = pr''(0)).  The integrand has no singularity left.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "homodyne/error.hpp"
#include "homodyne/smoothing.hpp"
#include "homodyne/summation.hpp"

namespace homodyne {

struct RadialWignerProfile {
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> stderr_values;  // empty unless filled by a bootstrap

  /// 2 pi * integral W(R) R dR over the tabulated range (trapezoid rule).
  double norm() const {
    CompensatedSum sum;
    for (std::size_t i = 1; i < radii.size(); ++i)
      sum += 0.5 * (values[i] * radii[i] + values[i - 1] * radii[i - 1]) * (radii[i] - radii[i - 1]);
    return 2.0 * std::numbers::pi * sum.value();
  }
};

struct AbelOptions {
  double min_range = 4.0;     // density grid must reach at least this |X|
  double max_spacing = 0.05;  // coarser grids are rejected
  double panel_width = 0.02;  // Gauss-Legendre panel length in u
};

/// `points` equally spaced radii on [0, r_max].
inline std::vector<double> radial_grid(double r_max, std::size_t points) {
  detail::require_domain(points >= 2 && r_max > 0.0, "radial grid needs >= 2 points and r_max > 0");
  std::vector<double> r(points);
  for (std::size_t i = 0; i < points; ++i) r[i] = r_max * static_cast<double>(i) / static_cast<double>(points - 1);
  return r;
}

namespace detail {

// g_i = pr'(X_i) / X_i on the density grid, using the evenness of pr to mirror
// across X = 0 and fourth-order central differences in the interior.
inline std::vector<double> derivative_over_x(const GridDensity& density) {
  const auto& p = density.values;
  const std::size_t m = p.size();
  const double h = density.spacing;
  auto at = [&](std::ptrdiff_t i) { return p[static_cast<std::size_t>(i < 0 ? -i : i)]; };

  std::vector<double> g(m);
  g[0] = (-2.0 * p[2] + 32.0 * p[1] - 30.0 * p[0]) / (12.0 * h * h);
  for (std::size_t k = 1; k < m; ++k) {
    const auto i = static_cast<std::ptrdiff_t>(k);
    double d;
    if (k + 2 < m) d = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * h);
    else if (k + 1 < m) d = (at(i + 1) - at(i - 1)) / (2.0 * h);
    else d = (3.0 * at(i) - 4.0 * at(i - 1) + at(i - 2)) / (2.0 * h);
    g[k] = d / density.x(k);
  }
  return g;
}

}  // namespace detail

/// Reconstructs W(R) on `radii` from an even marginal density tabulated on
/// [0, Xmax].  The density is taken as zero beyond Xmax.
inline RadialWignerProfile abel_inverse(const GridDensity& density, std::span<const double> radii,
                                        const AbelOptions& options = {}) {
  if (density.values.size() < 5) throw DomainError("abel_inverse needs at least 5 grid points");
  if (!(density.spacing > 0.0) || density.spacing > options.max_spacing)
    throw DomainError("density grid too coarse for abel_inverse (spacing " + std::to_string(density.spacing) +
                      " > " + std::to_string(options.max_spacing) + ")");
  const double x_max = density.grid_max();
  if (x_max < options.min_range)
    throw DomainError("density grid too short for abel_inverse (reaches " + std::to_string(x_max) +
                      " < " + std::to_string(options.min_range) + ")");

  const std::vector<double> g = detail::derivative_over_x(density);
  // g is even, so its slope at the origin vanishes.
  const boost::math::interpolators::cardinal_cubic_b_spline<double> spline(g.begin(), g.end(), 0.0,
                                                                           density.spacing, 0.0);
  using Quadrature = boost::math::quadrature::gauss<double, 10>;

  RadialWignerProfile out;
  out.radii.assign(radii.begin(), radii.end());
  out.values.reserve(radii.size());
  for (double r : radii) {
    detail::require_domain(r >= 0.0, "radius must be non-negative");
    if (r >= x_max) {
      out.values.push_back(0.0);
      continue;
    }
    const double r2 = r * r;
    const double u_max = std::sqrt(x_max * x_max - r2);
    const auto panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(u_max / options.panel_width)));
    const double width = u_max / static_cast<double>(panels);
    auto integrand = [&](double u) { return spline(std::min(std::sqrt(r2 + u * u), x_max)); };
    CompensatedSum sum;
    for (std::size_t k = 0; k < panels; ++k) {
      const double a = width * static_cast<double>(k);
      sum += Quadrature::integrate(integrand, a, a + width);
    }
    out.values.push_back(-sum.value() / std::numbers::pi);
  }
  return out;
}

/// Forward projection of a radial profile: pr(X) = 2 * integral_0^inf W(sqrt(X^2 + P^2)) dP,
/// with W interpolated on the (uniform) radial grid and zero beyond it.
inline double abel_project(const RadialWignerProfile& profile, double x) {
  const std::size_t n = profile.radii.size();
  detail::require_domain(n >= 4 && profile.radii.front() == 0.0, "projection needs a uniform radial grid from 0");
  const double step = profile.radii[1] - profile.radii[0];
  const double r_max = profile.radii.back();
  const double ax = std::abs(x);
  if (ax >= r_max) return 0.0;
  const boost::math::interpolators::cardinal_cubic_b_spline<double> spline(
      profile.values.begin(), profile.values.end(), 0.0, step, 0.0);
  const double p_max = std::sqrt(r_max * r_max - ax * ax);
  const auto panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(p_max / (2.0 * step))));
  const double width = p_max / static_cast<double>(panels);
  using Quadrature = boost::math::quadrature::gauss<double, 10>;
  auto integrand = [&](double p) { return spline(std::min(std::hypot(ax, p), r_max)); };
  CompensatedSum sum;
  for (std::size_t k = 0; k < panels; ++k) {
    const double a = width * static_cast<double>(k);
    sum += Quadrature::integrate(integrand, a, a + width);
  }
  return 2.0 * sum.value();
}

}  // namespace homodyne
