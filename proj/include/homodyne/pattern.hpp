#pragma once

// Diagonal pattern functions f_nn for phase-randomized data, n <= 3.
//
// In the unit-variance-1/2 quadrature x = sqrt(2) X the phase-averaged
// sampling kernel of |n><n| is
//
//   F_n(x) = integral_0^inf k cos(kx) exp(-k^2/4) L_n(k^2/2) dk
//          = sum_j C(n,j) / (j! 2^j) * d^{2j}/dx^{2j} F_0(x),
//   F_0(x) = 2 - 4 x D(x),
//
// with D the Dawson function.  Because D' = 1 - 2xD, every derivative of F_0
// stays of the form P(x) + Q(x) D(x) with polynomial P and Q, so each F_n has
// an exact closed form.  In the library's convention
//
//   f_nn(X) = F_n(sqrt(2) X) / pi,   rho_nn = pi * integral pr(X) f_nn(X) dX.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include <gsl/gsl_sf_dawson.h>

#include "homodyne/error.hpp"

namespace homodyne {

inline constexpr int kMaxPatternOrder = 3;

namespace detail {

inline constexpr std::size_t kPatternCoeffs = 10;

// P(x) + Q(x) D(x); coefficient k multiplies x^k.
struct DawsonForm {
  std::array<double, kPatternCoeffs> p{};
  std::array<double, kPatternCoeffs> q{};
};

constexpr DawsonForm differentiate(const DawsonForm& f) {
  // (P + Q D)' = (P' + Q) + (Q' - 2x Q) D
  DawsonForm d;
  for (std::size_t k = 1; k < kPatternCoeffs; ++k) {
    d.p[k - 1] += static_cast<double>(k) * f.p[k];
    d.q[k - 1] += static_cast<double>(k) * f.q[k];
  }
  for (std::size_t k = 0; k < kPatternCoeffs; ++k) {
    d.p[k] += f.q[k];
    if (k + 1 < kPatternCoeffs) d.q[k + 1] -= 2.0 * f.q[k];
  }
  return d;
}

constexpr double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

constexpr std::array<DawsonForm, kMaxPatternOrder + 1> make_pattern_table() {
  std::array<DawsonForm, 2 * kMaxPatternOrder + 1> derivs{};
  derivs[0].p[0] = 2.0;
  derivs[0].q[1] = -4.0;
  for (std::size_t i = 1; i < derivs.size(); ++i) derivs[i] = differentiate(derivs[i - 1]);

  std::array<DawsonForm, kMaxPatternOrder + 1> table{};
  for (int n = 0; n <= kMaxPatternOrder; ++n) {
    double factorial = 1.0;
    double power_of_two = 1.0;
    for (int j = 0; j <= n; ++j) {
      if (j > 0) {
        factorial *= j;
        power_of_two *= 2.0;
      }
      const double c = binomial(n, j) / (factorial * power_of_two);
      const auto& d = derivs[static_cast<std::size_t>(2 * j)];
      for (std::size_t k = 0; k < kPatternCoeffs; ++k) {
        table[static_cast<std::size_t>(n)].p[k] += c * d.p[k];
        table[static_cast<std::size_t>(n)].q[k] += c * d.q[k];
      }
    }
  }
  return table;
}

inline constexpr auto kPatternTable = make_pattern_table();

inline double horner(const std::array<double, kPatternCoeffs>& c, double x) {
  double r = 0.0;
  for (std::size_t k = kPatternCoeffs; k-- > 0;) r = r * x + c[k];
  return r;
}

}  // namespace detail

/// f_nn(X) for n in 0..3.  Bounded and even; normalized so that
/// pi * integral pr_m(X) f_nn(X) dX = delta_nm for Fock marginals pr_m.
inline double pattern_function(int n, double x) {
  if (n < 0 || n > kMaxPatternOrder)
    throw DomainError("pattern functions are provided for n = 0.." + std::to_string(kMaxPatternOrder) +
                      ", got " + std::to_string(n));
  const double s = std::numbers::sqrt2 * std::abs(x);
  const auto& form = detail::kPatternTable[static_cast<std::size_t>(n)];
  return (detail::horner(form.p, s) + detail::horner(form.q, s) * gsl_sf_dawson(s)) / std::numbers::pi;
}

}  // namespace homodyne
