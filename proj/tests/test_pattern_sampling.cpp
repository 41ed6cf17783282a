#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "homodyne/pattern.hpp"
#include "homodyne/sampling.hpp"
#include "homodyne/simulator.hpp"
#include "oracles.hpp"

namespace {

std::vector<double> mixture_x(double eta, std::size_t n, std::uint64_t seed) {
  homodyne::RandomStream stream(seed, 0);
  const homodyne::MixtureState s(eta);
  std::vector<double> out(n);
  for (auto& x : out) x = homodyne::sample_quadrature(s, stream);
  return out;
}

}  // namespace

TEST(PatternFunction, OrthonormalOnFockMarginals) {
  for (int n = 0; n <= 3; ++n)
    for (unsigned m = 0; m <= 3; ++m) {
      const double overlap =
          std::numbers::pi * oracle::integrate(
                                 [&](double x) { return oracle::fock_marginal(m, x) * homodyne::pattern_function(n, x); },
                                 -10.0, 10.0);
      EXPECT_NEAR(overlap, static_cast<int>(m) == n ? 1.0 : 0.0, 1e-6) << "n=" << n << " m=" << m;
    }
}

TEST(PatternFunction, MatchesFourierDefinition) {
  for (unsigned n = 0; n <= 3; ++n)
    for (double x = 0.0; x <= 5.0; x += 0.23)
      EXPECT_NEAR(homodyne::pattern_function(static_cast<int>(n), x), oracle::pattern_by_quadrature(n, x) / std::numbers::pi,
                  1e-9)
          << "n=" << n << " X=" << x;
}

TEST(PatternFunction, VacuumKernelPositiveAtOrigin) {
  EXPECT_GT(homodyne::pattern_function(0, 0.0), 0.0);
  EXPECT_NEAR(homodyne::pattern_function(0, 0.0), 2.0 / std::numbers::pi, 1e-15);
}

TEST(PatternFunction, Even) {
  for (int n = 0; n <= 3; ++n)
    for (double x = 0.0; x < 8.0; x += 0.071) EXPECT_EQ(homodyne::pattern_function(n, x), homodyne::pattern_function(n, -x));
}

TEST(PatternFunction, BoundedWithSlowTail) {
  for (int n = 0; n <= 3; ++n) {
    double sup = 0.0;
    for (double x = 0.0; x < 50.0; x += 0.01) {
      const double v = homodyne::pattern_function(n, x);
      EXPECT_TRUE(std::isfinite(v));
      sup = std::max(sup, std::abs(v));
    }
    EXPECT_LT(sup, 10.0);
  }
  // The tail falls off only algebraically, like -1/(pi X^2) / 2 ... for n = 0.
  EXPECT_LT(homodyne::pattern_function(0, 10.0), 0.0);
  EXPECT_GT(std::abs(homodyne::pattern_function(0, 10.0)), 1e-4);
}

TEST(PatternFunction, UnsupportedOrder) {
  EXPECT_THROW(homodyne::pattern_function(4, 0.0), homodyne::DomainError);
  EXPECT_THROW(homodyne::pattern_function(-1, 0.0), homodyne::DomainError);
}

TEST(SampleDiagonals, AnalyticMixtureIntegration) {
  for (double eta : {0.0, 0.3, 0.553, 1.0}) {
    auto rho = [&](int n) {
      return std::numbers::pi * oracle::integrate(
                                    [&](double x) { return oracle::mixture_marginal(eta, x) * homodyne::pattern_function(n, x); },
                                    -10.0, 10.0);
    };
    EXPECT_NEAR(rho(0), 1.0 - eta, 1e-8);
    EXPECT_NEAR(rho(1), eta, 1e-8);
    EXPECT_NEAR(rho(2), 0.0, 1e-8);
  }
}

TEST(SampleDiagonals, FullScaleFockRun) {
  const auto x = mixture_x(0.553, 12'000, 301);
  const auto d = homodyne::sample_diagonals(x, 3);
  ASSERT_EQ(d.size(), 4u);
  EXPECT_EQ(d[1].n, 1);
  EXPECT_EQ(d[1].n_samples, x.size());
  EXPECT_NEAR(d[1].rho_nn, 0.553, 3.0 * d[1].sigma_nn);
  EXPECT_GT(d[1].sigma_nn, 0.009);
  EXPECT_LT(d[1].sigma_nn, 0.017);
  EXPECT_GT(d[1].sigma_nn_uncentered, d[1].sigma_nn);
  EXPECT_NEAR(d[0].rho_nn + d[1].rho_nn + d[2].rho_nn + d[3].rho_nn, 1.0, 0.1);
}

TEST(SampleDiagonals, VacuumRunErrorScale) {
  const auto x = mixture_x(0.0, 200'000, 302);
  const auto d = homodyne::sample_diagonals(x, 1);
  EXPECT_NEAR(d[0].rho_nn, 1.0, 3.0 * d[0].sigma_nn);
  EXPECT_NEAR(d[1].rho_nn, 0.0, 3.0 * d[1].sigma_nn);
  for (const auto& e : d) {
    EXPECT_GT(e.sigma_nn, 0.0015);
    EXPECT_LT(e.sigma_nn, 0.0045);
  }
  // Uncentered error bars of the vacuum run: sqrt(<(pi f)^2> / N).
  EXPECT_NEAR(d[0].sigma_nn_uncentered, 0.0029, 0.0003);
  EXPECT_NEAR(d[1].sigma_nn_uncentered, 0.0032, 0.0003);
}

TEST(SampleDiagonals, CenteredErrorIsStandardErrorOfTheMean) {
  const std::vector<double> x{0.0, 0.3, -0.8, 1.4, 2.2};
  const auto d = homodyne::sample_diagonals(x, 2);
  for (const auto& e : d) {
    std::vector<double> v;
    for (double t : x) v.push_back(std::numbers::pi * homodyne::pattern_function(e.n, t));
    const double sd = oracle::stddev(v) * std::sqrt(5.0 / 4.0);
    EXPECT_NEAR(e.rho_nn, oracle::mean(v), 1e-14);
    EXPECT_NEAR(e.sigma_nn, sd / std::sqrt(5.0), 1e-14);
    double sq = 0.0;
    for (double t : v) sq += t * t;
    EXPECT_NEAR(e.sigma_nn_uncentered, std::sqrt(sq / 25.0), 1e-14);
  }
}

TEST(SampleDiagonals, SingleSampleHasPositiveError) {
  const std::vector<double> x{0.2};
  for (const auto& e : homodyne::sample_diagonals(x, 1)) EXPECT_GT(e.sigma_nn, 0.0);
}

TEST(SampleDiagonals, Errors) {
  const std::vector<double> none;
  EXPECT_THROW(homodyne::sample_diagonals(none), homodyne::DataError);
  const std::vector<double> one{0.0};
  EXPECT_THROW(homodyne::sample_diagonals(one, 4), homodyne::DomainError);
}
