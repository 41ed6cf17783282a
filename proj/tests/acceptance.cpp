// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "homodyne/homodyne.hpp"
#include "oracles.hpp"

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

homodyne::Dataset simulate(const homodyne::RunSpec& spec) {
  return homodyne::make_dataset(spec, homodyne::generate_run(spec, 4));
}

Outcome analytic_origin() {
  const double w0 = homodyne::wigner_radial(homodyne::MixtureState(0.553), 0.0);
  return {std::abs(w0 + 0.0675) <= 5e-4, fmt("W(0) = %.6f, target -0.0675 +- 5e-4", w0)};
}

Outcome abel_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto radii = homodyne::radial_grid(3.0, 301);
  double worst = 0.0;
  std::string detail;
  for (double eta : {0.0, 0.553, 1.0}) {
    const auto density =
        homodyne::tabulate([eta](double x) { return oracle::mixture_marginal(eta, x); }, 6.0, 2001);
    const auto p = homodyne::abel_inverse(density, radii);
    double sup = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const double r = radii[i];
      const double exact = eta * oracle::photon_wigner(r, 0.0) + (1.0 - eta) * oracle::vacuum_wigner(r, 0.0);
      sup = std::max(sup, std::abs(p.values[i] - exact));
    }
    worst = std::max(worst, sup);
    detail += fmt("eta=%.3f sup=%.2e; ", eta, sup);
  }
  const double elapsed = seconds_since(t0);
  return {worst < 1e-3 && elapsed < 1.0, detail + fmt("%.2f s", elapsed)};
}

Outcome full_scale() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rec = homodyne::reconstruct(simulate(homodyne::RunSpec{}));
  const double elapsed = seconds_since(t0);
  const auto& r = rec.report;
  const double eta = r.efficiency_fit.eta_hat;
  const double sigma11 = r.diagonals.at(1).sigma_nn;
  const double w0 = r.wigner_origin.value;
  const bool pass = std::abs(eta - 0.553) <= 0.026 && sigma11 >= 0.009 && sigma11 <= 0.017 && w0 < 0.0 &&
                    elapsed < 30.0;
  return {pass, fmt("eta_hat=%.4f+-%.4f rho11=%.4f+-%.4f W(0)=%.4f+-%.4f %.1f s", eta, r.efficiency_fit.eta_stderr,
                    r.diagonals[1].rho_nn, sigma11, w0, r.wigner_origin.stderr_value, elapsed)};
}

Outcome vacuum_control() {
  const auto t0 = std::chrono::steady_clock::now();
  homodyne::RunSpec spec;
  spec.n_fock = 0;
  const auto dataset = simulate(spec);
  const auto x = homodyne::rescale(dataset.raw_values(homodyne::Source::vacuum_run),
                                   homodyne::fit_vacuum(dataset.raw_values(homodyne::Source::vacuum_run)));
  const auto d = homodyne::sample_diagonals(x, 1);
  const double elapsed = seconds_since(t0);
  auto sigma_ok = [](double s) { return s >= 0.0015 && s <= 0.0045; };
  const bool pass = std::abs(d[0].rho_nn - 1.0) <= 3.0 * d[0].sigma_nn && std::abs(d[1].rho_nn) <= 3.0 * d[1].sigma_nn &&
                    sigma_ok(d[0].sigma_nn) && sigma_ok(d[1].sigma_nn) && elapsed < 10.0;
  return {pass, fmt("rho00=%.4f+-%.4f (uncentered %.4f) rho11=%.4f+-%.4f (uncentered %.4f) %.1f s", d[0].rho_nn,
                    d[0].sigma_nn, d[0].sigma_nn_uncentered, d[1].rho_nn, d[1].sigma_nn, d[1].sigma_nn_uncentered,
                    elapsed)};
}

Outcome negativity_threshold() {
  homodyne::ReconstructionOptions options;
  options.bootstrap_replicates = 0;
  double w_above = 0.0, w_below = 0.0;
  for (auto [eta, out] : {std::pair{0.55, &w_above}, std::pair{0.45, &w_below}}) {
    homodyne::RunSpec spec;
    spec.eta_true = eta;
    spec.n_fock = 1'000'000;
    *out = homodyne::reconstruct(simulate(spec), options).report.wigner_origin.value;
  }
  return {w_above < 0.0 && w_below > 0.0, fmt("W(0)=%.4f at eta=0.55, W(0)=%.4f at eta=0.45", w_above, w_below)};
}

Outcome estimator_consistency() {
  const homodyne::MixtureState state(0.553);
  std::vector<double> estimates;
  double mean_sigma = 0.0;
  constexpr int kRuns = 200;
  for (int run = 0; run < kRuns; ++run) {
    homodyne::RandomStream stream(1000, static_cast<std::uint64_t>(run));
    std::vector<double> x(12'000);
    for (auto& v : x) v = homodyne::sample_quadrature(state, stream);
    const auto d = homodyne::sample_diagonals(x, 1);
    estimates.push_back(d[1].rho_nn);
    mean_sigma += d[1].sigma_nn / kRuns;
  }
  const double spread = oracle::stddev(estimates) * std::sqrt(kRuns / (kRuns - 1.0));
  const double ratio = spread / mean_sigma;
  return {std::abs(ratio - 1.0) <= 0.25,
          fmt("empirical sd %.5f vs mean sigma11 %.5f (ratio %.3f)", spread, mean_sigma, ratio)};
}

Outcome orthonormality() {
  double worst = 0.0;
  for (int n = 0; n <= 3; ++n)
    for (unsigned m = 0; m <= 3; ++m) {
      const double overlap =
          std::numbers::pi *
          oracle::integrate([&](double x) { return oracle::fock_marginal(m, x) * homodyne::pattern_function(n, x); },
                            -10.0, 10.0);
      worst = std::max(worst, std::abs(overlap - (static_cast<int>(m) == n ? 1.0 : 0.0)));
    }
  return {worst <= 1e-6, fmt("max |M - I| = %.2e", worst)};
}

Outcome budget_reproduction() {
  const auto result = homodyne::combine(homodyne::default_budget_factors());
  const auto check = homodyne::check_agreement(result, 0.553, 0.013);
  const std::string value = fmt("%.2f", result.eta_predicted);
  const std::string error = fmt("%.2f", result.eta_uncertainty);
  const bool pass = value == "0.57" && error == "0.02" && check.pass;
  return {pass, fmt("%.5f +- %.5f -> %s +- %s (target 0.57 +- 0.02); agreement |%.4f| <= %.4f %s",
                    result.eta_predicted, result.eta_uncertainty, value.c_str(), error.c_str(), check.difference,
                    check.tolerance, check.pass ? "pass" : "fail")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 analytic origin value", analytic_origin},
      {"2 abel oracle", abel_oracle},
      {"3 full-scale end-to-end", full_scale},
      {"4 vacuum control", vacuum_control},
      {"5 negativity threshold", negativity_threshold},
      {"6 estimator consistency", estimator_consistency},
      {"7 pattern-function orthonormality", orthonormality},
      {"8 budget reproduction", budget_reproduction},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
