#pragma once

// Multiplicative efficiency budget with first-order error propagation.

#include <algorithm>
#include <cmath>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "homodyne/error.hpp"

namespace homodyne {

enum class FactorKind {
  direct,              ///< value is the efficiency factor itself
  visibility_squared,  ///< value is a visibility v; the factor is v^2 with error 2 v sigma_v
};

struct EfficiencyFactor {
  std::string name;
  double value = 1.0;
  double uncertainty = 0.0;  // absolute one-sigma on `value`
  FactorKind kind = FactorKind::direct;

  void validate() const {
    detail::require_domain(value > 0.0 && value <= 1.0, "factor '" + name + "' must lie in (0, 1]");
    detail::require_domain(uncertainty >= 0.0 && std::isfinite(uncertainty),
                           "factor '" + name + "' needs a non-negative uncertainty");
  }

  double effective_value() const { return kind == FactorKind::direct ? value : value * value; }
  double effective_uncertainty() const {
    return kind == FactorKind::direct ? uncertainty : 2.0 * value * uncertainty;
  }
};

struct BudgetResult {
  double eta_predicted = 1.0;
  double eta_uncertainty = 0.0;
};

/// Product of the effective factors; relative uncertainties add in quadrature.
/// Terms are accumulated in sorted order, so the result does not depend on the
/// order of `factors`.
inline BudgetResult combine(std::span<const EfficiencyFactor> factors) {
  if (factors.empty()) throw DomainError("an efficiency budget needs at least one factor");
  std::vector<double> values;
  std::vector<double> relative_sq;
  for (const auto& f : factors) {
    f.validate();
    values.push_back(f.effective_value());
    const double rel = f.effective_uncertainty() / f.effective_value();
    relative_sq.push_back(rel * rel);
  }
  std::sort(values.begin(), values.end());
  std::sort(relative_sq.begin(), relative_sq.end());
  BudgetResult r;
  for (double v : values) r.eta_predicted *= v;
  double rel_sum = 0.0;
  for (double q : relative_sq) rel_sum += q;
  r.eta_uncertainty = r.eta_predicted * std::sqrt(rel_sum);
  return r;
}

/// Mode matching (visibility 0.83 +- 0.01), DFG/single-photon mode mismatch,
/// signal-path loss with photodiode efficiency, and false triggers.
inline std::vector<EfficiencyFactor> default_budget_factors() {
  return {
      {"mode_matching", 0.83, 0.01, FactorKind::visibility_squared},
      {"dfg_mode_fidelity", 0.95, 0.0, FactorKind::direct},
      {"signal_loss_and_photodiodes", 0.90, 0.0, FactorKind::direct},
      {"false_triggers", 0.98, 0.0, FactorKind::direct},
  };
}

inline const char* to_string(FactorKind k) {
  return k == FactorKind::direct ? "direct" : "visibility_squared";
}

/// Reads `name value uncertainty kind` lines; blank lines and `#` comments are skipped.
inline std::vector<EfficiencyFactor> parse_factors(std::istream& is) {
  std::vector<EfficiencyFactor> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    EfficiencyFactor f;
    std::string kind, extra;
    if (!(fields >> f.name)) continue;
    if (!(fields >> f.value >> f.uncertainty >> kind) || (fields >> extra))
      throw FormatError("factor line " + std::to_string(line_no) + ": expected 'name value uncertainty kind'");
    if (kind == "direct") f.kind = FactorKind::direct;
    else if (kind == "visibility_squared") f.kind = FactorKind::visibility_squared;
    else throw FormatError("factor line " + std::to_string(line_no) + ": unknown kind '" + kind + "'");
    f.validate();
    out.push_back(std::move(f));
  }
  if (out.empty()) throw FormatError("factor list is empty");
  return out;
}

struct AgreementCheck {
  double difference = 0.0;
  double tolerance = 0.0;  // 2 * sqrt(sigma_budget^2 + sigma_fit^2)
  bool pass = false;
};

inline AgreementCheck check_agreement(const BudgetResult& budget, double eta_fitted, double eta_stderr) {
  AgreementCheck c;
  c.difference = std::abs(budget.eta_predicted - eta_fitted);
  c.tolerance = 2.0 * std::hypot(budget.eta_uncertainty, eta_stderr);
  c.pass = c.difference <= c.tolerance;
  return c;
}

}  // namespace homodyne
