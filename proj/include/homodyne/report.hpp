#pragma once

// Report and table serialization.  Every report exists twice: a flat
// `key=value` text block for people and a JSON document for programs.  Both
// carry a format name and version.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "homodyne/budget.hpp"
#include "homodyne/dataset.hpp"
#include "homodyne/reconstruction.hpp"

namespace homodyne {

inline constexpr std::string_view kReportFormat = "homodyne-report";
inline constexpr std::string_view kBudgetFormat = "homodyne-budget";
inline constexpr std::string_view kSummaryFormat = "homodyne-summary";
inline constexpr int kReportFormatVersion = 1;

// --- key=value ---------------------------------------------------------------

class KeyValueWriter {
 public:
  void add(std::string_view key, std::string_view value) {
    text_ += key;
    text_ += '=';
    text_ += value;
    text_ += '\n';
  }
  void add(std::string_view key, double value) { add(key, format_double(value)); }
  void add(std::string_view key, std::size_t value) { add(key, std::to_string(value)); }
  void add(std::string_view key, int value) { add(key, std::to_string(value)); }
  void add(std::string_view key, bool value) { add(key, std::string_view(value ? "true" : "false")); }
  void add(std::string_view key, const char* value) { add(key, std::string_view(value)); }

  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

inline void append_key_values(KeyValueWriter& w, const CalibrationResult& c, const std::string& prefix = "calibration.") {
  w.add(prefix + "method", to_string(c.method));
  w.add(prefix + "scale_hat", c.scale_hat);
  w.add(prefix + "offset_hat", c.offset_hat);
  w.add(prefix + "fit_residual", c.fit_residual);
  w.add(prefix + "n_used", c.n_used);
  w.add(prefix + "bin_width", c.bin_width);
  w.add(prefix + "range_lo", c.range_lo);
  w.add(prefix + "range_hi", c.range_hi);
}

inline std::string to_key_value(const CalibrationResult& c) {
  KeyValueWriter w;
  append_key_values(w, c);
  return w.str();
}

inline void append_key_values(KeyValueWriter& w, const BudgetResult& b, const std::string& prefix = "budget.") {
  w.add(prefix + "eta_predicted", b.eta_predicted);
  w.add(prefix + "eta_uncertainty", b.eta_uncertainty);
}

inline std::string to_key_value(const RunReport& r) {
  KeyValueWriter w;
  w.add("format", kReportFormat);
  w.add("format_version", kReportFormatVersion);
  w.add("analysis_source", r.analysis_source == Source::fock_run ? "fock_run" : "vacuum_run");
  append_key_values(w, r.calibration);
  const auto& f = r.efficiency_fit;
  w.add("efficiency_fit.method", to_string(f.method));
  w.add("efficiency_fit.eta_hat", f.eta_hat);
  w.add("efficiency_fit.eta_stderr", f.eta_stderr);
  w.add("efficiency_fit.objective", f.objective);
  w.add("efficiency_fit.at_boundary", f.at_boundary);
  w.add("efficiency_fit.iterations", f.iterations);
  w.add("efficiency_fit.n_used", f.n_used);
  auto diagonals = [&w](const std::string& prefix, const std::vector<DiagonalEstimate>& ds) {
    for (const auto& d : ds) {
      const std::string p = prefix + ".rho_" + std::to_string(d.n) + std::to_string(d.n);
      w.add(p, d.rho_nn);
      w.add(p + ".sigma", d.sigma_nn);
      w.add(p + ".sigma_uncentered", d.sigma_nn_uncentered);
    }
  };
  diagonals("diagonals", r.diagonals);
  diagonals("vacuum_diagonals", r.vacuum_diagonals);
  const auto& w0 = r.wigner_origin;
  w.add("wigner_origin.value", w0.value);
  w.add("wigner_origin.stderr", w0.stderr_value);
  w.add("wigner_origin.from_rho11", w0.from_rho11);
  w.add("wigner_origin.from_rho11_stderr", w0.from_rho11_stderr);
  w.add("wigner_origin.from_eta_fit", w0.from_eta_fit);
  w.add("wigner_origin.consistent", w0.consistent);
  w.add("smoothing.bandwidth", r.bandwidth);
  for (const auto& s : r.bandwidth_sensitivity)
    w.add("smoothing.sensitivity.x" + format_double(s.scale) + ".wigner_origin", s.wigner_origin);
  if (r.budget) append_key_values(w, *r.budget);
  else w.add("budget", "absent");
  if (r.agreement) {
    w.add("agreement.difference", r.agreement->difference);
    w.add("agreement.tolerance", r.agreement->tolerance);
    w.add("agreement.pass", r.agreement->pass);
  }
  w.add("provenance.version", r.provenance.version);
  w.add("provenance.config_hash", r.provenance.config_hash);
  for (const auto& [k, v] : r.provenance.dataset_header) w.add("provenance.dataset." + k, v);
  return w.str();
}

// --- JSON --------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const CalibrationResult& c) {
  return {{"method", to_string(c.method)}, {"scale_hat", c.scale_hat},   {"offset_hat", c.offset_hat},
          {"fit_residual", c.fit_residual}, {"n_used", c.n_used},        {"bin_width", c.bin_width},
          {"range_lo", c.range_lo},         {"range_hi", c.range_hi}};
}

inline nlohmann::ordered_json to_json(const BudgetResult& b) {
  return {{"eta_predicted", b.eta_predicted}, {"eta_uncertainty", b.eta_uncertainty}};
}

inline nlohmann::ordered_json to_json(const AgreementCheck& a) {
  return {{"difference", a.difference}, {"tolerance", a.tolerance}, {"pass", a.pass}};
}

inline nlohmann::ordered_json to_json(const std::vector<DiagonalEstimate>& ds) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& d : ds)
    arr.push_back({{"n", d.n},
                   {"rho_nn", d.rho_nn},
                   {"sigma_nn", d.sigma_nn},
                   {"sigma_nn_uncentered", d.sigma_nn_uncentered},
                   {"n_samples", d.n_samples}});
  return arr;
}

inline nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["format"] = kReportFormat;
  j["format_version"] = kReportFormatVersion;
  j["analysis_source"] = r.analysis_source == Source::fock_run ? "fock_run" : "vacuum_run";
  j["calibration"] = to_json(r.calibration);
  const auto& f = r.efficiency_fit;
  j["efficiency_fit"] = {{"method", to_string(f.method)}, {"eta_hat", f.eta_hat},
                         {"eta_stderr", f.eta_stderr},    {"objective", f.objective},
                         {"at_boundary", f.at_boundary},  {"iterations", f.iterations},
                         {"n_used", f.n_used}};
  j["diagonals"] = to_json(r.diagonals);
  j["vacuum_diagonals"] = to_json(r.vacuum_diagonals);
  const auto& w0 = r.wigner_origin;
  j["wigner_origin"] = {{"value", w0.value},
                        {"stderr", w0.stderr_value},
                        {"from_rho11", w0.from_rho11},
                        {"from_rho11_stderr", w0.from_rho11_stderr},
                        {"from_eta_fit", w0.from_eta_fit},
                        {"consistent", w0.consistent}};
  auto sens = nlohmann::ordered_json::array();
  for (const auto& s : r.bandwidth_sensitivity)
    sens.push_back({{"scale", s.scale}, {"bandwidth", s.bandwidth}, {"wigner_origin", s.wigner_origin}});
  j["smoothing"] = {{"bandwidth", r.bandwidth}, {"sensitivity", sens}};
  j["budget"] = r.budget ? to_json(*r.budget) : nlohmann::ordered_json(nullptr);
  if (r.agreement) j["agreement"] = to_json(*r.agreement);
  nlohmann::ordered_json header = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.provenance.dataset_header) header[k] = v;
  j["provenance"] = {{"version", r.provenance.version},
                     {"config_hash", r.provenance.config_hash},
                     {"options", r.provenance.options},
                     {"dataset", header}};
  return j;
}

inline nlohmann::ordered_json budget_to_json(const std::vector<EfficiencyFactor>& factors, const BudgetResult& b) {
  nlohmann::ordered_json j;
  j["format"] = kBudgetFormat;
  j["format_version"] = kReportFormatVersion;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& f : factors)
    arr.push_back({{"name", f.name},
                   {"value", f.value},
                   {"uncertainty", f.uncertainty},
                   {"kind", to_string(f.kind)},
                   {"effective_value", f.effective_value()},
                   {"effective_uncertainty", f.effective_uncertainty()}});
  j["factors"] = arr;
  j["result"] = to_json(b);
  return j;
}

namespace detail {

inline void require_format(const nlohmann::ordered_json& j, std::string_view format) {
  if (!j.is_object() || !j.contains("format") || !j["format"].is_string())
    throw FormatError("document lacks a format field (expected " + std::string(format) + ")");
  if (j["format"].get<std::string>() != format)
    throw FormatError("expected a " + std::string(format) + " document, got " + j["format"].get<std::string>());
  if (!j.contains("format_version") || !j["format_version"].is_number_integer())
    throw FormatError(std::string(format) + " document lacks an integer format_version");
  const int version = j["format_version"].get<int>();
  if (version != kReportFormatVersion)
    throw FormatError(std::string(format) + " format_version " + std::to_string(version) +
                      " is not supported (expected " + std::to_string(kReportFormatVersion) + ")");
}

}  // namespace detail

/// Merges a reconstruction report with an optional budget document and runs
/// the budget/fit agreement check.
inline nlohmann::ordered_json make_summary(const nlohmann::ordered_json& reconstruction,
                                           const std::optional<nlohmann::ordered_json>& budget) {
  detail::require_format(reconstruction, kReportFormat);
  if (budget) detail::require_format(*budget, kBudgetFormat);

  nlohmann::ordered_json s;
  s["format"] = kSummaryFormat;
  s["format_version"] = kReportFormatVersion;
  s["reconstruction"] = reconstruction;
  if (!budget) {
    s["budget"] = nullptr;
    s["budget_status"] = "absent";
    s["agreement"] = nullptr;
    return s;
  }
  s["budget"] = *budget;
  s["budget_status"] = "present";
  try {
    const BudgetResult b{(*budget).at("result").at("eta_predicted").get<double>(),
                         (*budget).at("result").at("eta_uncertainty").get<double>()};
    const auto& fit = reconstruction.at("efficiency_fit");
    s["agreement"] = to_json(check_agreement(b, fit.at("eta_hat").get<double>(), fit.at("eta_stderr").get<double>()));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("incomplete report or budget document: ") + e.what());
  }
  return s;
}

/// Flattens a JSON document into `a.b.c=value` lines.
inline std::string flatten_key_value(const nlohmann::ordered_json& j, const std::string& prefix = "") {
  std::string out;
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) out += flatten_key_value(v, prefix.empty() ? k : prefix + "." + k);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) out += flatten_key_value(j[i], prefix + "." + std::to_string(i));
  } else if (j.is_string()) {
    out += prefix + "=" + j.get<std::string>() + "\n";
  } else if (j.is_number_float()) {
    out += prefix + "=" + format_double(j.get<double>()) + "\n";
  } else if (j.is_null()) {
    out += prefix + "=absent\n";
  } else {
    out += prefix + "=" + j.dump() + "\n";
  }
  return out;
}

// --- plot tables ---------------------------------------------------------------

using TableMetadata = std::vector<std::pair<std::string, std::string>>;

inline void write_profile_table(std::ostream& os, const RadialWignerProfile& p, const TableMetadata& meta) {
  os << "# table=wigner_radial\n# format_version=" << kReportFormatVersion << '\n';
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
  os << "# columns=R W" << (p.stderr_values.empty() ? "" : " W_stderr") << '\n';
  for (std::size_t i = 0; i < p.radii.size(); ++i) {
    os << format_double(p.radii[i]) << ' ' << format_double(p.values[i]);
    if (!p.stderr_values.empty()) os << ' ' << format_double(p.stderr_values[i]);
    os << '\n';
  }
}

inline void write_histogram_table(std::ostream& os, const MarginalHistogram& h, const TableMetadata& meta) {
  os << "# table=marginal_histogram\n# format_version=" << kReportFormatVersion << '\n';
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
  os << "# n_total=" << h.n_total << "\n# underflow=" << h.underflow << "\n# overflow=" << h.overflow << '\n';
  os << "# columns=X count density\n";
  for (std::size_t i = 0; i < h.bins(); ++i) {
    if (h.counts[i] == 0) continue;
    os << format_double(h.center(i)) << ' ' << h.counts[i] << ' ' << format_double(h.density(i)) << '\n';
  }
}

}  // namespace homodyne
