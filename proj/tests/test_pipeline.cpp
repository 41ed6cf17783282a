#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include <gtest/gtest.h>

#include "homodyne/homodyne.hpp"

namespace {

homodyne::Dataset simulate(const homodyne::RunSpec& spec) {
  return homodyne::make_dataset(spec, homodyne::generate_run(spec));
}

homodyne::ReconstructionOptions quick_options() {
  homodyne::ReconstructionOptions o;
  o.bootstrap_replicates = 8;
  o.radial_points = 61;
  return o;
}

const homodyne::Reconstruction& full_scale() {
  static const homodyne::Reconstruction rec = homodyne::reconstruct(simulate(homodyne::RunSpec{}), quick_options());
  return rec;
}

}  // namespace

TEST(Reconstruct, FullScaleRun) {
  const auto& r = full_scale().report;
  EXPECT_EQ(r.analysis_source, homodyne::Source::fock_run);
  EXPECT_GE(r.efficiency_fit.eta_hat, 0.51);
  EXPECT_LE(r.efficiency_fit.eta_hat, 0.60);
  EXPECT_LT(r.wigner_origin.value, 0.0);
  EXPECT_GT(r.wigner_origin.stderr_value, 0.0);
  EXPECT_TRUE(r.wigner_origin.consistent);
  ASSERT_EQ(r.diagonals.size(), 4u);
  EXPECT_NEAR(r.diagonals[1].rho_nn, 0.553, 3.0 * r.diagonals[1].sigma_nn);
  EXPECT_NEAR(r.calibration.scale_hat, 1.0, 0.005);
  EXPECT_NEAR(r.wigner_origin.from_eta_fit, (2.0 / std::numbers::pi) * (1.0 - 2.0 * r.efficiency_fit.eta_hat), 1e-15);
}

TEST(Reconstruct, BandwidthSensitivityIsReported) {
  const auto& rec = full_scale();
  const auto& s = rec.report.bandwidth_sensitivity;
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].scale, 0.5);
  EXPECT_EQ(s[2].scale, 2.0);
  EXPECT_NEAR(s[1].bandwidth, rec.report.bandwidth, 1e-15);
  EXPECT_NEAR(s[1].wigner_origin, rec.report.wigner_origin.value, 1e-12);
  EXPECT_NEAR(s[0].bandwidth * 4.0, s[2].bandwidth, 1e-15);
  // More smoothing pulls the origin towards the positive Gaussian envelope.
  EXPECT_LT(s[0].wigner_origin, s[2].wigner_origin);
}

TEST(Reconstruct, ProfileAndTablesAreConsistent) {
  const auto& rec = full_scale();
  EXPECT_EQ(rec.profile.radii.size(), 61u);
  EXPECT_EQ(rec.profile.stderr_values.size(), 61u);
  EXPECT_NEAR(rec.profile.norm(), 1.0, 0.02);
  EXPECT_EQ(rec.histogram.all_samples(), 12'000u);
  std::ostringstream table;
  homodyne::write_profile_table(table, rec.profile, {{"bandwidth", "x"}});
  EXPECT_NE(table.str().find("# columns=R W W_stderr"), std::string::npos);
  EXPECT_NE(table.str().find("# bandwidth=x"), std::string::npos);
}

TEST(Reconstruct, Deterministic) {
  homodyne::RunSpec spec;
  spec.n_vacuum = 20'000;
  spec.n_fock = 5'000;
  spec.seed = 99;
  const auto a = homodyne::reconstruct(simulate(spec), quick_options());
  const auto b = homodyne::reconstruct(simulate(spec), quick_options());
  EXPECT_EQ(homodyne::to_key_value(a.report), homodyne::to_key_value(b.report));
  EXPECT_EQ(homodyne::to_json(a.report).dump(), homodyne::to_json(b.report).dump());
}

TEST(Reconstruct, VacuumOnlyDataset) {
  homodyne::RunSpec spec;
  spec.n_fock = 0;
  spec.seed = 3;
  const auto rec = homodyne::reconstruct(simulate(spec), quick_options());
  const auto& r = rec.report;
  EXPECT_EQ(r.analysis_source, homodyne::Source::vacuum_run);
  EXPECT_LT(r.efficiency_fit.eta_hat, 0.01);
  EXPECT_TRUE(r.efficiency_fit.at_boundary);
  EXPECT_NEAR(r.diagonals[0].rho_nn, 1.0, 3.0 * r.diagonals[0].sigma_nn);
  EXPECT_NEAR(r.diagonals[1].rho_nn, 0.0, 3.0 * r.diagonals[1].sigma_nn);
  EXPECT_GT(r.wigner_origin.value, 0.5);
}

TEST(Reconstruct, CalibrationUndoesTheDetector) {
  homodyne::RunSpec spec;
  spec.n_vacuum = 50'000;
  spec.n_fock = 5'000;
  spec.detector.scale = 37.0;
  spec.detector.offset = -4.0;
  const auto scaled = homodyne::reconstruct(simulate(spec), quick_options());
  spec.detector = {};
  const auto unit = homodyne::reconstruct(simulate(spec), quick_options());
  EXPECT_NEAR(scaled.report.efficiency_fit.eta_hat, unit.report.efficiency_fit.eta_hat, 1e-9);
  EXPECT_NEAR(scaled.report.calibration.scale_hat, 37.0 * unit.report.calibration.scale_hat, 1e-9);
}

TEST(Reconstruct, RejectsDatasetWithoutEnoughVacuum) {
  homodyne::RunSpec spec;
  spec.n_vacuum = 10;
  spec.n_fock = 5000;
  EXPECT_THROW(homodyne::reconstruct(simulate(spec), quick_options()), homodyne::DataError);
}

TEST(Report, KeyValueAndJsonCarryTheSameFields) {
  const auto& r = full_scale().report;
  const std::string kv = homodyne::to_key_value(r);
  const auto j = homodyne::to_json(r);
  EXPECT_NE(kv.find("format=homodyne-report\n"), std::string::npos);
  EXPECT_NE(kv.find("efficiency_fit.eta_hat=" + homodyne::format_double(r.efficiency_fit.eta_hat) + "\n"),
            std::string::npos);
  EXPECT_NE(kv.find("budget=absent\n"), std::string::npos);
  EXPECT_EQ(j["format_version"], 1);
  EXPECT_EQ(j["efficiency_fit"]["eta_hat"].get<double>(), r.efficiency_fit.eta_hat);
  EXPECT_EQ(j["wigner_origin"]["value"].get<double>(), r.wigner_origin.value);
  EXPECT_TRUE(j["budget"].is_null());
  EXPECT_EQ(j["provenance"]["config_hash"], homodyne::fnv1a_hex(homodyne::canonical_options(quick_options())));
  EXPECT_EQ(j["provenance"]["dataset"]["seed"], "42");
}

TEST(Report, ConfigHashTracksOptions) {
  auto o = quick_options();
  const auto h1 = homodyne::fnv1a_hex(homodyne::canonical_options(o));
  o.bandwidth_scale = 2.0;
  EXPECT_NE(h1, homodyne::fnv1a_hex(homodyne::canonical_options(o)));
  EXPECT_EQ(homodyne::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(homodyne::fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Summary, WithBudgetRunsAgreementCheck) {
  const auto recon = homodyne::to_json(full_scale().report);
  const auto factors = homodyne::default_budget_factors();
  const auto budget = homodyne::budget_to_json(factors, homodyne::combine(factors));
  const auto s = homodyne::make_summary(recon, std::make_optional(budget));
  EXPECT_EQ(s["format"], "homodyne-summary");
  EXPECT_EQ(s["budget_status"], "present");
  EXPECT_TRUE(s["agreement"]["pass"].get<bool>());
  EXPECT_NE(homodyne::flatten_key_value(s).find("agreement.pass=true\n"), std::string::npos);
}

TEST(Summary, BudgetAbsent) {
  const auto s = homodyne::make_summary(homodyne::to_json(full_scale().report), std::nullopt);
  EXPECT_EQ(s["budget_status"], "absent");
  EXPECT_TRUE(s["budget"].is_null());
  EXPECT_NE(homodyne::flatten_key_value(s).find("budget=absent\n"), std::string::npos);
}

TEST(Summary, VersionAndFormatMismatch) {
  auto recon = homodyne::to_json(full_scale().report);
  const auto factors = homodyne::default_budget_factors();
  auto budget = homodyne::budget_to_json(factors, homodyne::combine(factors));
  auto bad_version = budget;
  bad_version["format_version"] = 2;
  EXPECT_THROW(homodyne::make_summary(recon, std::make_optional(bad_version)), homodyne::FormatError);
  EXPECT_THROW(homodyne::make_summary(budget, std::make_optional(budget)), homodyne::FormatError);
  recon["format_version"] = 0;
  EXPECT_THROW(homodyne::make_summary(recon, std::make_optional(budget)), homodyne::FormatError);
  recon.erase("format_version");
  EXPECT_THROW(homodyne::make_summary(recon, std::nullopt), homodyne::FormatError);
  auto incomplete = homodyne::to_json(full_scale().report);
  incomplete.erase("efficiency_fit");
  EXPECT_THROW(homodyne::make_summary(incomplete, std::make_optional(budget)), homodyne::FormatError);
}
