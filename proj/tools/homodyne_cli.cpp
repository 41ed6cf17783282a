// homodyne: simulate -> reconstruct -> budget -> report.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "homodyne/homodyne.hpp"

namespace {

// Exit-status contract.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;

class IoError : public homodyne::Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// All outputs of a command are rendered first and written together, so a
// failure never leaves a partial set of files behind.
void write_files(const std::vector<std::pair<std::string, std::string>>& files) {
  for (const auto& [path, content] : files) {
    const std::string tmp = path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot open '" + tmp + "' for writing");
      out << content;
      if (!out) throw IoError("failed writing '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
  }
}

nlohmann::ordered_json parse_json_file(const std::string& path) {
  try {
    return nlohmann::ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw homodyne::FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

struct SimulateArgs {
  homodyne::RunSpec spec;
  unsigned threads = 1;
  std::string output;
};

struct ReconstructArgs {
  std::string input;
  std::string output_prefix;
  double bandwidth_scale = 1.0;
  std::string fit_method = "mle";
  std::string calibration = "moments";
  double grid_max = 6.0;
  std::size_t grid_points = 2001;
  std::size_t radial_points = 301;
  std::size_t bootstrap = 50;
  std::uint64_t bootstrap_seed = 0x5eed;
  std::string factors;  // optional budget factor file folded into the report
  bool with_budget = false;
};

struct BudgetArgs {
  std::string factors;
  std::string output;
};

struct ReportArgs {
  std::string reconstruction;
  std::string budget;
  std::string output;
};

std::vector<homodyne::EfficiencyFactor> load_factors(const std::string& path) {
  if (path.empty()) return homodyne::default_budget_factors();
  std::istringstream in(read_file(path));
  return homodyne::parse_factors(in);
}

int run_simulate(const SimulateArgs& args) {
  const auto samples = homodyne::generate_run(args.spec, args.threads);
  std::ostringstream body;
  homodyne::write_dataset(body, homodyne::make_dataset(args.spec, samples));
  if (args.output.empty() || args.output == "-") {
    std::cout << body.str();
  } else {
    write_files({{args.output, body.str()}});
    std::cerr << "wrote " << samples.size() << " samples to " << args.output << '\n';
  }
  return kExitOk;
}

int run_reconstruct(const ReconstructArgs& args) {
  homodyne::Dataset data;
  {
    std::istringstream in(read_file(args.input));
    data = homodyne::read_dataset(in);
  }
  homodyne::ReconstructionOptions options;
  options.bandwidth_scale = args.bandwidth_scale;
  options.fit.method = args.fit_method == "hist" ? homodyne::FitMethod::histogram : homodyne::FitMethod::mle;
  options.calibration.method =
      args.calibration == "hist" ? homodyne::CalibrationMethod::histogram : homodyne::CalibrationMethod::moments;
  options.grid_max = args.grid_max;
  options.grid_points = args.grid_points;
  options.radial_points = args.radial_points;
  options.bootstrap_replicates = args.bootstrap;
  options.bootstrap_seed = args.bootstrap_seed;

  homodyne::Reconstruction rec = homodyne::reconstruct(data, options);
  if (args.with_budget) {
    const auto factors = load_factors(args.factors);
    rec.report.budget = homodyne::combine(factors);
    rec.report.agreement = homodyne::check_agreement(*rec.report.budget, rec.report.efficiency_fit.eta_hat,
                                                     rec.report.efficiency_fit.eta_stderr);
  }

  const std::string kv = homodyne::to_key_value(rec.report);
  std::cout << kv;
  if (args.output_prefix.empty()) return kExitOk;

  const homodyne::TableMetadata meta = {
      {"grid_max", homodyne::format_double(args.grid_max)},
      {"grid_points", std::to_string(args.grid_points)},
      {"bandwidth", homodyne::format_double(rec.density.bandwidth)},
      {"eta_hat", homodyne::format_double(rec.report.efficiency_fit.eta_hat)},
      {"version", rec.report.provenance.version},
  };
  std::ostringstream profile, hist;
  homodyne::write_profile_table(profile, rec.profile, meta);
  homodyne::write_histogram_table(hist, rec.histogram, meta);
  write_files({
      {args.output_prefix + ".report.txt", kv},
      {args.output_prefix + ".report.json", homodyne::to_json(rec.report).dump(2) + "\n"},
      {args.output_prefix + ".wigner.tsv", profile.str()},
      {args.output_prefix + ".hist.tsv", hist.str()},
  });
  return kExitOk;
}

int run_budget(const BudgetArgs& args) {
  const auto factors = load_factors(args.factors);
  const homodyne::BudgetResult result = homodyne::combine(factors);
  homodyne::KeyValueWriter w;
  for (const auto& f : factors) {
    w.add("factor." + f.name + ".effective_value", f.effective_value());
    w.add("factor." + f.name + ".effective_uncertainty", f.effective_uncertainty());
  }
  homodyne::append_key_values(w, result);
  std::cout << w.str();
  if (!args.output.empty()) write_files({{args.output, homodyne::budget_to_json(factors, result).dump(2) + "\n"}});
  return kExitOk;
}

int run_report(const ReportArgs& args) {
  const auto reconstruction = parse_json_file(args.reconstruction);
  std::optional<nlohmann::ordered_json> budget;
  if (!args.budget.empty()) budget = parse_json_file(args.budget);
  const auto summary = homodyne::make_summary(reconstruction, budget);
  std::cout << homodyne::flatten_key_value(summary);
  if (!args.output.empty()) write_files({{args.output, summary.dump(2) + "\n"}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-randomized homodyne tomography of the single-photon Fock state"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value / TOML file with default flag values")->envname("HOMODYNE_CONFIG");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic vacuum + Fock dataset");
  simulate->add_option("--eta", sim.spec.eta_true, "Efficiency of the Fock-run mixture")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--n-vacuum", sim.spec.n_vacuum, "Vacuum-run sample count")->capture_default_str();
  simulate->add_option("--n-fock", sim.spec.n_fock, "Fock-run sample count")->capture_default_str();
  simulate->add_option("--seed", sim.spec.seed, "Master random seed")->capture_default_str();
  simulate->add_option("--scale", sim.spec.detector.scale, "Raw units per dimensionless quadrature")
      ->capture_default_str();
  simulate->add_option("--offset", sim.spec.detector.offset, "Raw-unit origin")->capture_default_str();
  simulate->add_option("--dark-fraction", sim.spec.detector.dark_fraction,
                       "Fraction of Fock-run triggers that yield vacuum")
      ->capture_default_str();
  simulate->add_option("--threads", sim.threads, "Worker threads (output does not depend on it)")
      ->capture_default_str();
  simulate->add_option("-o,--output", sim.output, "Dataset file ('-' for stdout)")->required();

  ReconstructArgs rec;
  auto* reconstruct = app.add_subcommand("reconstruct", "Calibrate, fit eta, reconstruct W(R) and rho_nn");
  reconstruct->add_option("input", rec.input, "Dataset file")->required();
  reconstruct->add_option("-o,--output", rec.output_prefix,
                          "Output prefix for .report.txt/.report.json/.wigner.tsv/.hist.tsv");
  reconstruct->add_option("--bandwidth-scale", rec.bandwidth_scale, "Multiplier on Silverman's bandwidth")
      ->capture_default_str()->check(CLI::PositiveNumber);
  reconstruct->add_option("--fit-method", rec.fit_method, "Efficiency estimator")
      ->capture_default_str()->check(CLI::IsMember({"mle", "hist"}));
  reconstruct->add_option("--calibration", rec.calibration, "Vacuum calibration method")
      ->capture_default_str()->check(CLI::IsMember({"moments", "hist"}));
  reconstruct->add_option("--grid-max", rec.grid_max, "Extent of the quadrature grid")
      ->capture_default_str()->check(CLI::PositiveNumber);
  reconstruct->add_option("--grid-points", rec.grid_points, "Quadrature grid points")
      ->capture_default_str()->check(CLI::Range(5, 1000000));
  reconstruct->add_option("--radial-points", rec.radial_points, "Points in the W(R) table")
      ->capture_default_str()->check(CLI::Range(4, 100000));
  reconstruct->add_option("--bootstrap", rec.bootstrap, "Bootstrap replicates for W(R) errors")
      ->capture_default_str();
  reconstruct->add_option("--bootstrap-seed", rec.bootstrap_seed, "Seed of the bootstrap")->capture_default_str();
  reconstruct->add_flag("--with-budget", rec.with_budget, "Fold the efficiency budget into the report");
  reconstruct->add_option("--factors", rec.factors, "Budget factor file (default: built-in factors)");

  BudgetArgs bud;
  auto* budget = app.add_subcommand("budget", "Combine efficiency factors");
  budget->add_option("--factors", bud.factors,
                     "Factor file, one 'name value uncertainty kind' per line (default: built-in factors)");
  budget->add_option("-o,--output", bud.output, "Budget JSON output");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Merge a reconstruction report and a budget");
  report->add_option("--reconstruction", rep.reconstruction, "<prefix>.report.json from reconstruct")->required();
  report->add_option("--budget", rep.budget, "Budget JSON from the budget command");
  report->add_option("-o,--output", rep.output, "Summary JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*reconstruct) return run_reconstruct(rec);
    if (*budget) return run_budget(bud);
    if (*report) return run_report(rep);
  } catch (const homodyne::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const homodyne::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}
