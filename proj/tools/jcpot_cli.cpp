// jcpot command-line front end: scenario generation, proportion estimation,
// adaptation, benchmarking and the simplex grid check.
//
// Exit codes: 0 success, 2 invalid config, 3 data error, 4 numerical
// failure, 5 non-convergence under --strict.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jcpot/error.hpp"
#include "jcpot/harness/benchmark.hpp"
#include "jcpot/harness/csv.hpp"
#include "jcpot/harness/grid_oracle.hpp"
#include "jcpot/harness/metrics.hpp"
#include "jcpot/harness/report.hpp"
#include "jcpot/solver.hpp"

namespace {

using jcpot::ErrorKind;
using jcpot::harness::RunConfig;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitNotConverged = 5;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidParameter:
      return kExitConfig;
    case ErrorKind::kInvalidInput:
    case ErrorKind::kParse:
    case ErrorKind::kMissingClass:
      return kExitData;
    case ErrorKind::kNumericalUnderflow:
    case ErrorKind::kDegenerateKernel:
    case ErrorKind::kDegenerateMass:
      return kExitNumerical;
  }
  return kExitData;
}

int exit_code_for(std::string_view kind) {
  for (ErrorKind k : {ErrorKind::kInvalidInput, ErrorKind::kInvalidParameter,
                      ErrorKind::kNumericalUnderflow, ErrorKind::kDegenerateKernel,
                      ErrorKind::kDegenerateMass, ErrorKind::kMissingClass, ErrorKind::kParse}) {
    if (jcpot::to_string(k) == kind) return exit_code_for(k);
  }
  return kExitData;
}

std::vector<double> to_std(const jcpot::Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Raw flag values; resolved into a RunConfig after parsing.
struct CliOptions {
  std::vector<std::string> methods{"jcpot-lp"};
  std::string lambda = "uniform";
  std::vector<int> sweep;
};

void parse_lambda(const std::string& text, RunConfig& config) {
  if (text == "uniform" || text.empty()) {
    config.lambda.resize(0);
    return;
  }
  std::vector<double> weights;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      weights.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      jcpot::fail(ErrorKind::kInvalidParameter, "lambda entry '" + item + "' is not a number");
    }
  }
  config.lambda = Eigen::Map<const jcpot::Vector>(weights.data(), static_cast<jcpot::Index>(weights.size()));
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) jcpot::fail(ErrorKind::kInvalidInput, "cannot write " + path);
  out << text;
}

jcpot::harness::Task load_task(const RunConfig& config) {
  if (!config.source_paths.empty()) return jcpot::harness::load_csv_task(config);
  return jcpot::harness::generated_task(config, config.generator.num_sources,
                                        jcpot::harness::derive_seed(config.seed, 0));
}

int cmd_gen(const RunConfig& config, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const std::uint64_t seed = jcpot::harness::derive_seed(config.seed, 0);
  jcpot::datagen::ScenarioParams params = config.generator;
  params.seed = seed;
  const auto scenario = jcpot::datagen::gen_multisource_scenario(params);

  fs::create_directories(out_dir);
  Json meta;
  meta["seed"] = seed;
  Json files = Json::array();
  for (std::size_t k = 0; k < scenario.sources.size(); ++k) {
    const std::string name = "source_" + std::to_string(k) + ".csv";
    jcpot::harness::save_labeled_csv((fs::path(out_dir) / name).string(), scenario.sources[k]);
    files.push_back(name);
  }
  meta["sources"] = files;
  meta["source_class0"] = scenario.source_class0;

  jcpot::LabeledDataset target{scenario.target_points,
                               std::vector<int>(scenario.truth.target_labels.size(), -1)};
  jcpot::harness::save_labeled_csv((fs::path(out_dir) / "target.csv").string(), target);
  target.labels = scenario.truth.target_labels;
  jcpot::harness::save_labeled_csv((fs::path(out_dir) / "target_truth.csv").string(), target);
  meta["target"] = "target.csv";
  meta["target_truth"] = "target_truth.csv";
  meta["target_proportions"] = to_std(scenario.truth.target_proportions.values);
  write_text((fs::path(out_dir) / "scenario.json").string(), meta.dump(2) + "\n");
  return kExitOk;
}

int cmd_fit(const RunConfig& config, const std::string& out) {
  const auto task = load_task(config);
  jcpot::JcpotProblem problem{task.sources, task.target_points, task.num_classes,
                              config.epsilon, config.lambda,   config.tol,
                              config.max_iter};
  const auto sol = jcpot::jcpot_fit(problem);
  Json j;
  j["h_hat"] = to_std(sol.h_hat.values);
  j["h_raw"] = to_std(sol.h_raw);
  j["iterations"] = sol.iterations;
  j["converged"] = sol.converged;
  j["h_trace"] = sol.h_trace;
  j["col_residuals"] = sol.col_residuals;
  j["epsilon"] = config.epsilon;
  j["tol"] = config.tol;
  if (task.true_proportions) {
    j["l1_error"] = jcpot::harness::l1_proportion_error(sol.h_hat, *task.true_proportions);
  }
  write_text(out, j.dump(2) + "\n");
  return (config.strict && !sol.converged) ? kExitNotConverged : kExitOk;
}

int cmd_adapt(const RunConfig& config, const std::string& out) {
  const auto task = load_task(config);
  const auto method = config.methods.front();
  const auto outcome = jcpot::harness::run_method(method, task, config,
                                                  jcpot::harness::derive_seed(config.seed, 0));
  std::ostringstream csv;
  jcpot::harness::write_predictions_csv(csv, outcome.prediction);
  write_text(out, csv.str());
  if (task.truth) {
    std::vector<int> truth;
    for (int i : outcome.evaluated_points) truth.push_back((*task.truth)[static_cast<std::size_t>(i)]);
    std::cerr << to_string(method) << " accuracy "
              << jcpot::harness::accuracy(outcome.prediction.labels, truth) << "\n";
  }
  return (config.strict && !outcome.converged) ? kExitNotConverged : kExitOk;
}

int cmd_bench(const RunConfig& config, const std::string& out, const std::string& table_csv,
              bool timing) {
  const auto report = jcpot::harness::run_benchmark(config);
  write_text(out, jcpot::harness::serialize_report(report, timing));
  if (!table_csv.empty()) {
    std::ofstream table(table_csv, std::ios::binary);
    if (!table) jcpot::fail(ErrorKind::kInvalidInput, "cannot write " + table_csv);
    jcpot::harness::write_summary_csv(table, report);
  }
  for (const auto& r : report.runs) {
    if (!r.ok) {
      std::cerr << "run " << r.method << " K=" << r.num_sources << " rep=" << r.repetition
                << " failed: " << r.error_kind << ": " << r.error_message << "\n";
      return exit_code_for(r.error_kind);
    }
  }
  return (config.strict && report.any_unconverged()) ? kExitNotConverged : kExitOk;
}

int cmd_oracle(const RunConfig& config, double step, const std::string& out) {
  const auto task = load_task(config);
  if (task.num_classes != 2) {
    jcpot::fail(ErrorKind::kInvalidInput, "the grid oracle supports two classes only");
  }
  jcpot::harness::GridOracleOptions options;
  options.epsilon = config.epsilon;
  options.step = step;
  options.tol = config.tol;
  options.max_iter = config.max_iter;
  options.lambda = config.lambda;
  const auto grid = jcpot::harness::simplex_grid_oracle(task.sources, task.target_points, options);

  jcpot::JcpotProblem problem{task.sources, task.target_points, 2, config.epsilon,
                              config.lambda, config.tol,        config.max_iter};
  const auto sol = jcpot::jcpot_fit(problem);

  Json j;
  j["argmin"] = to_std(grid.argmin.values);
  j["jcpot_h_hat"] = to_std(sol.h_hat.values);
  j["jcpot_vs_oracle_l1"] = jcpot::harness::l1_proportion_error(sol.h_hat, grid.argmin);
  if (task.true_proportions) {
    j["true_proportions"] = to_std(task.true_proportions->values);
    j["oracle_vs_truth_l1"] =
        jcpot::harness::l1_proportion_error(grid.argmin, *task.true_proportions);
  }
  j["skipped"] = grid.skipped;
  j["unconverged_solves"] = grid.unconverged;
  Json table = Json::array();
  for (std::size_t i = 0; i < grid.grid.size(); ++i) {
    table.push_back(Json{{"pi", grid.grid[i]}, {"objective", grid.objective[i]}});
  }
  j["objective"] = table;
  write_text(out, j.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint class-proportion and optimal-transport estimation for multi-source domain adaptation"};
  app.set_config("--config", "", "TOML/INI file with option values; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig config;
  CliOptions raw;
  auto& gen = config.generator;

  app.add_option("--method", raw.methods,
                 "jcpot-lp | jcpot-pt | otda-lp | otda-pt | no-adapt | target-only (repeatable)")
      ->capture_default_str();
  app.add_option("--epsilon", config.epsilon, "entropic regularization on max-scaled costs")
      ->capture_default_str();
  app.add_option("--tol", config.tol, "convergence threshold")->capture_default_str();
  app.add_option("--max-iter", config.max_iter, "iteration cap")->capture_default_str();
  app.add_option("--lambda", raw.lambda, "'uniform' or comma-separated domain weights")
      ->capture_default_str();
  app.add_option("--seed", config.seed, "master seed")->capture_default_str();
  app.add_option("--repetitions", config.repetitions, "runs per sweep point")->capture_default_str();
  app.add_flag("--strict", config.strict, "exit with code 5 when a solver does not converge");

  app.add_option("--num-sources", gen.num_sources, "generated source domains")->capture_default_str();
  app.add_option("--sources-sweep", raw.sweep, "list of source-domain counts (bench)")
      ->delimiter(',');
  app.add_option("--n-source", gen.n_source, "instances per source domain")->capture_default_str();
  app.add_option("--n-target", gen.n_target, "target instances")->capture_default_str();
  app.add_option("--target-prop", gen.target_class0, "target class-0 proportion")
      ->capture_default_str();
  app.add_option("--prop-low", gen.prop_low, "lower bound of source class-0 proportions")
      ->capture_default_str();
  app.add_option("--prop-high", gen.prop_high, "upper bound of source class-0 proportions")
      ->capture_default_str();
  app.add_option("--fixed-source-prop", gen.fixed_source_class0,
                 "use this class-0 proportion for every source instead of drawing one");
  app.add_option("--dim", gen.dim, "feature dimension")->capture_default_str();
  app.add_option("--sigma", gen.sigma, "class standard deviation")->capture_default_str();
  app.add_option("--separation", gen.separation, "class-1 mean offset per coordinate")
      ->capture_default_str();

  app.add_option("--source", config.source_paths, "labeled source CSV (repeatable)");
  app.add_option("--target", config.target_path, "target CSV");
  app.add_option("--target-labels", config.target_labels_path,
                 "CSV with true target labels, used for scoring only");

  std::string out_dir = "scenario";
  std::string out;
  std::string table_csv;
  double step = 0.01;

  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic scenario as CSV files");
  gen_cmd->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  auto* fit_cmd = app.add_subcommand("fit", "estimate target proportions and couplings");
  fit_cmd->add_option("--out", out, "output JSON (default stdout)");
  auto* adapt_cmd = app.add_subcommand("adapt", "predict target labels");
  adapt_cmd->add_option("--out", out, "predictions CSV (default stdout)");
  auto* bench_cmd = app.add_subcommand("bench", "run repetitions and sweeps into a report");
  bench_cmd->add_option("--out", out, "report JSON (default stdout)");
  bench_cmd->add_option("--table-csv", table_csv, "summary table CSV");
  bool no_timing = false;
  bench_cmd->add_flag("--no-timing", no_timing, "omit wall-clock fields from the report");
  auto* oracle_cmd = app.add_subcommand("oracle", "grid search of the proportion objective (C = 2)");
  oracle_cmd->add_option("--step", step, "grid resolution")->capture_default_str();
  oracle_cmd->add_option("--out", out, "output JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    config.methods.clear();
    for (const auto& m : raw.methods) config.methods.push_back(jcpot::harness::parse_method(m));
    parse_lambda(raw.lambda, config);
    gen.fixed_sources = app.count("--fixed-source-prop") > 0;
    config.sources_sweep = raw.sweep;
    config.validate();

    if (gen_cmd->parsed()) return cmd_gen(config, out_dir);
    if (fit_cmd->parsed()) return cmd_fit(config, out);
    if (adapt_cmd->parsed()) return cmd_adapt(config, out);
    if (bench_cmd->parsed()) return cmd_bench(config, out, table_csv, !no_timing);
    if (oracle_cmd->parsed()) return cmd_oracle(config, step, out);
  } catch (const jcpot::Error& e) {
    std::cerr << "error [" << jcpot::to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}
