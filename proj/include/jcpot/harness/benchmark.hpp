#pragma once

// Benchmark orchestration: method dispatch, repetitions, K sweeps and
// aggregation into a Report.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jcpot/adaptation.hpp"
#include "jcpot/dataset.hpp"
#include "jcpot/datagen.hpp"
#include "jcpot/linalg.hpp"
#include "jcpot/ot_core.hpp"

namespace jcpot::harness {

enum class Method { kJcpotLp, kJcpotPt, kOtdaLp, kOtdaPt, kNoAdapt, kTargetOnly };

std::string_view to_string(Method method);
// Throws kInvalidParameter for unknown names.
Method parse_method(std::string_view name);

struct RunConfig {
  std::vector<Method> methods{Method::kJcpotLp};
  double epsilon = ot::kDefaultEpsilon;
  double tol = ot::kDefaultTolerance;
  int max_iter = ot::kDefaultMaxIter;
  Vector lambda;  // empty means uniform
  std::uint64_t seed = 0;
  int repetitions = 1;

  // Generated data (used when source_paths is empty).
  datagen::ScenarioParams generator;
  std::vector<int> sources_sweep;  // empty means {generator.num_sources}

  // CSV data. Target labels, when present, are used for scoring only.
  std::vector<std::string> source_paths;
  std::string target_path;
  std::string target_labels_path;

  bool strict = false;

  // Throws kInvalidParameter on an unusable configuration.
  void validate() const;
};

// Seed of repetition `rep`; a pure function of (master, rep).
std::uint64_t derive_seed(std::uint64_t master, int rep);

// Inputs of one adaptation task. `truth` is consumed by scoring code only.
struct Task {
  std::vector<LabeledDataset> sources;
  Matrix target_points;
  std::optional<std::vector<int>> truth;
  std::optional<ProportionVector> true_proportions;
  int num_classes = 0;
};

struct MethodOutcome {
  Prediction prediction;
  std::vector<int> evaluated_points;  // target indices scored (target-only uses a split)
  std::optional<ProportionVector> h_hat;
  std::vector<double> h_trace;
  int iterations = 0;
  bool converged = true;
  std::optional<double> mass_leakage;
};

// Runs one method on one task. Solver errors propagate as jcpot::Error.
MethodOutcome run_method(Method method, const Task& task, const RunConfig& config,
                         std::uint64_t seed);

struct RunRecord {
  std::string method;
  int num_sources = 0;
  int repetition = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error_kind;
  std::string error_message;
  std::optional<double> accuracy;
  std::vector<double> h_hat;
  std::optional<double> l1_error;
  int iterations = 0;
  bool converged = true;
  std::vector<double> h_trace;
  std::optional<double> mass_leakage;
  std::vector<int> evaluated_points;
  std::vector<int> predictions;
  std::vector<int> true_labels;
  // Excluded from the deterministic report body.
  std::vector<std::pair<std::string, double>> wall_clock_ms;

  bool operator==(const RunRecord&) const = default;
};

struct SweepSummary {
  std::string method;
  int num_sources = 0;
  int runs = 0;
  int failures = 0;
  std::optional<double> mean_accuracy;
  std::optional<double> std_accuracy;
  std::optional<double> mean_l1_error;
  std::optional<double> std_l1_error;

  bool operator==(const SweepSummary&) const = default;
};

inline constexpr int kReportSchemaVersion = 1;

struct Report {
  int schema_version = kReportSchemaVersion;
  std::string config_json;  // config echo, serialized
  std::vector<RunRecord> runs;
  std::vector<SweepSummary> summary;

  bool operator==(const Report&) const = default;
  // True when any run failed to converge.
  bool any_unconverged() const;
  bool any_failed() const;
};

Task load_csv_task(const RunConfig& config);
Task generated_task(const RunConfig& config, int num_sources, std::uint64_t seed);

Report run_benchmark(const RunConfig& config);

}  // namespace jcpot::harness
