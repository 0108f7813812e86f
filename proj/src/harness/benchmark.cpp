#include "jcpot/harness/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "jcpot/error.hpp"
#include "jcpot/harness/csv.hpp"
#include "jcpot/harness/metrics.hpp"
#include "jcpot/harness/report.hpp"
#include "jcpot/solver.hpp"

namespace jcpot::harness {

namespace {

constexpr double kTrainFraction = 0.8;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::vector<int> all_indices(Index n) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

// Per-class 80/20 split of target indices; returns (train, eval).
std::pair<std::vector<int>, std::vector<int>> stratified_split(const std::vector<int>& labels,
                                                               int num_classes,
                                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> train;
  std::vector<int> eval;
  for (int c = 0; c < num_classes; ++c) {
    std::vector<int> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(static_cast<int>(i));
    }
    std::shuffle(members.begin(), members.end(), rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(kTrainFraction * static_cast<double>(members.size())));
    train.insert(train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    eval.insert(eval.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(eval.begin(), eval.end());
  return {train, eval};
}

LabeledDataset rows_of(const Matrix& points, const std::vector<int>& labels,
                       const std::vector<int>& rows) {
  LabeledDataset out{Matrix(static_cast<Index>(rows.size()), points.cols()), {}};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.points.row(static_cast<Index>(r)) = points.row(rows[r]);
    out.labels.push_back(labels[static_cast<std::size_t>(rows[r])]);
  }
  return out;
}

bool is_jcpot(Method m) { return m == Method::kJcpotLp || m == Method::kJcpotPt; }
bool is_otda(Method m) { return m == Method::kOtdaLp || m == Method::kOtdaPt; }

// Shares one JCPOT fit and one OTDA transport between the LP and PT
// decodings of the same task.
class Session {
 public:
  Session(const Task& task, const RunConfig& config, std::uint64_t seed)
      : task_(task), config_(config), seed_(seed) {}

  MethodOutcome run(Method method) {
    if (is_jcpot(method)) return run_jcpot(method);
    if (is_otda(method)) return run_otda(method);
    if (method == Method::kNoAdapt) return run_no_adapt();
    return run_target_only();
  }

  double fit_ms() const { return fit_ms_; }

 private:
  MethodOutcome run_jcpot(Method method) {
    if (!jcpot_) {
      const auto t0 = Clock::now();
      JcpotProblem problem{task_.sources, task_.target_points, task_.num_classes,
                           config_.epsilon,  config_.lambda,       config_.tol,
                           config_.max_iter};
      jcpot_ = jcpot_fit(problem);
      for (const auto& s : task_.sources) ops_.emplace_back(s.labels, task_.num_classes);
      fit_ms_ += elapsed_ms(t0);
    }
    const JcpotSolution& sol = *jcpot_;

    MethodOutcome out;
    out.h_hat = sol.h_hat;
    out.h_trace = sol.h_trace;
    out.iterations = sol.iterations;
    out.converged = sol.converged;
    out.evaluated_points = all_indices(task_.target_points.rows());
    if (method == Method::kJcpotLp) {
      out.prediction = predict_from_scores(label_propagation(sol.couplings, ops_, sol.lambda));
    } else {
      std::vector<LabeledDataset> mapped;
      for (std::size_t k = 0; k < sol.couplings.size(); ++k) {
        const MappedSources m = barycentric_map(sol.couplings[k], task_.target_points);
        LabeledDataset part{m.points, {}};
        for (Index i : m.kept_rows) {
          part.labels.push_back(task_.sources[k].labels[static_cast<std::size_t>(i)]);
        }
        mapped.push_back(std::move(part));
      }
      out.prediction = classify_pt(concatenate(mapped), task_.target_points, task_.num_classes);
    }
    if (task_.truth) {
      double leak = 0.0;
      for (std::size_t k = 0; k < sol.couplings.size(); ++k) {
        leak += sol.lambda(static_cast<Index>(k)) *
                mass_leakage(sol.couplings[k], task_.sources[k].labels, *task_.truth);
      }
      out.mass_leakage = leak;
    }
    return out;
  }

  MethodOutcome run_otda(Method method) {
    if (!otda_) {
      const auto t0 = Clock::now();
      merged_ = concatenate(task_.sources);
      ot::SinkhornOptions options;
      options.epsilon = config_.epsilon;
      options.tol = config_.tol;
      options.max_iter = config_.max_iter;
      otda_ = otda_baseline(merged_, task_.target_points, options, task_.num_classes);
      fit_ms_ += elapsed_ms(t0);
    }
    MethodOutcome out;
    out.prediction = method == Method::kOtdaLp ? otda_->lp : otda_->pt;
    out.iterations = otda_->transport.iterations;
    out.converged = otda_->transport.converged;
    out.evaluated_points = all_indices(task_.target_points.rows());
    if (task_.truth) {
      out.mass_leakage = mass_leakage(otda_->transport.coupling, merged_.labels, *task_.truth);
    }
    return out;
  }

  MethodOutcome run_no_adapt() {
    MethodOutcome out;
    out.prediction = classify_pt(concatenate(task_.sources), task_.target_points, task_.num_classes);
    out.evaluated_points = all_indices(task_.target_points.rows());
    return out;
  }

  MethodOutcome run_target_only() {
    if (!task_.truth) {
      fail(ErrorKind::kInvalidInput, "target-only needs target labels for its training split");
    }
    const auto [train, eval] = stratified_split(*task_.truth, task_.num_classes, seed_);
    const LabeledDataset reference = rows_of(task_.target_points, *task_.truth, train);
    Matrix queries(static_cast<Index>(eval.size()), task_.target_points.cols());
    for (std::size_t r = 0; r < eval.size(); ++r) {
      queries.row(static_cast<Index>(r)) = task_.target_points.row(eval[r]);
    }
    MethodOutcome out;
    out.prediction = classify_pt(reference, queries, task_.num_classes);
    out.evaluated_points = eval;
    return out;
  }

  const Task& task_;
  const RunConfig& config_;
  std::uint64_t seed_;
  double fit_ms_ = 0.0;
  std::optional<JcpotSolution> jcpot_;
  std::vector<ClassOperators> ops_;
  std::optional<OtdaResult> otda_;
  LabeledDataset merged_;
};

std::pair<std::optional<double>, std::optional<double>> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {std::nullopt, std::nullopt};
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(sq / static_cast<double>(xs.size() - 1)) : 0.0;
  return {mean, sd};
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kJcpotLp:
      return "jcpot-lp";
    case Method::kJcpotPt:
      return "jcpot-pt";
    case Method::kOtdaLp:
      return "otda-lp";
    case Method::kOtdaPt:
      return "otda-pt";
    case Method::kNoAdapt:
      return "no-adapt";
    case Method::kTargetOnly:
      return "target-only";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kJcpotLp, Method::kJcpotPt, Method::kOtdaLp, Method::kOtdaPt,
                   Method::kNoAdapt, Method::kTargetOnly}) {
    if (to_string(m) == name) return m;
  }
  fail(ErrorKind::kInvalidParameter, "unknown method '" + std::string(name) + "'");
}

void RunConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::kInvalidParameter, what); };
  if (methods.empty()) bad("at least one method is required");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) bad("epsilon must be positive");
  if (!(tol > 0.0)) bad("tol must be positive");
  if (max_iter < 1) bad("max_iter must be at least 1");
  if (repetitions < 1) bad("repetitions must be at least 1");
  if (lambda.size() > 0) {
    if ((lambda.array() < 0.0).any()) bad("lambda weights must be nonnegative");
    if (std::abs(lambda.sum() - 1.0) > 1e-9) bad("lambda weights must sum to 1");
  }
  std::vector<int> domain_counts;
  if (!source_paths.empty()) {
    if (target_path.empty()) bad("a target CSV is required with source CSVs");
    domain_counts.push_back(static_cast<int>(source_paths.size()));
  } else {
    const auto& g = generator;
    if (g.n_source < 2 || g.n_target < 2) bad("sample sizes must be at least 2");
    if (!(g.prop_low > 0.0 && g.prop_low <= g.prop_high && g.prop_high < 1.0)) {
      bad("proportion range must satisfy 0 < low <= high < 1");
    }
    if (!(g.target_class0 >= 0.0 && g.target_class0 <= 1.0)) bad("target proportion out of range");
    if (!(g.sigma >= 0.0)) bad("sigma must be nonnegative");
    if (g.dim < 1) bad("dimension must be positive");
    if (sources_sweep.empty()) {
      domain_counts.push_back(g.num_sources);
    } else {
      domain_counts = sources_sweep;
    }
  }
  for (int k : domain_counts) {
    if (k < 1) bad("number of source domains must be positive");
    if (lambda.size() > 0 && lambda.size() != k) {
      bad("lambda has " + std::to_string(lambda.size()) + " weights for " + std::to_string(k) +
          " source domains");
    }
  }
}

std::uint64_t derive_seed(std::uint64_t master, int rep) {
  return splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(rep)));
}

MethodOutcome run_method(Method method, const Task& task, const RunConfig& config,
                         std::uint64_t seed) {
  Session session(task, config, seed);
  return session.run(method);
}

bool Report::any_unconverged() const {
  return std::any_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.ok && !r.converged; });
}

bool Report::any_failed() const {
  return std::any_of(runs.begin(), runs.end(), [](const RunRecord& r) { return !r.ok; });
}

Task load_csv_task(const RunConfig& config) {
  Task task;
  for (const auto& path : config.source_paths) {
    task.sources.push_back(load_labeled_csv(path));
    task.num_classes = std::max(task.num_classes, task.sources.back().num_classes());
  }
  LabeledDataset target = load_labeled_csv(config.target_path);
  task.target_points = std::move(target.points);
  if (!config.target_labels_path.empty()) {
    LabeledDataset labels = load_labeled_csv(config.target_labels_path);
    if (labels.size() != task.target_points.rows()) {
      fail(ErrorKind::kInvalidInput, "target label file has a different number of rows");
    }
    target.labels = std::move(labels.labels);
  }
  if (!target.labels.empty() && target.fully_labeled()) task.truth = target.labels;
  return task;
}

Task generated_task(const RunConfig& config, int num_sources, std::uint64_t seed) {
  datagen::ScenarioParams params = config.generator;
  params.num_sources = num_sources;
  params.seed = seed;
  datagen::Scenario scenario = datagen::gen_multisource_scenario(params);
  Task task;
  task.sources = std::move(scenario.sources);
  task.target_points = std::move(scenario.target_points);
  task.truth = std::move(scenario.truth.target_labels);
  task.true_proportions = scenario.truth.target_proportions;
  task.num_classes = 2;
  return task;
}

Report run_benchmark(const RunConfig& config) {
  config.validate();
  Report report;
  report.config_json = config_to_json(config);

  const bool from_csv = !config.source_paths.empty();
  std::vector<int> sweep = config.sources_sweep;
  if (from_csv) {
    sweep = {static_cast<int>(config.source_paths.size())};
  } else if (sweep.empty()) {
    sweep = {config.generator.num_sources};
  }

  std::optional<Task> csv_task;
  if (from_csv) csv_task = load_csv_task(config);

  for (int num_sources : sweep) {
    for (int rep = 0; rep < config.repetitions; ++rep) {
      const std::uint64_t seed = derive_seed(config.seed, rep);
      const auto t_gen = Clock::now();
      std::optional<Task> generated;
      std::string gen_error_kind;
      std::string gen_error;
      if (!from_csv) {
        try {
          generated = generated_task(config, num_sources, seed);
        } catch (const Error& e) {
          gen_error_kind = std::string(jcpot::to_string(e.kind()));
          gen_error = e.what();
        }
      }
      const double gen_ms = elapsed_ms(t_gen);
      const Task* task = from_csv ? &*csv_task : (generated ? &*generated : nullptr);

      std::optional<Session> session;
      if (task != nullptr) session.emplace(*task, config, seed);
      for (Method method : config.methods) {
        RunRecord rec;
        rec.method = std::string(to_string(method));
        rec.num_sources = num_sources;
        rec.repetition = rep;
        rec.seed = seed;
        if (task == nullptr) {
          rec.ok = false;
          rec.error_kind = gen_error_kind;
          rec.error_message = gen_error;
          report.runs.push_back(std::move(rec));
          continue;
        }
        const auto t_run = Clock::now();
        const double fit_before = session->fit_ms();
        try {
          MethodOutcome out = session->run(method);
          rec.iterations = out.iterations;
          rec.converged = out.converged;
          rec.h_trace = out.h_trace;
          rec.mass_leakage = out.mass_leakage;
          rec.predictions = out.prediction.labels;
          if (out.h_hat) {
            rec.h_hat.assign(out.h_hat->values.data(),
                             out.h_hat->values.data() + out.h_hat->values.size());
            if (task->true_proportions) {
              rec.l1_error = l1_proportion_error(*out.h_hat, *task->true_proportions);
            }
          }
          if (task->truth) {
            for (int i : out.evaluated_points) {
              rec.true_labels.push_back((*task->truth)[static_cast<std::size_t>(i)]);
            }
            rec.accuracy = accuracy(rec.predictions, rec.true_labels);
          }
          if (out.evaluated_points.size() != static_cast<std::size_t>(task->target_points.rows())) {
            rec.evaluated_points = out.evaluated_points;
          }
        } catch (const Error& e) {
          rec.ok = false;
          rec.error_kind = std::string(jcpot::to_string(e.kind()));
          rec.error_message = e.what();
        }
        const double run_ms = elapsed_ms(t_run);
        const double fit_ms = session->fit_ms() - fit_before;
        rec.wall_clock_ms = {{"generate", gen_ms}, {"fit", fit_ms}, {"decode", run_ms - fit_ms}};
        report.runs.push_back(std::move(rec));
      }
    }
  }

  for (int num_sources : sweep) {
    for (Method method : config.methods) {
      SweepSummary s;
      s.method = std::string(to_string(method));
      s.num_sources = num_sources;
      std::vector<double> accs;
      std::vector<double> l1s;
      for (const auto& r : report.runs) {
        if (r.method != s.method || r.num_sources != num_sources) continue;
        ++s.runs;
        if (!r.ok) {
          ++s.failures;
          continue;
        }
        if (r.accuracy) accs.push_back(*r.accuracy);
        if (r.l1_error) l1s.push_back(*r.l1_error);
      }
      std::tie(s.mean_accuracy, s.std_accuracy) = mean_std(accs);
      std::tie(s.mean_l1_error, s.std_l1_error) = mean_std(l1s);
      report.summary.push_back(s);
    }
  }
  return report;
}

}  // namespace jcpot::harness
