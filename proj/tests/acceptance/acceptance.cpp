// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "jcpot/class_ops.hpp"
#include "jcpot/datagen.hpp"
#include "jcpot/error.hpp"
#include "jcpot/harness/benchmark.hpp"
#include "jcpot/harness/grid_oracle.hpp"
#include "jcpot/harness/metrics.hpp"
#include "jcpot/harness/report.hpp"
#include "jcpot/ot_core.hpp"
#include "jcpot/solver.hpp"
#include "jcpot/testing/exact_ot.hpp"

using namespace jcpot;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-14 * std::max(1.0, std::abs(b))) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - r * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + r * (b - a), fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double kl_entry(double x, double z) { return x > 0.0 ? x * (std::log(x / z) - 1.0) : 0.0; }

// 1. Entropic cost at eps = 1e-3 * median(C) against the exact optimum.
Outcome sinkhorn_correctness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vector uniform = Vector::Constant(5, 0.2);
  double worst_gap = 0.0, worst_residual = 0.0;
  long total_iterations = 0;
  bool all_converged = true;
  for (int instance = 0; instance < 20; ++instance) {
    Matrix x1(5, 2), x2(5, 2);
    for (Index i = 0; i < 5; ++i)
      for (Index d = 0; d < 2; ++d) x1(i, d) = unit(rng), x2(i, d) = unit(rng);
    const auto cost = ot::squared_euclidean_cost(x1, x2);
    ot::SinkhornOptions opts;
    // The solver's epsilon is relative to max(C).
    opts.epsilon = 1e-3 * cost.median() / cost.max();
    opts.tol = 1e-6;
    opts.max_iter = 20000000;
    opts.stabilized = true;
    const auto r = ot::sinkhorn(uniform, uniform, cost, opts);
    const double exact = testing::exact_ot_cost(uniform, uniform, cost.values());
    const double entropic = ot::transport_cost(r.coupling, cost);
    all_converged = all_converged && r.converged;
    total_iterations += r.iterations;
    worst_gap = std::max(worst_gap, std::abs(entropic - exact) / exact);
    worst_residual = std::max({worst_residual, r.row_residual, r.col_residual});
  }
  const double elapsed = seconds_since(t0);
  return {all_converged && worst_gap <= 0.05 && worst_residual <= 1e-6 && elapsed < 5.0,
          fmt("worst relative gap %.3g (<= 0.05), worst residual %.3g (<= 1e-6), "
              "%ld iterations, %.2fs (< 5s)",
              worst_gap, worst_residual, total_iterations, elapsed)};
}

// 2. D1 D2 = I exactly and h -> m -> h.
Outcome operator_identities() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> classes_dist(1, 5);
  int exact_failures = 0;
  double worst_float = 0.0, worst_round_trip = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int classes = classes_dist(rng);
    const int n = std::uniform_int_distribution<int>(classes, 50)(rng);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i % classes;
    std::shuffle(labels.begin(), labels.end(), rng);
    const ClassOperators ops(labels, classes);

    // Exact check in integers: D1 D2 (c, c') = |{i in c : y_i = c'}| / n_c'.
    for (int c = 0; c < classes; ++c) {
      for (int c2 = 0; c2 < classes; ++c2) {
        long numerator = 0;
        for (Index i = 0; i < n; ++i) {
          if (ops.aggregate()(c, i) == 1.0 && ops.distribute()(i, c2) != 0.0) {
            if (ops.distribute()(i, c2) != 1.0 / ops.class_counts()[static_cast<std::size_t>(c2)]) {
              ++exact_failures;
            }
            ++numerator;
          }
        }
        const long expected = c == c2 ? ops.class_counts()[static_cast<std::size_t>(c2)] : 0;
        if (numerator != expected) ++exact_failures;
      }
    }
    const Matrix prod = ops.aggregate() * ops.distribute();
    worst_float = std::max(worst_float,
                           (prod - Matrix::Identity(classes, classes)).cwiseAbs().maxCoeff());

    std::exponential_distribution<double> e(1.0);
    Vector h(classes);
    for (int c = 0; c < classes; ++c) h(c) = e(rng);
    h /= h.sum();
    const auto back = proportions_from_mass(ops, mass_from_proportions(ops, ProportionVector{h}));
    worst_round_trip = std::max(worst_round_trip, (back.values - h).cwiseAbs().maxCoeff());
  }
  return {exact_failures == 0 && worst_float <= 1e-12 && worst_round_trip <= 1e-12,
          fmt("exact mismatches %d, floating |D1 D2 - I| %.3g, round trip %.3g (<= 1e-12)",
              exact_failures, worst_float, worst_round_trip)};
}

// 3. Class row projection: exact class mass and agreement with a numerical
// KL minimizer over {gamma : gamma 1 = D2 h}.
Outcome class_projection_closed_form() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0.05, 1.0);
  const std::vector<int> labels{0, 1, 1};
  const ClassOperators ops(labels, 2);
  double worst_mass = 0.0, worst_match = 0.0;
  for (int instance = 0; instance < 3; ++instance) {
    Matrix z(3, 2);
    for (Index i = 0; i < 3; ++i) z(i, 0) = pos(rng), z(i, 1) = pos(rng);
    const double p = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    const Vector h{{p, 1.0 - p}};
    const Matrix closed = class_row_projection(z, ops, h);
    worst_mass = std::max(worst_mass,
                          (ops.aggregate() * closed.rowwise().sum() - h).cwiseAbs().maxCoeff());
    const Vector row_mass = ops.distribute() * h;
    for (Index i = 0; i < 3; ++i) {
      const double s = row_mass(i);
      const double t = golden_section(
          [&](double x) { return kl_entry(x, z(i, 0)) + kl_entry(s - x, z(i, 1)); }, 0.0, s);
      worst_match = std::max({worst_match, std::abs(closed(i, 0) - t),
                              std::abs(closed(i, 1) - (s - t))});
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst_mass <= 1e-12 && worst_match <= 1e-6 && elapsed < 10.0,
          fmt("|D1 gamma 1 - h| %.3g (<= 1e-12), |closed form - minimizer| %.3g (<= 1e-6), "
              "%.2fs (< 10s)",
              worst_mass, worst_match, elapsed)};
}

// 4. Proportion estimation over the K sweep.
Outcome proportion_estimation() {
  bool pass = true;
  std::string detail;
  for (int k : {2, 5, 10, 20}) {
    const auto t0 = Clock::now();
    harness::RunConfig config;
    config.methods = {harness::Method::kJcpotLp};
    config.sources_sweep = {k};
    config.repetitions = 5;
    config.seed = 2017;
    const auto report = harness::run_benchmark(config);
    const double elapsed = seconds_since(t0);
    const auto& s = report.summary.front();
    const double limit = k >= 5 ? 0.06 : 0.10;
    const bool ok = !report.any_failed() && !report.any_unconverged() && s.mean_l1_error &&
                    *s.mean_l1_error <= limit && elapsed < 120.0;
    pass = pass && ok;
    detail += fmt("%sK=%d L1 %.4f (<= %.2f) %.1fs", detail.empty() ? "" : "; ", k,
                  s.mean_l1_error.value_or(NAN), limit, elapsed);
  }
  return {pass, detail};
}

// 5. Grid oracle argmin and JCPOT agreement.
Outcome grid_oracle_check() {
  const auto t0 = Clock::now();
  double worst_truth = 0.0, worst_jcpot = 0.0;
  int unconverged = 0;
  for (int instance = 0; instance < 5; ++instance) {
    datagen::ScenarioParams params;
    params.num_sources = 2;
    params.n_source = 250;
    params.n_target = 200;
    params.separation = 5.0;
    params.seed = 500 + static_cast<std::uint64_t>(instance);
    const auto s = datagen::gen_multisource_scenario(params);
    const auto oracle = harness::simplex_grid_oracle(s.sources, s.target_points);
    unconverged += oracle.unconverged;
    worst_truth = std::max(worst_truth, std::abs(oracle.argmin.values(0) -
                                                 s.truth.target_proportions.values(0)));
    JcpotProblem problem;
    problem.sources = s.sources;
    problem.target_points = s.target_points;
    const auto sol = jcpot_fit(problem);
    worst_jcpot = std::max(worst_jcpot,
                           harness::l1_proportion_error(sol.h_hat, oracle.argmin));
  }
  const double elapsed = seconds_since(t0);
  return {worst_truth <= 0.02 + 1e-12 && worst_jcpot <= 0.05 && elapsed < 300.0,
          fmt("|argmin - truth| %.3f (<= 0.02), |jcpot - argmin|_1 %.4f (<= 0.05), "
              "%d unconverged grid solves, %.1fs (< 300s)",
              worst_truth, worst_jcpot, unconverged, elapsed)};
}

double mean_accuracy(const harness::Report& report, const std::string& method) {
  for (const auto& s : report.summary) {
    if (s.method == method) return s.mean_accuracy.value_or(NAN);
  }
  return NAN;
}

// 6. Method ordering under shift, and agreement without shift.
Outcome adaptation_ordering() {
  const auto t0 = Clock::now();
  harness::RunConfig config;
  config.methods = {harness::Method::kJcpotLp, harness::Method::kJcpotPt,
                    harness::Method::kOtdaLp, harness::Method::kNoAdapt};
  config.generator.num_sources = 10;
  config.repetitions = 5;
  config.seed = 42;
  const auto shifted = harness::run_benchmark(config);

  config.methods = {harness::Method::kJcpotLp, harness::Method::kOtdaLp};
  config.generator.fixed_sources = true;
  config.generator.fixed_source_class0 = 0.5;
  config.generator.target_class0 = 0.5;
  const auto balanced = harness::run_benchmark(config);
  const double elapsed = seconds_since(t0);

  const double jlp = mean_accuracy(shifted, "jcpot-lp");
  const double jpt = mean_accuracy(shifted, "jcpot-pt");
  const double olp = mean_accuracy(shifted, "otda-lp");
  const double noa = mean_accuracy(shifted, "no-adapt");
  const double b_jlp = mean_accuracy(balanced, "jcpot-lp");
  const double b_olp = mean_accuracy(balanced, "otda-lp");
  const bool pass = !shifted.any_failed() && !balanced.any_failed() && jlp - olp >= 0.05 &&
                    jlp > noa && std::abs(b_jlp - b_olp) <= 0.03 && elapsed < 300.0;
  return {pass, fmt("shift: jcpot-lp %.4f, otda-lp %.4f (gap >= 0.05), no-adapt %.4f, "
                    "jcpot-pt %.4f; no shift: jcpot-lp %.4f vs otda-lp %.4f (<= 0.03); %.1fs",
                    jlp, olp, noa, jpt, b_jlp, b_olp, elapsed)};
}

// 7. Identical configs give byte-identical report bodies.
Outcome determinism() {
  harness::RunConfig config;
  config.methods = {harness::Method::kJcpotLp, harness::Method::kJcpotPt,
                    harness::Method::kOtdaLp, harness::Method::kOtdaPt,
                    harness::Method::kNoAdapt, harness::Method::kTargetOnly};
  config.generator.n_source = 120;
  config.generator.n_target = 100;
  config.sources_sweep = {2, 4};
  config.repetitions = 3;
  config.seed = 99;
  const std::string first = harness::serialize_report(harness::run_benchmark(config), false);
  const std::string second = harness::serialize_report(harness::run_benchmark(config), false);
  const bool round_trip =
      harness::serialize_report(harness::parse_report(first), false) == first;
  return {first == second && round_trip,
          fmt("%zu-byte report bodies %s, serialization round trip %s", first.size(),
              first == second ? "identical" : "differ", round_trip ? "lossless" : "lossy")};
}

// 8. Structured errors and flags.
Outcome robustness() {
  datagen::ScenarioParams params;
  params.num_sources = 2;
  params.n_source = 60;
  params.n_target = 50;
  params.seed = 3;
  const auto s = datagen::gen_multisource_scenario(params);
  JcpotProblem base;
  base.sources = s.sources;
  base.target_points = s.target_points;
  base.num_classes = 2;

  const auto expect_error = [](const JcpotProblem& p, ErrorKind kind, const std::string& needle) {
    try {
      jcpot_fit(p);
    } catch (const Error& e) {
      return e.kind() == kind && std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };

  JcpotProblem missing = base;
  for (int& y : missing.sources[1].labels) y = 0;
  const bool missing_ok = expect_error(missing, ErrorKind::kMissingClass, "class 1");

  JcpotProblem tiny = base;
  tiny.epsilon = 1e-6;
  const bool underflow_ok = expect_error(tiny, ErrorKind::kNumericalUnderflow, "underflow");

  JcpotProblem short_run = base;
  short_run.max_iter = 1;
  const auto sol = jcpot_fit(short_run);
  const bool flag_ok = !sol.converged && sol.iterations == 1 && sol.h_trace.size() == 1;

  harness::RunConfig config;
  config.methods = {harness::Method::kJcpotLp};
  config.generator = params;
  config.epsilon = 1e-6;
  const auto report = harness::run_benchmark(config);
  const bool record_ok = report.runs.size() == 1 && !report.runs[0].ok &&
                         report.runs[0].error_kind == "numerical-underflow" &&
                         report.runs[0].predictions.empty();

  return {missing_ok && underflow_ok && flag_ok && record_ok,
          fmt("missing class %s, underflow %s, max_iter=1 flag %s, report error record %s",
              missing_ok ? "ok" : "WRONG", underflow_ok ? "ok" : "WRONG",
              flag_ok ? "ok" : "WRONG", record_ok ? "ok" : "WRONG")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 sinkhorn vs exact optimum", sinkhorn_correctness},
      {"2 class operator identities", operator_identities},
      {"3 class row projection closed form", class_projection_closed_form},
      {"4 proportion estimation sweep", proportion_estimation},
      {"5 grid oracle agreement", grid_oracle_check},
      {"6 adaptation ordering", adaptation_ordering},
      {"7 report determinism", determinism},
      {"8 structured errors and flags", robustness},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("unexpected exception: ") + e.what()};
    }
    failures += outcome.pass ? 0 : 1;
    std::printf("[%s] criterion %s: %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
