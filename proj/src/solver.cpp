#include "jcpot/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jcpot/error.hpp"

namespace jcpot {

namespace {

constexpr double kLambdaTolerance = 1e-9;

// Per-domain state: the coupling is diag(u) * kernel * diag(v).
struct DomainState {
  Matrix kernel;
  Vector u;
  Vector v;
  Vector kv;  // kernel * v
};

void check_problem(const JcpotProblem& problem) {
  if (problem.sources.empty()) fail(ErrorKind::kInvalidInput, "need at least one source domain");
  if (problem.target_points.rows() == 0) fail(ErrorKind::kInvalidInput, "target is empty");
  if (!(problem.tol > 0.0)) fail(ErrorKind::kInvalidParameter, "tol must be positive");
  if (problem.max_iter < 1) fail(ErrorKind::kInvalidParameter, "max_iter must be at least 1");
  for (std::size_t k = 0; k < problem.sources.size(); ++k) {
    const auto& s = problem.sources[k];
    if (s.dim() != problem.target_points.cols()) {
      fail(ErrorKind::kInvalidInput, "source " + std::to_string(k) +
                                         " dimension differs from the target");
    }
    if (static_cast<std::size_t>(s.size()) != s.labels.size()) {
      fail(ErrorKind::kInvalidInput, "source " + std::to_string(k) + " label count mismatch");
    }
    if (!s.fully_labeled()) {
      fail(ErrorKind::kInvalidInput, "source " + std::to_string(k) + " has unlabeled points");
    }
  }
}

}  // namespace

Vector resolve_lambda(const Vector& lambda, std::size_t num_domains) {
  const auto k = static_cast<Index>(num_domains);
  if (lambda.size() == 0) return Vector::Constant(k, 1.0 / static_cast<double>(k));
  if (lambda.size() != k) {
    fail(ErrorKind::kInvalidParameter, "lambda has " + std::to_string(lambda.size()) +
                                           " weights for " + std::to_string(k) + " domains");
  }
  if ((lambda.array() < 0.0).any() || !lambda.allFinite()) {
    fail(ErrorKind::kInvalidParameter, "lambda weights must be nonnegative");
  }
  if (std::abs(lambda.sum() - 1.0) > kLambdaTolerance) {
    fail(ErrorKind::kInvalidParameter, "lambda weights must sum to 1");
  }
  return lambda;
}

Vector proportion_update_from_row_sums(std::span<const Vector> row_sums,
                                       std::span<const ClassOperators> ops, const Vector& lambda) {
  if (row_sums.empty() || row_sums.size() != ops.size() ||
      static_cast<Index>(row_sums.size()) != lambda.size()) {
    fail(ErrorKind::kInvalidInput, "proportion update: domain counts disagree");
  }
  const int num_classes = ops.front().num_classes();
  Vector log_h = Vector::Zero(num_classes);
  for (std::size_t k = 0; k < row_sums.size(); ++k) {
    if (ops[k].num_classes() != num_classes) {
      fail(ErrorKind::kInvalidInput, "proportion update: class counts disagree");
    }
    const Vector class_mass = ops[k].class_mass(row_sums[k]);
    for (int c = 0; c < num_classes; ++c) {
      if (!(class_mass(c) > 0.0)) {
        fail(ErrorKind::kDegenerateMass, "class " + std::to_string(c) +
                                             " carries no mass in domain " + std::to_string(k));
      }
    }
    log_h += lambda(static_cast<Index>(k)) * class_mass.array().log().matrix();
  }
  return log_h.array().exp().matrix();
}

Vector proportion_update(std::span<const Matrix> kernels, std::span<const ClassOperators> ops,
                         const Vector& lambda) {
  std::vector<Vector> row_sums;
  row_sums.reserve(kernels.size());
  for (const auto& k : kernels) row_sums.emplace_back(k.rowwise().sum());
  return proportion_update_from_row_sums(row_sums, ops, lambda);
}

Matrix class_row_projection(const Matrix& kernel, const ClassOperators& ops, const Vector& h) {
  if (kernel.rows() != ops.num_instances()) {
    fail(ErrorKind::kInvalidInput, "kernel rows do not match the source instances");
  }
  if ((h.array() < 0.0).any()) fail(ErrorKind::kInvalidInput, "h has negative entries");
  return ot::row_projection(kernel, ops.instance_mass(h));
}

JcpotSolution jcpot_fit(const JcpotProblem& problem) {
  check_problem(problem);
  const std::size_t num_domains = problem.sources.size();
  const Vector lambda = resolve_lambda(problem.lambda, num_domains);

  int num_classes = problem.num_classes;
  if (num_classes <= 0) {
    for (const auto& s : problem.sources) num_classes = std::max(num_classes, s.num_classes());
  }

  std::vector<ClassOperators> ops;
  ops.reserve(num_domains);
  for (std::size_t k = 0; k < num_domains; ++k) {
    try {
      ops.emplace_back(problem.sources[k].labels, num_classes);
    } catch (const Error& e) {
      fail(e.kind(), "source " + std::to_string(k) + ": " + e.what());
    }
  }

  const Index n = problem.target_points.rows();
  const double target_mass = 1.0 / static_cast<double>(n);

  std::vector<DomainState> domains(num_domains);
  for (std::size_t k = 0; k < num_domains; ++k) {
    const auto cost = ot::squared_euclidean_cost(problem.sources[k].points, problem.target_points);
    try {
      domains[k].kernel = ot::gibbs_kernel(cost, problem.epsilon).values;
    } catch (const Error& e) {
      fail(e.kind(), "source " + std::to_string(k) + ": " + e.what());
    }
    domains[k].u = Vector::Ones(problem.sources[k].size());
    domains[k].v = Vector::Ones(n);
  }

  JcpotSolution solution;
  solution.lambda = lambda;
  Vector h_prev = ProportionVector::uniform(num_classes).values;
  Vector h = h_prev;
  std::vector<Vector> row_sums(num_domains);
  Vector ktu(n);

  for (int it = 1; it <= problem.max_iter; ++it) {
    // Target marginal: column sums -> 1/n.
    for (std::size_t k = 0; k < num_domains; ++k) {
      auto& d = domains[k];
      ktu.noalias() = d.kernel.transpose() * d.u;
      if (!(ktu.array() > 0.0).all()) {
        fail(ErrorKind::kDegenerateKernel,
             "source " + std::to_string(k) + ": a target column lost all mass");
      }
      d.v = target_mass * ktu.cwiseInverse();
      d.kv.noalias() = d.kernel * d.v;
      row_sums[k] = d.u.cwiseProduct(d.kv);
    }

    h = proportion_update_from_row_sums(row_sums, ops, lambda);

    // Class constraint: row sums -> distribute * h.
    for (std::size_t k = 0; k < num_domains; ++k) {
      auto& d = domains[k];
      if (!(d.kv.array() > 0.0).all()) {
        fail(ErrorKind::kDegenerateKernel,
             "source " + std::to_string(k) + ": a source row lost all mass");
      }
      d.u = ops[k].instance_mass(h).cwiseQuotient(d.kv);
    }

    const double err = (h - h_prev).norm();
    solution.h_trace.push_back(err);
    solution.iterations = it;
    h_prev = h;
    if (!std::isfinite(err)) {
      fail(ErrorKind::kDegenerateMass, "proportion estimate is not finite");
    }
    if (err <= problem.tol) {
      solution.converged = true;
      break;
    }
  }

  solution.h_raw = h;
  solution.h_hat = ProportionVector{h / h.sum()};
  solution.couplings.reserve(num_domains);
  const Vector uniform_target = Vector::Constant(n, target_mass);
  for (const auto& d : domains) {
    solution.couplings.push_back(d.u.asDiagonal() * d.kernel * d.v.asDiagonal());
    solution.col_residuals.push_back(ot::col_residual(solution.couplings.back(), uniform_target));
  }
  return solution;
}

}  // namespace jcpot
