#pragma once

// Joint estimation of target class proportions and per-source couplings by
// iterative Bregman projections.
//
// Each sweep projects every coupling onto the uniform target marginal
// (column sums 1/n), updates the proportions as the lambda-weighted geometric
// mean of the per-domain class masses, then projects every coupling onto the
// class-mass constraint aggregate * (gamma 1) = h (row sums distribute * h).
// Couplings are source-rows x target-columns.

#include <span>
#include <vector>

#include "jcpot/class_ops.hpp"
#include "jcpot/dataset.hpp"
#include "jcpot/linalg.hpp"
#include "jcpot/ot_core.hpp"

namespace jcpot {

struct JcpotProblem {
  std::vector<LabeledDataset> sources;
  Matrix target_points;
  // 0 means one past the largest source label.
  int num_classes = 0;
  // Relative to each domain's largest cost entry.
  double epsilon = ot::kDefaultEpsilon;
  // Convex domain weights; empty means uniform 1/K.
  Vector lambda;
  double tol = ot::kDefaultTolerance;
  int max_iter = ot::kDefaultMaxIter;
};

struct JcpotSolution {
  ProportionVector h_hat;           // normalized estimate
  Vector h_raw;                     // last geometric mean, before normalization
  std::vector<Matrix> couplings;    // n_k x n, after the final class projection
  std::vector<double> h_trace;      // ||h(t) - h(t-1)||_2 per sweep
  std::vector<double> col_residuals;  // per domain, L1 distance to 1/n
  Vector lambda;
  int iterations = 0;
  bool converged = false;
};

JcpotSolution jcpot_fit(const JcpotProblem& problem);

// h = prod_k (aggregate_k * (zeta_k 1))^lambda_k, evaluated in log space.
// Throws kDegenerateMass when a class carries no mass in some domain.
Vector proportion_update(std::span<const Matrix> kernels, std::span<const ClassOperators> ops,
                         const Vector& lambda);

// Same update from precomputed per-domain row sums zeta_k 1.
Vector proportion_update_from_row_sums(std::span<const Vector> row_sums,
                                       std::span<const ClassOperators> ops, const Vector& lambda);

// diag(distribute * h / (zeta 1)) zeta.
Matrix class_row_projection(const Matrix& kernel, const ClassOperators& ops, const Vector& h);

// Validates explicit weights or returns uniform ones for an empty vector.
Vector resolve_lambda(const Vector& lambda, std::size_t num_domains);

}  // namespace jcpot
