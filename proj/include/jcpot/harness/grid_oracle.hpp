#pragma once

// Brute-force check of proportion recovery for two classes: evaluate the
// lambda-weighted entropic transport objective between every reweighted
// source and the uniform target on a grid over the simplex.

#include <vector>

#include "jcpot/class_ops.hpp"
#include "jcpot/dataset.hpp"
#include "jcpot/ot_core.hpp"

namespace jcpot::harness {

struct GridOracleOptions {
  double epsilon = ot::kDefaultEpsilon;  // relative to each domain's max cost
  double step = 0.01;
  double tol = ot::kDefaultTolerance;
  int max_iter = ot::kDefaultMaxIter;
  Vector lambda;  // empty means uniform
};

struct GridOracleResult {
  ProportionVector argmin;       // [pi, 1 - pi] at the smallest objective
  std::vector<double> grid;      // evaluated class-0 proportions
  std::vector<double> objective; // sum_k lambda_k KL(gamma_k | zeta_k)
  std::vector<double> skipped;   // grid points with an empty class
  int unconverged = 0;           // sinkhorn solves that hit max_iter
};

GridOracleResult simplex_grid_oracle(const std::vector<LabeledDataset>& sources,
                                     const Matrix& target_points,
                                     const GridOracleOptions& options = {});

}  // namespace jcpot::harness
