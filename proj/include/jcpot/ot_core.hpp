#pragma once

// Dense entropic optimal transport kernels.
//
// Couplings are stored source-rows x target-columns. All routines are pure
// functions of their arguments.

#include <cstddef>

#include "jcpot/linalg.hpp"

namespace jcpot::ot {

// Smallest admissible maximum of any Gibbs kernel row or column.
inline constexpr double kUnderflowFloor = 1e-300;

inline constexpr double kDefaultEpsilon = 0.01;
inline constexpr double kDefaultTolerance = 1e-6;
inline constexpr int kDefaultMaxIter = 1000;

// Pairwise ground costs between two point sets. Entries are finite and
// nonnegative.
class CostMatrix {
 public:
  explicit CostMatrix(Matrix values);

  const Matrix& values() const { return values_; }
  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  double max() const { return max_; }
  double median() const;

 private:
  Matrix values_;
  double max_ = 0.0;
};

// Support points (one per row) with a probability mass vector.
struct DiscreteMeasure {
  Matrix support;
  Vector mass;

  static DiscreteMeasure uniform(Matrix support);

  // Throws kInvalidInput unless mass is nonnegative, sums to 1 within 1e-12
  // and matches the support row count.
  void validate() const;
};

enum class CostScaling {
  kByMax,  // divide by the largest cost entry before exponentiating
  kNone,
};

struct GibbsKernel {
  Matrix values;
  double epsilon = kDefaultEpsilon;
  // Divisor applied to the cost before exponentiation (1 when unscaled).
  double cost_scale = 1.0;
};

CostMatrix squared_euclidean_cost(const Matrix& x1, const Matrix& x2);

// exp(-C / (scale * epsilon)). Throws kInvalidParameter for epsilon <= 0 and
// kNumericalUnderflow when a row or column has no entry above
// kUnderflowFloor.
GibbsKernel gibbs_kernel(const CostMatrix& cost, double epsilon,
                         CostScaling scaling = CostScaling::kByMax);

// Closed-form KL projection onto {gamma : gamma 1 = row_mass}.
Matrix row_projection(const Matrix& input, const Vector& row_mass);

// Closed-form KL projection onto {gamma : gamma^T 1 = col_mass}.
Matrix col_projection(const Matrix& input, const Vector& col_mass);

struct SinkhornOptions {
  double epsilon = kDefaultEpsilon;
  double tol = kDefaultTolerance;
  int max_iter = kDefaultMaxIter;
  CostScaling scaling = CostScaling::kByMax;
  // Iterate on cost-shifted potentials and absorb the scaling vectors when
  // they leave [1e-50, 1e50]. Needed for epsilon far below the cost range;
  // the plain path reports underflow instead.
  bool stabilized = false;
};

struct SinkhornResult {
  Matrix coupling;
  int iterations = 0;
  bool converged = false;
  // L1 marginal residuals of the returned coupling.
  double row_residual = 0.0;
  double col_residual = 0.0;
};

SinkhornResult sinkhorn(const Vector& row_mass, const Vector& col_mass,
                        const CostMatrix& cost,
                        const SinkhornOptions& options = {});

// Plain scaling iterations on a precomputed positive kernel.
SinkhornResult sinkhorn_with_kernel(const Vector& row_mass, const Vector& col_mass,
                                    const Matrix& kernel, double tol = kDefaultTolerance,
                                    int max_iter = kDefaultMaxIter);

SinkhornResult sinkhorn(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                        const CostMatrix& cost,
                        const SinkhornOptions& options = {});

// Frobenius product <gamma, C>.
double transport_cost(const Matrix& coupling, const CostMatrix& cost);

// -sum gamma_ij (log gamma_ij - 1), with 0 log 0 = 0.
double entropy(const Matrix& coupling);

// sum gamma_ij (log(gamma_ij / zeta_ij) - 1), with 0 log 0 = 0.
double kl_divergence(const Matrix& coupling, const Matrix& kernel);

// L1 distances between the coupling marginals and the requested masses.
double row_residual(const Matrix& coupling, const Vector& row_mass);
double col_residual(const Matrix& coupling, const Vector& col_mass);

}  // namespace jcpot::ot
