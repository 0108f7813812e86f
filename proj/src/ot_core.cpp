#include "jcpot/ot_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "jcpot/error.hpp"

namespace jcpot::ot {

namespace {

constexpr double kMassTolerance = 1e-12;
constexpr double kScalingCeiling = 1e50;
constexpr double kScalingFloor = 1e-50;

double xlogx_minus_x(double x) { return x > 0.0 ? x * (std::log(x) - 1.0) : 0.0; }

void require_positive_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    fail(ErrorKind::kInvalidParameter,
         "epsilon must be a positive finite number, got " + std::to_string(epsilon));
  }
}

void require_nonnegative(const Vector& mass, const char* what) {
  for (Index i = 0; i < mass.size(); ++i) {
    if (!(mass(i) >= 0.0) || !std::isfinite(mass(i))) {
      fail(ErrorKind::kInvalidInput,
           std::string(what) + " entry " + std::to_string(i) + " is negative or not finite");
    }
  }
}

double cost_divisor(const CostMatrix& cost, CostScaling scaling) {
  if (scaling == CostScaling::kByMax && cost.max() > 0.0) return cost.max();
  return 1.0;
}

bool outside_range(const Vector& scaling) {
  for (Index i = 0; i < scaling.size(); ++i) {
    const double s = scaling(i);
    if (s == 0.0) continue;  // zero-mass rows stay pinned at zero
    if (s > kScalingCeiling || s < kScalingFloor) return true;
  }
  return false;
}

void require_finite_scalings(const Vector& u, const Vector& v, int iteration) {
  if (!u.allFinite() || !v.allFinite()) {
    fail(ErrorKind::kNumericalUnderflow,
         "sinkhorn scalings overflowed at iteration " + std::to_string(iteration) +
             "; increase epsilon or enable stabilized iterations");
  }
}

void safe_divide(const Vector& numerator, const Vector& denominator, const char* axis,
                 Vector& out) {
  for (Index i = 0; i < numerator.size(); ++i) {
    if (numerator(i) == 0.0) {
      out(i) = 0.0;
    } else if (denominator(i) > 0.0) {
      out(i) = numerator(i) / denominator(i);
    } else {
      fail(ErrorKind::kDegenerateKernel,
           std::string("sinkhorn: kernel ") + axis + " " + std::to_string(i) +
               " carries no mass; increase epsilon");
    }
  }
}

// Kernel of the cost shifted by the potentials: exp((f_i + g_j - C_ij) / eps).
Matrix shifted_kernel(const Matrix& scaled_cost, const Vector& f, const Vector& g,
                      double epsilon) {
  Matrix k(scaled_cost.rows(), scaled_cost.cols());
  for (Index j = 0; j < scaled_cost.cols(); ++j) {
    for (Index i = 0; i < scaled_cost.rows(); ++i) {
      k(i, j) = std::exp((f(i) + g(j) - scaled_cost(i, j)) / epsilon);
    }
  }
  return k;
}

}  // namespace

CostMatrix::CostMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.size() == 0) fail(ErrorKind::kInvalidInput, "cost matrix is empty");
  for (Index j = 0; j < values_.cols(); ++j) {
    for (Index i = 0; i < values_.rows(); ++i) {
      const double c = values_(i, j);
      if (!(c >= 0.0) || !std::isfinite(c)) {
        fail(ErrorKind::kInvalidInput, "cost entry (" + std::to_string(i) + "," +
                                           std::to_string(j) + ") is negative or not finite");
      }
    }
  }
  max_ = values_.maxCoeff();
}

double CostMatrix::median() const {
  std::vector<double> entries(values_.data(), values_.data() + values_.size());
  const auto mid = entries.begin() + static_cast<std::ptrdiff_t>(entries.size() / 2);
  std::nth_element(entries.begin(), mid, entries.end());
  if (entries.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(entries.begin(), mid);
  return 0.5 * (lower + upper);
}

DiscreteMeasure DiscreteMeasure::uniform(Matrix support) {
  const Index n = support.rows();
  if (n == 0) fail(ErrorKind::kInvalidInput, "measure support is empty");
  return DiscreteMeasure{std::move(support), Vector::Constant(n, 1.0 / static_cast<double>(n))};
}

void DiscreteMeasure::validate() const {
  if (support.rows() != mass.size()) {
    fail(ErrorKind::kInvalidInput, "measure support has " + std::to_string(support.rows()) +
                                       " points but mass has " + std::to_string(mass.size()));
  }
  require_nonnegative(mass, "mass");
  if (std::abs(mass.sum() - 1.0) > kMassTolerance) {
    fail(ErrorKind::kInvalidInput, "mass does not sum to 1");
  }
}

CostMatrix squared_euclidean_cost(const Matrix& x1, const Matrix& x2) {
  if (x1.rows() == 0 || x2.rows() == 0) fail(ErrorKind::kInvalidInput, "empty point set");
  if (x1.cols() == 0) fail(ErrorKind::kInvalidInput, "points must have at least one coordinate");
  if (x1.cols() != x2.cols()) {
    fail(ErrorKind::kInvalidInput, "dimension mismatch: " + std::to_string(x1.cols()) +
                                       " vs " + std::to_string(x2.cols()));
  }
  // Direct differences rather than the |a|^2 + |b|^2 - 2ab expansion, so that
  // coincident points give exactly zero.
  Matrix c(x1.rows(), x2.rows());
  for (Index j = 0; j < x2.rows(); ++j) {
    for (Index i = 0; i < x1.rows(); ++i) {
      c(i, j) = (x1.row(i) - x2.row(j)).squaredNorm();
    }
  }
  return CostMatrix(std::move(c));
}

GibbsKernel gibbs_kernel(const CostMatrix& cost, double epsilon, CostScaling scaling) {
  require_positive_epsilon(epsilon);
  const double scale = cost_divisor(cost, scaling);
  GibbsKernel kernel{(-cost.values() / (scale * epsilon)).array().exp().matrix(), epsilon, scale};

  const Vector row_max = kernel.values.rowwise().maxCoeff();
  for (Index i = 0; i < row_max.size(); ++i) {
    if (row_max(i) < kUnderflowFloor) {
      fail(ErrorKind::kNumericalUnderflow,
           "gibbs kernel row " + std::to_string(i) + " underflows (max entry " +
               std::to_string(row_max(i)) + "); use a larger epsilon");
    }
  }
  const Vector col_max = kernel.values.colwise().maxCoeff().transpose();
  for (Index j = 0; j < col_max.size(); ++j) {
    if (col_max(j) < kUnderflowFloor) {
      fail(ErrorKind::kNumericalUnderflow,
           "gibbs kernel column " + std::to_string(j) + " underflows (max entry " +
               std::to_string(col_max(j)) + "); use a larger epsilon");
    }
  }
  return kernel;
}

Matrix row_projection(const Matrix& input, const Vector& row_mass) {
  if (row_mass.size() != input.rows()) {
    fail(ErrorKind::kInvalidInput, "row mass length does not match row count");
  }
  const Vector sums = input.rowwise().sum();
  for (Index i = 0; i < sums.size(); ++i) {
    if (!(sums(i) > 0.0)) {
      fail(ErrorKind::kDegenerateKernel, "row " + std::to_string(i) + " has zero sum");
    }
  }
  return (row_mass.array() / sums.array()).matrix().asDiagonal() * input;
}

Matrix col_projection(const Matrix& input, const Vector& col_mass) {
  if (col_mass.size() != input.cols()) {
    fail(ErrorKind::kInvalidInput, "column mass length does not match column count");
  }
  const Vector sums = input.colwise().sum().transpose();
  for (Index j = 0; j < sums.size(); ++j) {
    if (!(sums(j) > 0.0)) {
      fail(ErrorKind::kDegenerateKernel, "column " + std::to_string(j) + " has zero sum");
    }
  }
  return input * (col_mass.array() / sums.array()).matrix().asDiagonal();
}

namespace {

void check_sinkhorn_inputs(const Vector& row_mass, const Vector& col_mass, Index rows, Index cols,
                           double tol, int max_iter) {
  if (!(tol > 0.0)) fail(ErrorKind::kInvalidParameter, "tol must be positive");
  if (max_iter < 1) fail(ErrorKind::kInvalidParameter, "max_iter must be at least 1");
  if (row_mass.size() != rows || col_mass.size() != cols) {
    fail(ErrorKind::kInvalidInput, "marginal sizes do not match the cost matrix");
  }
  require_nonnegative(row_mass, "row mass");
  require_nonnegative(col_mass, "column mass");
}

// Dual potentials for the stabilized path; the working kernel is
// exp((f_i + g_j - scaled_cost_ij) / epsilon).
struct Potentials {
  Matrix scaled_cost;
  Vector f;
  Vector g;
  double epsilon;
};

SinkhornResult iterate_scalings(const Vector& row_mass, const Vector& col_mass, Matrix kernel,
                                double tol, int max_iter, Potentials* potentials) {
  Vector u = Vector::Ones(kernel.rows());
  Vector v = Vector::Ones(kernel.cols());
  Vector kv = kernel * v;
  Vector ktu(kernel.cols());

  SinkhornResult result;
  for (int it = 1; it <= max_iter; ++it) {
    safe_divide(row_mass, kv, "row", u);
    ktu.noalias() = kernel.transpose() * u;
    safe_divide(col_mass, ktu, "column", v);
    kv.noalias() = kernel * v;
    require_finite_scalings(u, v, it);
    result.iterations = it;

    const double row_res = (u.cwiseProduct(kv) - row_mass).lpNorm<1>();
    const double col_res = (v.cwiseProduct(ktu) - col_mass).lpNorm<1>();
    if (row_res <= tol && col_res <= tol) {
      result.converged = true;
      break;
    }

    if (potentials != nullptr && (outside_range(u) || outside_range(v))) {
      const double eps = potentials->epsilon;
      for (Index i = 0; i < u.size(); ++i) {
        if (u(i) > 0.0) {
          potentials->f(i) += eps * std::log(u(i));
          u(i) = 1.0;
        }
      }
      for (Index j = 0; j < v.size(); ++j) {
        if (v(j) > 0.0) {
          potentials->g(j) += eps * std::log(v(j));
          v(j) = 1.0;
        }
      }
      kernel = shifted_kernel(potentials->scaled_cost, potentials->f, potentials->g, eps);
      kv.noalias() = kernel * v;
    }
  }

  result.coupling = u.asDiagonal() * kernel * v.asDiagonal();
  result.row_residual = row_residual(result.coupling, row_mass);
  result.col_residual = col_residual(result.coupling, col_mass);
  return result;
}

}  // namespace

SinkhornResult sinkhorn(const Vector& row_mass, const Vector& col_mass, const CostMatrix& cost,
                        const SinkhornOptions& options) {
  require_positive_epsilon(options.epsilon);
  check_sinkhorn_inputs(row_mass, col_mass, cost.rows(), cost.cols(), options.tol,
                        options.max_iter);

  if (!options.stabilized) {
    return iterate_scalings(row_mass, col_mass,
                            gibbs_kernel(cost, options.epsilon, options.scaling).values,
                            options.tol, options.max_iter, nullptr);
  }

  // Shift by row minima, then column minima: every row and column of the
  // starting kernel contains an entry equal to 1.
  Potentials potentials{cost.values() / cost_divisor(cost, options.scaling), {}, {},
                        options.epsilon};
  potentials.f = potentials.scaled_cost.rowwise().minCoeff();
  potentials.g =
      (potentials.scaled_cost.colwise() - potentials.f).colwise().minCoeff().transpose();
  Matrix kernel =
      shifted_kernel(potentials.scaled_cost, potentials.f, potentials.g, options.epsilon);
  return iterate_scalings(row_mass, col_mass, std::move(kernel), options.tol, options.max_iter,
                          &potentials);
}

SinkhornResult sinkhorn_with_kernel(const Vector& row_mass, const Vector& col_mass,
                                    const Matrix& kernel, double tol, int max_iter) {
  check_sinkhorn_inputs(row_mass, col_mass, kernel.rows(), kernel.cols(), tol, max_iter);
  return iterate_scalings(row_mass, col_mass, kernel, tol, max_iter, nullptr);
}

SinkhornResult sinkhorn(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                        const CostMatrix& cost, const SinkhornOptions& options) {
  mu1.validate();
  mu2.validate();
  return sinkhorn(mu1.mass, mu2.mass, cost, options);
}

double transport_cost(const Matrix& coupling, const CostMatrix& cost) {
  if (coupling.rows() != cost.rows() || coupling.cols() != cost.cols()) {
    fail(ErrorKind::kInvalidInput, "coupling and cost shapes differ");
  }
  return coupling.cwiseProduct(cost.values()).sum();
}

double entropy(const Matrix& coupling) {
  double acc = 0.0;
  for (Index j = 0; j < coupling.cols(); ++j) {
    for (Index i = 0; i < coupling.rows(); ++i) {
      const double x = coupling(i, j);
      if (x < 0.0) fail(ErrorKind::kInvalidInput, "coupling has a negative entry");
      acc += xlogx_minus_x(x);
    }
  }
  return -acc;
}

double kl_divergence(const Matrix& coupling, const Matrix& kernel) {
  if (coupling.rows() != kernel.rows() || coupling.cols() != kernel.cols()) {
    fail(ErrorKind::kInvalidInput, "coupling and kernel shapes differ");
  }
  double acc = 0.0;
  for (Index j = 0; j < coupling.cols(); ++j) {
    for (Index i = 0; i < coupling.rows(); ++i) {
      const double x = coupling(i, j);
      const double z = kernel(i, j);
      if (!(z > 0.0)) fail(ErrorKind::kInvalidInput, "kernel entries must be positive");
      if (x < 0.0) fail(ErrorKind::kInvalidInput, "coupling has a negative entry");
      if (x > 0.0) acc += x * (std::log(x / z) - 1.0);
    }
  }
  return acc;
}

double row_residual(const Matrix& coupling, const Vector& row_mass) {
  return (coupling.rowwise().sum() - row_mass).lpNorm<1>();
}

double col_residual(const Matrix& coupling, const Vector& col_mass) {
  return (coupling.colwise().sum().transpose() - col_mass).lpNorm<1>();
}

}  // namespace jcpot::ot
