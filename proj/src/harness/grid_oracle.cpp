#include "jcpot/harness/grid_oracle.hpp"

#include <cmath>
#include <limits>

#include "jcpot/error.hpp"
#include "jcpot/solver.hpp"

namespace jcpot::harness {

GridOracleResult simplex_grid_oracle(const std::vector<LabeledDataset>& sources,
                                     const Matrix& target_points,
                                     const GridOracleOptions& options) {
  if (sources.empty()) fail(ErrorKind::kInvalidInput, "grid oracle needs a source domain");
  if (!(options.step > 0.0 && options.step <= 0.5)) {
    fail(ErrorKind::kInvalidParameter, "grid step must lie in (0, 0.5]");
  }
  const Vector lambda = resolve_lambda(options.lambda, sources.size());

  std::vector<ClassOperators> ops;
  std::vector<Matrix> kernels;
  for (const auto& s : sources) {
    ops.emplace_back(s.labels, 2);
    kernels.push_back(
        ot::gibbs_kernel(ot::squared_euclidean_cost(s.points, target_points), options.epsilon)
            .values);
  }
  const Index n = target_points.rows();
  const Vector target_mass = Vector::Constant(n, 1.0 / static_cast<double>(n));

  GridOracleResult result;
  double best = std::numeric_limits<double>::infinity();
  const auto steps = static_cast<int>(std::llround(1.0 / options.step));
  for (int g = 0; g <= steps; ++g) {
    const double pi = std::min(1.0, g * options.step);
    ProportionVector h{Vector(2)};
    h.values << pi, 1.0 - pi;
    if (pi <= 0.0 || pi >= 1.0) {
      // A class with zero mass has no valid reweighting.
      result.skipped.push_back(pi);
      continue;
    }
    double total = 0.0;
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const auto solve = ot::sinkhorn_with_kernel(mass_from_proportions(ops[k], h), target_mass,
                                                  kernels[k], options.tol, options.max_iter);
      if (!solve.converged) ++result.unconverged;
      total += lambda(static_cast<Index>(k)) * ot::kl_divergence(solve.coupling, kernels[k]);
    }
    result.grid.push_back(pi);
    result.objective.push_back(total);
    if (total < best) {
      best = total;
      result.argmin = h;
    }
  }
  return result;
}

}  // namespace jcpot::harness
