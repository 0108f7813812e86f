#include "jcpot/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "jcpot/error.hpp"

namespace jcpot::datagen {

std::vector<int> largest_remainder_counts(int n, const Vector& proportions) {
  if (n < 0) fail(ErrorKind::kInvalidParameter, "sample size must be nonnegative");
  const auto num_classes = static_cast<std::size_t>(proportions.size());
  std::vector<int> counts(num_classes);
  std::vector<double> remainder(num_classes);
  int assigned = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double exact = n * proportions(static_cast<Index>(c));
    counts[c] = static_cast<int>(std::floor(exact));
    remainder[c] = exact - counts[c];
    assigned += counts[c];
  }
  std::vector<std::size_t> order(num_classes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t r = 0; assigned < n; ++r, ++assigned) ++counts[order[r % num_classes]];
  return counts;
}

LabeledDataset gen_gaussian_classes(int n, const ProportionVector& proportions,
                                    const std::vector<Vector>& means, double sigma,
                                    std::uint64_t seed) {
  const auto num_classes = static_cast<int>(proportions.size());
  if (num_classes < 1 || static_cast<std::size_t>(num_classes) != means.size()) {
    fail(ErrorKind::kInvalidParameter, "need one mean per class");
  }
  if (!proportions.on_simplex()) fail(ErrorKind::kInvalidParameter, "proportions not on simplex");
  if (n < num_classes) fail(ErrorKind::kInvalidParameter, "need at least one point per class");
  if (!(sigma >= 0.0)) fail(ErrorKind::kInvalidParameter, "sigma must be nonnegative");
  const Index dim = means.front().size();
  for (const auto& m : means) {
    if (m.size() != dim || dim == 0) fail(ErrorKind::kInvalidParameter, "mean sizes differ");
  }

  const std::vector<int> counts = largest_remainder_counts(n, proportions.values);
  for (int c = 0; c < num_classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) {
      fail(ErrorKind::kMissingClass, "class " + std::to_string(c) + " would receive no points");
    }
  }

  std::mt19937_64 rng(seed);
  LabeledDataset out{Matrix(n, dim), {}};
  out.labels.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < num_classes; ++c) {
    out.labels.insert(out.labels.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(c)]), c);
  }
  std::shuffle(out.labels.begin(), out.labels.end(), rng);

  std::normal_distribution<double> noise(0.0, 1.0);
  for (Index i = 0; i < n; ++i) {
    const Vector& mean = means[static_cast<std::size_t>(out.labels[static_cast<std::size_t>(i)])];
    for (Index d = 0; d < dim; ++d) out.points(i, d) = mean(d) + sigma * noise(rng);
  }
  return out;
}

LabeledDataset gen_gaussian_binary(int n, const ProportionVector& proportions,
                                   const Vector& mean0, const Vector& mean1, double sigma,
                                   std::uint64_t seed) {
  if (proportions.size() != 2) fail(ErrorKind::kInvalidParameter, "binary generator needs C = 2");
  return gen_gaussian_classes(n, proportions, {mean0, mean1}, sigma, seed);
}

Scenario gen_multisource_scenario(const ScenarioParams& params) {
  if (params.num_sources < 1) fail(ErrorKind::kInvalidParameter, "need at least one source");
  if (!(params.prop_low > 0.0 && params.prop_low <= params.prop_high && params.prop_high < 1.0)) {
    fail(ErrorKind::kInvalidParameter, "proportion range must satisfy 0 < low <= high < 1");
  }
  if (!(params.target_class0 >= 0.0 && params.target_class0 <= 1.0)) {
    fail(ErrorKind::kInvalidParameter, "target proportion must lie in [0, 1]");
  }
  if (params.dim < 1) fail(ErrorKind::kInvalidParameter, "dimension must be positive");

  const Vector mean0 = Vector::Zero(params.dim);
  const Vector mean1 = Vector::Constant(params.dim, params.separation);

  Scenario s;
  s.params = params;
  std::mt19937_64 prop_rng(params.seed);
  std::uniform_real_distribution<double> prop_dist(params.prop_low, params.prop_high);
  for (int k = 0; k < params.num_sources; ++k) {
    const double p0 = params.fixed_sources ? params.fixed_source_class0 : prop_dist(prop_rng);
    s.source_class0.push_back(p0);
    ProportionVector p{Vector(2)};
    p.values << p0, 1.0 - p0;
    s.sources.push_back(gen_gaussian_binary(params.n_source, p, mean0, mean1, params.sigma,
                                            params.seed + 1 + static_cast<std::uint64_t>(k)));
  }

  ProportionVector target_p{Vector(2)};
  target_p.values << params.target_class0, 1.0 - params.target_class0;
  LabeledDataset target =
      gen_gaussian_binary(params.n_target, target_p, mean0, mean1, params.sigma,
                          params.seed + 1 + static_cast<std::uint64_t>(params.num_sources));
  s.target_points = std::move(target.points);
  s.truth.target_labels = std::move(target.labels);

  Vector empirical = Vector::Zero(2);
  for (int y : s.truth.target_labels) empirical(y) += 1.0;
  s.truth.target_proportions = ProportionVector{empirical / static_cast<double>(params.n_target)};
  return s;
}

}  // namespace jcpot::datagen
