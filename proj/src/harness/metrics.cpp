#include "jcpot/harness/metrics.hpp"

#include "jcpot/error.hpp"

namespace jcpot::harness {

double l1_proportion_error(const ProportionVector& estimate, const ProportionVector& truth) {
  if (estimate.size() != truth.size()) {
    fail(ErrorKind::kInvalidInput, "proportion vectors differ in length");
  }
  return (estimate.values - truth.values).lpNorm<1>();
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) fail(ErrorKind::kInvalidInput, "label counts differ");
  if (predicted.empty()) fail(ErrorKind::kInvalidInput, "no labels to score");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace jcpot::harness
