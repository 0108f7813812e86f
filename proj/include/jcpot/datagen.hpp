#pragma once

// Seeded synthetic target-shift scenarios: labeled Gaussian source domains
// with random class proportions and a target domain at fixed proportions.

#include <cstdint>
#include <vector>

#include "jcpot/class_ops.hpp"
#include "jcpot/dataset.hpp"
#include "jcpot/linalg.hpp"

namespace jcpot::datagen {

// Per-class counts round(n * p) corrected by largest remainder so they sum
// to n. Ties on the remainder go to the lower class index.
std::vector<int> largest_remainder_counts(int n, const Vector& proportions);

// Points of class c drawn from N(means[c], sigma^2 I), in shuffled order.
// Throws kMissingClass if any class would receive zero points.
LabeledDataset gen_gaussian_classes(int n, const ProportionVector& proportions,
                                    const std::vector<Vector>& means, double sigma,
                                    std::uint64_t seed);

LabeledDataset gen_gaussian_binary(int n, const ProportionVector& proportions,
                                   const Vector& mean0, const Vector& mean1, double sigma,
                                   std::uint64_t seed);

struct ScenarioParams {
  int num_sources = 20;
  int n_source = 500;
  int n_target = 400;
  double target_class0 = 0.2;
  double prop_low = 0.1;
  double prop_high = 0.9;
  int dim = 2;
  double sigma = 1.0;
  double separation = 3.0;  // class-1 mean is separation * (1, ..., 1)
  // When set, every source uses class-0 proportion `fixed_source_class0`
  // instead of drawing from [prop_low, prop_high].
  bool fixed_sources = false;
  double fixed_source_class0 = 0.5;
  std::uint64_t seed = 0;
};

// Target ground truth. Only evaluation code reads this.
struct EvaluationRecord {
  std::vector<int> target_labels;
  ProportionVector target_proportions;
};

struct Scenario {
  std::vector<LabeledDataset> sources;
  std::vector<double> source_class0;  // requested class-0 proportion per source
  Matrix target_points;
  EvaluationRecord truth;
  ScenarioParams params;
};

// Stream seeds: source proportions use `seed`, source k uses seed + 1 + k,
// the target uses seed + 1 + K.
Scenario gen_multisource_scenario(const ScenarioParams& params);

}  // namespace jcpot::datagen
