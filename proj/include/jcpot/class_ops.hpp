#pragma once

// Linear maps between per-instance masses and per-class proportions.
//
//   aggregate (C x n):   h = aggregate * m       (sums mass by class)
//   distribute (n x C):  m = distribute * h      (equal share within class)
//
// aggregate * distribute is the C x C identity.

#include <span>
#include <vector>

#include "jcpot/linalg.hpp"

namespace jcpot {

// Class proportions; entries in [0, 1].
struct ProportionVector {
  Vector values;

  static ProportionVector uniform(Index num_classes);
  Index size() const { return values.size(); }
  // True when all entries are nonnegative and |sum - 1| <= tol.
  bool on_simplex(double tol = 1e-9) const;
};

class ClassOperators {
 public:
  // Labels are dense ids in [0, num_classes). Throws kMissingClass naming the
  // first class without instances and kInvalidInput for out-of-range labels.
  ClassOperators(std::span<const int> labels, int num_classes);

  const Matrix& aggregate() const { return aggregate_; }
  const Matrix& distribute() const { return distribute_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& class_counts() const { return counts_; }
  int num_classes() const { return static_cast<int>(counts_.size()); }
  Index num_instances() const { return static_cast<Index>(labels_.size()); }

  // Label-driven equivalents of aggregate() * m and distribute() * h.
  Vector class_mass(const Vector& mass) const;
  Vector instance_mass(const Vector& proportions) const;

 private:
  std::vector<int> labels_;
  std::vector<int> counts_;
  Matrix aggregate_;
  Matrix distribute_;
};

ClassOperators build_class_operators(std::span<const int> labels, int num_classes);

ProportionVector proportions_from_mass(const ClassOperators& ops, const Vector& mass);

Vector mass_from_proportions(const ClassOperators& ops, const ProportionVector& proportions);

}  // namespace jcpot
