#include "jcpot/class_ops.hpp"

#include <cmath>
#include <string>

#include "jcpot/error.hpp"

namespace jcpot {

ProportionVector ProportionVector::uniform(Index num_classes) {
  return ProportionVector{Vector::Constant(num_classes, 1.0 / static_cast<double>(num_classes))};
}

bool ProportionVector::on_simplex(double tol) const {
  return (values.array() >= 0.0).all() && std::abs(values.sum() - 1.0) <= tol;
}

ClassOperators::ClassOperators(std::span<const int> labels, int num_classes)
    : labels_(labels.begin(), labels.end()) {
  if (labels_.empty()) fail(ErrorKind::kInvalidInput, "class operators need at least one label");
  if (num_classes < 1) fail(ErrorKind::kInvalidParameter, "num_classes must be positive");

  counts_.assign(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int y = labels_[i];
    if (y < 0 || y >= num_classes) {
      fail(ErrorKind::kInvalidInput, "label " + std::to_string(y) + " at instance " +
                                         std::to_string(i) + " is outside [0, " +
                                         std::to_string(num_classes) + ")");
    }
    ++counts_[static_cast<std::size_t>(y)];
  }
  for (int c = 0; c < num_classes; ++c) {
    if (counts_[static_cast<std::size_t>(c)] == 0) {
      fail(ErrorKind::kMissingClass, "class " + std::to_string(c) + " has no instances");
    }
  }

  const auto n = static_cast<Index>(labels_.size());
  aggregate_ = Matrix::Zero(num_classes, n);
  distribute_ = Matrix::Zero(n, num_classes);
  for (Index i = 0; i < n; ++i) {
    const int y = labels_[static_cast<std::size_t>(i)];
    aggregate_(y, i) = 1.0;
    distribute_(i, y) = 1.0 / counts_[static_cast<std::size_t>(y)];
  }
}

Vector ClassOperators::class_mass(const Vector& mass) const {
  if (mass.size() != num_instances()) {
    fail(ErrorKind::kInvalidInput, "mass vector length does not match instance count");
  }
  Vector h = Vector::Zero(num_classes());
  for (Index i = 0; i < mass.size(); ++i) h(labels_[static_cast<std::size_t>(i)]) += mass(i);
  return h;
}

Vector ClassOperators::instance_mass(const Vector& proportions) const {
  if (proportions.size() != num_classes()) {
    fail(ErrorKind::kInvalidInput, "proportion vector length does not match class count");
  }
  Vector m(num_instances());
  for (Index i = 0; i < m.size(); ++i) {
    const int y = labels_[static_cast<std::size_t>(i)];
    m(i) = proportions(y) / counts_[static_cast<std::size_t>(y)];
  }
  return m;
}

ClassOperators build_class_operators(std::span<const int> labels, int num_classes) {
  return ClassOperators(labels, num_classes);
}

ProportionVector proportions_from_mass(const ClassOperators& ops, const Vector& mass) {
  if ((mass.array() < 0.0).any()) fail(ErrorKind::kInvalidInput, "mass has negative entries");
  return ProportionVector{ops.class_mass(mass)};
}

Vector mass_from_proportions(const ClassOperators& ops, const ProportionVector& proportions) {
  if ((proportions.values.array() < 0.0).any()) {
    fail(ErrorKind::kInvalidInput, "proportions have negative entries");
  }
  return ops.instance_mass(proportions.values);
}

}  // namespace jcpot
