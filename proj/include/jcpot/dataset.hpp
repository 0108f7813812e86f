#pragma once

#include <vector>

#include "jcpot/linalg.hpp"

namespace jcpot {

// Points (one per row) with dense class ids; -1 marks an unlabeled point.
struct LabeledDataset {
  Matrix points;
  std::vector<int> labels;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
  bool fully_labeled() const;
  bool fully_unlabeled() const;
  // One past the largest label, 0 when there are no labels.
  int num_classes() const;
};

// Stacks datasets row-wise, preserving order.
LabeledDataset concatenate(const std::vector<LabeledDataset>& parts);

}  // namespace jcpot
