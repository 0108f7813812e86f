#include "jcpot/dataset.hpp"

#include <algorithm>

#include "jcpot/error.hpp"

namespace jcpot {

bool LabeledDataset::fully_labeled() const {
  return std::all_of(labels.begin(), labels.end(), [](int y) { return y >= 0; });
}

bool LabeledDataset::fully_unlabeled() const {
  return std::all_of(labels.begin(), labels.end(), [](int y) { return y == -1; });
}

int LabeledDataset::num_classes() const {
  int top = -1;
  for (int y : labels) top = std::max(top, y);
  return top + 1;
}

LabeledDataset concatenate(const std::vector<LabeledDataset>& parts) {
  if (parts.empty()) fail(ErrorKind::kInvalidInput, "nothing to concatenate");
  Index rows = 0;
  for (const auto& p : parts) {
    if (p.dim() != parts.front().dim()) fail(ErrorKind::kInvalidInput, "dimension mismatch");
    rows += p.size();
  }
  LabeledDataset out{Matrix(rows, parts.front().dim()), {}};
  out.labels.reserve(static_cast<std::size_t>(rows));
  Index at = 0;
  for (const auto& p : parts) {
    out.points.middleRows(at, p.size()) = p.points;
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    at += p.size();
  }
  return out;
}

}  // namespace jcpot
