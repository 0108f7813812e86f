#pragma once

// Decoding target labels from couplings.

#include <span>
#include <string_view>
#include <vector>

#include "jcpot/class_ops.hpp"
#include "jcpot/dataset.hpp"
#include "jcpot/linalg.hpp"
#include "jcpot/ot_core.hpp"

namespace jcpot {

// Class mass received by each target point (C x n).
struct LabelScores {
  Matrix values;
  Vector column_mass;

  // Columns scaled to sum to 1; all-zero columns are left at zero.
  Matrix normalized() const;
  // Indices of target points that received no mass.
  std::vector<Index> unlabeled_points() const;
};

enum class DecodeMethod { kLabelPropagation, kBarycentricMapping };

std::string_view to_string(DecodeMethod method);

struct Prediction {
  std::vector<int> labels;
  Matrix scores;  // C x n, normalized
  DecodeMethod method = DecodeMethod::kLabelPropagation;
};

// Column-wise argmax; ties go to the lowest class index.
std::vector<int> argmax_labels(const Matrix& scores);

// sum_k lambda_k * aggregate_k * gamma_k.
LabelScores label_propagation(std::span<const Matrix> couplings,
                              std::span<const ClassOperators> ops, const Vector& lambda);

Prediction predict_from_scores(const LabelScores& scores);

struct MappedSources {
  Matrix points;
  std::vector<Index> kept_rows;  // source rows that had positive mass
  int dropped = 0;
};

// Row i becomes (gamma(i,:) * target) / (gamma(i,:) 1). Zero-mass rows are
// dropped and counted.
MappedSources barycentric_map(const Matrix& coupling, const Matrix& target_points);

// 1-nearest-neighbor under squared Euclidean distance; ties go to the lowest
// reference index. Scores are one-hot.
Prediction classify_pt(const LabeledDataset& mapped_sources, const Matrix& target_points,
                       int num_classes);

// Labels of the nearest reference point for each query.
std::vector<int> nearest_neighbor_labels(const LabeledDataset& reference, const Matrix& queries);

struct OtdaResult {
  ot::SinkhornResult transport;
  Prediction lp;
  Prediction pt;
  int dropped_rows = 0;
};

// Single entropic coupling between the merged sources and the target with
// uniform marginals, decoded both ways.
OtdaResult otda_baseline(const LabeledDataset& merged_source, const Matrix& target_points,
                         const ot::SinkhornOptions& options, int num_classes = 0);

// Mass moved between mismatched classes: sum over cells with
// source_label != target_label.
double mass_leakage(const Matrix& coupling, std::span<const int> source_labels,
                    std::span<const int> target_labels);

}  // namespace jcpot
