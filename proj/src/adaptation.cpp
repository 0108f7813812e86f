#include "jcpot/adaptation.hpp"

#include <limits>
#include <string>

#include "jcpot/error.hpp"

namespace jcpot {

std::string_view to_string(DecodeMethod method) {
  return method == DecodeMethod::kLabelPropagation ? "LP" : "PT";
}

Matrix LabelScores::normalized() const {
  Matrix out = values;
  for (Index j = 0; j < out.cols(); ++j) {
    const double mass = out.col(j).sum();
    if (mass > 0.0) out.col(j) /= mass;
  }
  return out;
}

std::vector<Index> LabelScores::unlabeled_points() const {
  std::vector<Index> out;
  for (Index j = 0; j < column_mass.size(); ++j) {
    if (!(column_mass(j) > 0.0)) out.push_back(j);
  }
  return out;
}

std::vector<int> argmax_labels(const Matrix& scores) {
  std::vector<int> labels(static_cast<std::size_t>(scores.cols()));
  for (Index j = 0; j < scores.cols(); ++j) {
    Index best = 0;
    for (Index c = 1; c < scores.rows(); ++c) {
      if (scores(c, j) > scores(best, j)) best = c;
    }
    labels[static_cast<std::size_t>(j)] = static_cast<int>(best);
  }
  return labels;
}

LabelScores label_propagation(std::span<const Matrix> couplings,
                              std::span<const ClassOperators> ops, const Vector& lambda) {
  if (couplings.empty() || couplings.size() != ops.size() ||
      static_cast<Index>(couplings.size()) != lambda.size()) {
    fail(ErrorKind::kInvalidInput, "label propagation: domain counts disagree");
  }
  const Index n = couplings.front().cols();
  const int num_classes = ops.front().num_classes();
  LabelScores scores{Matrix::Zero(num_classes, n), Vector()};
  for (std::size_t k = 0; k < couplings.size(); ++k) {
    const Matrix& gamma = couplings[k];
    if (gamma.cols() != n || gamma.rows() != ops[k].num_instances() ||
        ops[k].num_classes() != num_classes) {
      fail(ErrorKind::kInvalidInput,
           "label propagation: coupling " + std::to_string(k) + " has inconsistent shape");
    }
    scores.values.noalias() += lambda(static_cast<Index>(k)) * (ops[k].aggregate() * gamma);
  }
  scores.column_mass = scores.values.colwise().sum().transpose();
  return scores;
}

Prediction predict_from_scores(const LabelScores& scores) {
  Prediction p;
  p.scores = scores.normalized();
  p.labels = argmax_labels(p.scores);
  p.method = DecodeMethod::kLabelPropagation;
  return p;
}

MappedSources barycentric_map(const Matrix& coupling, const Matrix& target_points) {
  if (coupling.cols() != target_points.rows()) {
    fail(ErrorKind::kInvalidInput, "coupling columns do not match the target points");
  }
  const Vector mass = coupling.rowwise().sum();
  MappedSources out;
  for (Index i = 0; i < mass.size(); ++i) {
    if (mass(i) > 0.0) {
      out.kept_rows.push_back(i);
    } else {
      ++out.dropped;
    }
  }
  out.points.resize(static_cast<Index>(out.kept_rows.size()), target_points.cols());
  for (std::size_t r = 0; r < out.kept_rows.size(); ++r) {
    const Index i = out.kept_rows[r];
    out.points.row(static_cast<Index>(r)) = (coupling.row(i) * target_points) / mass(i);
  }
  return out;
}

std::vector<int> nearest_neighbor_labels(const LabeledDataset& reference, const Matrix& queries) {
  if (reference.size() == 0) fail(ErrorKind::kInvalidInput, "nearest neighbor: empty reference");
  if (reference.dim() != queries.cols()) {
    fail(ErrorKind::kInvalidInput, "nearest neighbor: dimension mismatch");
  }
  std::vector<int> labels(static_cast<std::size_t>(queries.rows()));
  for (Index q = 0; q < queries.rows(); ++q) {
    Index best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Index r = 0; r < reference.size(); ++r) {
      const double dist = (reference.points.row(r) - queries.row(q)).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = r;
      }
    }
    labels[static_cast<std::size_t>(q)] = reference.labels[static_cast<std::size_t>(best)];
  }
  return labels;
}

Prediction classify_pt(const LabeledDataset& mapped_sources, const Matrix& target_points,
                       int num_classes) {
  if (mapped_sources.size() == 0) fail(ErrorKind::kInvalidInput, "no mapped source points");
  if (num_classes <= 0) num_classes = mapped_sources.num_classes();
  Prediction p;
  p.method = DecodeMethod::kBarycentricMapping;
  p.labels = nearest_neighbor_labels(mapped_sources, target_points);
  p.scores = Matrix::Zero(num_classes, target_points.rows());
  for (std::size_t j = 0; j < p.labels.size(); ++j) {
    p.scores(p.labels[j], static_cast<Index>(j)) = 1.0;
  }
  return p;
}

OtdaResult otda_baseline(const LabeledDataset& merged_source, const Matrix& target_points,
                         const ot::SinkhornOptions& options, int num_classes) {
  if (num_classes <= 0) num_classes = merged_source.num_classes();
  const ClassOperators ops(merged_source.labels, num_classes);
  const auto cost = ot::squared_euclidean_cost(merged_source.points, target_points);

  OtdaResult result;
  result.transport =
      ot::sinkhorn(ot::DiscreteMeasure::uniform(merged_source.points),
                   ot::DiscreteMeasure::uniform(target_points), cost, options);

  const Vector one = Vector::Ones(1);
  const Matrix& gamma = result.transport.coupling;
  result.lp = predict_from_scores(
      label_propagation(std::span<const Matrix>(&gamma, 1), std::span(&ops, 1), one));

  const MappedSources mapped = barycentric_map(gamma, target_points);
  result.dropped_rows = mapped.dropped;
  LabeledDataset reference{mapped.points, {}};
  for (Index i : mapped.kept_rows) {
    reference.labels.push_back(merged_source.labels[static_cast<std::size_t>(i)]);
  }
  result.pt = classify_pt(reference, target_points, num_classes);
  return result;
}

double mass_leakage(const Matrix& coupling, std::span<const int> source_labels,
                    std::span<const int> target_labels) {
  if (static_cast<Index>(source_labels.size()) != coupling.rows() ||
      static_cast<Index>(target_labels.size()) != coupling.cols()) {
    fail(ErrorKind::kInvalidInput, "mass leakage: label counts do not match the coupling");
  }
  double leak = 0.0;
  for (Index j = 0; j < coupling.cols(); ++j) {
    for (Index i = 0; i < coupling.rows(); ++i) {
      if (source_labels[static_cast<std::size_t>(i)] != target_labels[static_cast<std::size_t>(j)]) {
        leak += coupling(i, j);
      }
    }
  }
  return leak;
}

}  // namespace jcpot
