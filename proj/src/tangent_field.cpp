#include "nsim/tangent_field.hpp"

#include <algorithm>
#include <string>

#include "nsim/error.hpp"

namespace nsim {

namespace {

constexpr double kMinDirectionNorm = 1e-12;

}  // namespace

TangentField fit_tangents(const Dataset& data, const ResponsePartition& partition,
                          std::optional<double> rank_tol) {
  data.validate();
  if (partition.labels.size() != data.size()) {
    fail(ErrorKind::usage, "length_mismatch", "partition does not match the dataset size");
  }
  const std::size_t J = partition.num_level_sets();
  const std::size_t D = data.dim();

  TangentField field;
  field.vectors.reserve(J);
  field.regression_vectors.reserve(J);
  field.level_means_x.reserve(J);
  field.level_means_y.reserve(J);
  field.counts.reserve(J);

  for (std::size_t j = 0; j < J; ++j) {
    const auto& group = partition.groups[j];
    if (group.size() < D + 1) {
      fail(ErrorKind::infeasible, "level_set_too_small",
           "level set " + std::to_string(j) + " too small (need >= " + std::to_string(D + 1) +
               ", has " + std::to_string(group.size()) + ")");
    }
    const Dataset level = data.subset(group);
    const Matrix cov = linalg::sample_covariance(level.features);
    const Vector cross = linalg::cross_covariance(level.features, level.responses);
    Vector b = linalg::pseudo_inverse(cov, rank_tol) * cross;
    const double norm = b.norm();
    if (!(norm >= kMinDirectionNorm)) {
      fail(ErrorKind::infeasible, "degenerate_direction",
           "degenerate regression direction in level set " + std::to_string(j));
    }
    field.vectors.push_back(b / norm);
    field.regression_vectors.push_back(std::move(b));
    field.level_means_x.push_back(linalg::sample_mean(level.features));
    field.level_means_y.push_back(level.responses.mean());
    field.counts.push_back(group.size());
  }
  return field;
}

Matrix grammian(const TangentField& field) {
  // Entries are cosines; the diagonal is exactly 1 rather than a rounded squared norm.
  const auto J = static_cast<Index>(field.vectors.size());
  Matrix g(J, J);
  for (Index i = 0; i < J; ++i) {
    const auto& ai = field.vectors[static_cast<std::size_t>(i)];
    g(i, i) = 1.0;
    for (Index j = i + 1; j < J; ++j) {
      const auto& aj = field.vectors[static_cast<std::size_t>(j)];
      const double v = std::clamp(ai.dot(aj) / (ai.norm() * aj.norm()), -1.0, 1.0);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

const Vector& assign_tangent(const TangentField& field, const ResponsePartition& partition,
                             std::size_t sample_index) {
  if (sample_index >= partition.labels.size()) {
    fail(ErrorKind::usage, "out_of_range",
         "sample index " + std::to_string(sample_index) + " out of range");
  }
  return field.vectors.at(partition.labels[sample_index]);
}

}  // namespace nsim
