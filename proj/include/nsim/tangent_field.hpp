#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nsim/dataset.hpp"
#include "nsim/linalg.hpp"
#include "nsim/partition.hpp"

namespace nsim {

// One unit index vector per level set, plus the level-set statistics it was
// estimated from.
struct TangentField {
  std::vector<Vector> vectors;             // a_j, unit norm
  std::vector<Vector> regression_vectors;  // b_j before normalization
  std::vector<Vector> level_means_x;
  std::vector<double> level_means_y;
  std::vector<std::size_t> counts;

  std::size_t num_level_sets() const { return vectors.size(); }
};

/// Learns a_j = b_j / |b_j| with b_j = pinv(Cov(X | level set j)) * Cov(X, Y | level set j).
///
/// Every level set needs at least D+1 samples; an undersized level set or a
/// vanishing regression vector (|b_j| < 1e-12) raises an infeasible error
/// naming the level set.
TangentField fit_tangents(const Dataset& data, const ResponsePartition& partition,
                          std::optional<double> rank_tol = std::nullopt);

/// G_ij = a_i^T a_j.
Matrix grammian(const TangentField& field);

const Vector& assign_tangent(const TangentField& field, const ResponsePartition& partition,
                             std::size_t sample_index);

}  // namespace nsim
