#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsim/dataset.hpp"
#include "nsim/partition.hpp"
#include "nsim/proxy_metric.hpp"
#include "nsim/tangent_field.hpp"

namespace nsim {

struct FitOptions {
  std::size_t J = 1;
  std::size_t k = 1;
  RestrictingRadius eta = RestrictingRadius::unbounded();
  PartitionKind partition_kind = PartitionKind::dyadic;
  std::optional<double> rank_tol;
};

// A fitted estimator: partition and tangents learned on the geometry data,
// plus the retained samples (with their assigned tangent) used for
// neighbor averaging. Immutable; predict() is safe to call concurrently.
class FittedNsim {
 public:
  FittedNsim(ResponsePartition partition, TangentField tangents, Dataset train,
             std::vector<std::size_t> tangent_index, std::size_t k, RestrictingRadius eta,
             bool split);

  const ResponsePartition& partition() const { return partition_; }
  const TangentField& tangents() const { return tangents_; }
  const Dataset& train() const { return train_; }
  // Level set whose tangent is attached to retained sample i.
  const std::vector<std::size_t>& tangent_index() const { return tangent_index_; }
  std::size_t k() const { return k_; }
  RestrictingRadius eta() const { return eta_; }
  PartitionKind partition_kind() const { return partition_.kind; }
  // True when built by fit_split (tangents extended to a second sample).
  bool split() const { return split_; }
  std::size_t dim() const { return train_.dim(); }

  const ProxyNeighborSearch& search() const { return search_; }

 private:
  ResponsePartition partition_;
  TangentField tangents_;
  Dataset train_;
  std::vector<std::size_t> tangent_index_;
  std::size_t k_;
  RestrictingRadius eta_;
  bool split_;
  ProxyNeighborSearch search_;
};

/// Partition by response, learn one index vector per level set and retain
/// the training data for proxy-metric neighbor search. Infeasible level sets
/// are reported with the offending J in the message.
FittedNsim fit(const Dataset& data, const FitOptions& options);

/// Mean response of the k proxy-nearest retained samples. Fewer than k
/// finite neighbors are averaged as they come; with none inside eta the
/// Euclidean nearest sample's response is returned.
double predict(const FittedNsim& model, const Vector& x);
Vector predict(const FittedNsim& model, const Matrix& rows);

/// Sample-split variant: tangents from `geometry`, each `prediction` sample
/// inherits the tangent of its proxy-nearest geometry sample (Euclidean
/// nearest when none lies within eta), and predictions average
/// `prediction` responses only.
FittedNsim fit_split(const Dataset& geometry, const Dataset& prediction, const FitOptions& options);

// ---------------------------------------------------------------------------
// Cross-validation

// k is either a fixed grid or ceil(0.5 * n_train^(2/3)) recomputed per fold.
struct KRule {
  static KRule fixed(std::vector<std::size_t> ks) { return KRule{std::move(ks), false}; }
  static KRule two_thirds() { return KRule{{}, true}; }

  std::vector<std::size_t> ks;
  bool two_thirds_rule = false;
};

std::size_t two_thirds_k(std::size_t n_train);

struct CvPair {
  std::size_t J = 1;
  std::optional<std::size_t> k;  // empty means the two-thirds rule

  friend bool operator==(const CvPair&, const CvPair&) = default;
};

struct CvScore {
  CvPair pair;
  double mean_mse = 0.0;
  std::vector<double> fold_mse;
};

struct CvSkip {
  CvPair pair;
  std::size_t fold = 0;
  std::string reason;
};

struct CvOptions {
  std::vector<std::size_t> J_grid{1};
  KRule k_rule = KRule::fixed({1});
  RestrictingRadius eta = RestrictingRadius::unbounded();
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  PartitionKind partition_kind = PartitionKind::dyadic;
};

struct CvReport {
  std::vector<CvPair> grid;
  std::vector<CvScore> scores;  // feasible pairs only, grid order
  CvScore selected;
  std::vector<CvSkip> skipped;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  PartitionKind partition_kind = PartitionKind::dyadic;
  RestrictingRadius eta = RestrictingRadius::unbounded();
};

/// Contiguous folds of a seeded permutation of 0..n-1.
std::vector<std::vector<Index>> fold_indices(std::size_t n, std::size_t folds, std::uint64_t seed);

/// Mean validation MSE for every (J, k) pair. A pair is scored only if it is
/// feasible on every fold; each infeasible (pair, fold) is listed in
/// `skipped`. Ties in the selection go to the earlier grid entry.
CvReport cross_validate(const Dataset& data, const CvOptions& options);

// ---------------------------------------------------------------------------
// Baselines

/// Euclidean kNN average, k clamped to N, ties to the lower index.
double baseline_knn(const Dataset& data, const Vector& x, std::size_t k);

struct LinearModel {
  Vector weights;
  double intercept = 0.0;

  double predict(const Vector& x) const { return weights.dot(x) + intercept; }
};

/// Ordinary least squares with intercept via the pseudo-inverse of the
/// feature covariance.
LinearModel baseline_linreg(const Dataset& data);

}  // namespace nsim
