#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsim/dataset.hpp"
#include "nsim/estimator.hpp"
#include "nsim/synthetic.hpp"

namespace nsim {

/// Relative RMSE sqrt(sum (p - f)^2 / sum f^2).
double rmse_function(const Vector& predictions, const Vector& truths);

/// sqrt(mean_j |a_hat_j - a_j|^2).
double rmse_tangent(const std::vector<Vector>& estimated, const std::vector<Vector>& truth);

/// Least-squares slope of log(error) against log(n).
double decay_slope(const std::vector<double>& n_values, const std::vector<double>& errors);

/// True tangents gamma'(mean t) for each level set of a partition, with the
/// mean taken over the level set's samples.
std::vector<Vector> midpoint_tangents(const ParametricCurve& curve, const ResponsePartition& partition,
                                      const std::vector<SynthSample>& samples, std::size_t ambient_dim);

// ---------------------------------------------------------------------------
// Synthetic rate studies

struct ScheduleConfig {
  CurveKind curve = CurveKind::line;
  std::vector<std::size_t> D_values{4};
  std::vector<double> noise_factors{0.0};
  std::vector<std::size_t> n_grid{128, 256, 512, 1024, 2048, 4096};
  std::size_t repetitions = 10;
  std::uint64_t seed = 0;
  double tube_radius = 0.25;
  RestrictingRadius eta = RestrictingRadius::of(0.5);
  std::vector<std::size_t> cv_J_grid{1, 2, 4, 8};
  std::size_t cv_folds = 5;
  std::size_t test_points = 1000;
  // Level sets per sample in the noise-free rule J = N / (rate * D).
  std::size_t noise_free_samples_per_dim = 15;
};

// Named presets used by the benchmark command; throws on an unknown name.
ScheduleConfig schedule_profile(const std::string& name, std::uint64_t seed);
std::vector<std::string> schedule_profile_names();

struct RunRecord {
  CurveKind curve = CurveKind::line;
  std::size_t D = 0;
  double c = 0.0;
  std::size_t N = 0;
  std::size_t rep = 0;
  double rmse_f = 0.0;
  double rmse_a = 0.0;
  std::size_t J_used = 0;
  std::size_t k_used = 0;
  double rmse_f_knn = 0.0;
  bool skipped = false;
  std::string skip_reason;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;
};

struct ExperimentResult {
  CurveKind curve = CurveKind::line;
  std::size_t D = 0;
  double c = 0.0;
  std::vector<std::size_t> n_values;  // only N with at least one completed repetition
  std::vector<Summary> rmse_f;
  std::vector<Summary> rmse_a;
  std::vector<Summary> rmse_f_knn;
  std::vector<double> mean_J;
  std::size_t repetitions = 0;
  std::size_t skipped_runs = 0;
  std::string fingerprint;

  std::optional<double> slope_f() const;
  std::optional<double> slope_a() const;
  std::optional<double> slope_knn() const;
};

struct ScheduleOutput {
  std::vector<ExperimentResult> results;  // one per (D, c), config order
  std::vector<RunRecord> records;
};

/// One repetition of one grid cell; exposed for tests.
RunRecord run_single(const ScheduleConfig& config, std::size_t D, double c, std::size_t N,
                     std::size_t rep, std::uint64_t cell_seed);

/// Runs every (D, c, N) cell `repetitions` times with per-run seeds derived
/// from (seed, cell index, repetition) and aggregates mean/std per N.
ScheduleOutput run_schedule(const ScheduleConfig& config);

/// Aggregation only; independent of record order.
std::vector<ExperimentResult> aggregate(const ScheduleConfig& config, const std::vector<RunRecord>& records);

std::string schedule_fingerprint(const ScheduleConfig& config);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c);

// ---------------------------------------------------------------------------
// Hold-out benchmark on a user dataset (repeated random splits, cross-validated
// hyperparameters on the training part, RMSE on the held-out part).

struct HoldoutConfig {
  std::size_t splits = 30;
  double test_fraction = 0.15;
  std::size_t folds = 5;
  std::vector<std::size_t> J_grid{1, 2, 3, 4, 5, 6, 8, 10};
  std::vector<std::size_t> k_grid{1, 2, 3, 5, 8, 12, 16, 24, 32, 48, 64};
  RestrictingRadius eta = RestrictingRadius::unbounded();
  std::uint64_t seed = 0;
};

struct HoldoutSplitRow {
  std::size_t split = 0;
  std::string estimator;
  double rmse = 0.0;
  std::optional<std::size_t> k;
  std::optional<std::size_t> J;
  bool failed = false;
  std::string reason;
};

struct HoldoutEstimatorSummary {
  std::string estimator;
  Summary rmse;
  std::optional<double> mean_k;
  std::optional<double> mean_J;
  std::size_t completed = 0;
  std::size_t failed = 0;
};

struct HoldoutReport {
  std::size_t n = 0;
  std::size_t dim = 0;
  Summary response;  // mean and std of Y
  std::vector<HoldoutEstimatorSummary> estimators;
  std::vector<HoldoutSplitRow> rows;
};

/// Plain (absolute) RMSE sqrt(mean (p - y)^2).
double rmse_absolute(const Vector& predictions, const Vector& truths);

HoldoutReport run_holdout(const Dataset& data, const HoldoutConfig& config);

Summary summarize(const std::vector<double>& values);

}  // namespace nsim
