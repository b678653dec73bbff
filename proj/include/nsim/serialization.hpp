#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "nsim/estimator.hpp"
#include "nsim/evaluation.hpp"
#include "nsim/io.hpp"
#include "nsim/synthetic.hpp"

namespace nsim {

inline constexpr int kModelFormatVersion = 1;

struct StoredModel {
  FittedNsim model;
  Preprocessing preprocessing;
};

/// Versioned model document: partition intervals, tangents, retained
/// training data with per-sample tangent assignment, k, eta and the feature
/// preprocessing. Loading reproduces predictions exactly.
nlohmann::json model_to_json(const FittedNsim& model, const Preprocessing& preprocessing);
StoredModel model_from_json(const nlohmann::json& doc);

nlohmann::json cv_report_to_json(const CvReport& report);

nlohmann::json synth_truth_to_json(const SynthConfig& config, const SynthData& data);

/// Columns: curve, D, c, N, rep, rmse_f, rmse_a, J_used, k_used, rmse_f_knn.
/// Skipped runs are omitted here and listed in the summary.
std::string records_to_csv(const std::vector<RunRecord>& records);
nlohmann::json schedule_summary_to_json(const ScheduleConfig& config, const ScheduleOutput& output);

std::string holdout_rows_to_csv(const HoldoutReport& report);
nlohmann::json holdout_to_json(const HoldoutReport& report, const HoldoutConfig& config);

}  // namespace nsim
