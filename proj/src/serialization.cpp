#include "nsim/serialization.hpp"

#include "nsim/error.hpp"

namespace nsim {

using nlohmann::json;

namespace {

json vector_json(const Vector& v) { return json(std::vector<double>(v.begin(), v.end())); }

json eta_json(RestrictingRadius eta) { return eta.is_bounded() ? json(eta.value()) : json("inf"); }

RestrictingRadius eta_from_json(const json& j) {
  if (j.is_string()) return RestrictingRadius::parse(j.get<std::string>());
  return RestrictingRadius::of(j.get<double>());
}

json pair_json(const CvPair& p) {
  json out{{"J", p.J}};
  out["k"] = p.k ? json(*p.k) : json("two-thirds");
  return out;
}

[[noreturn]] void schema_error(const std::string& what) {
  fail(ErrorKind::data, "schema_error", "model document: " + what);
}

}  // namespace

json model_to_json(const FittedNsim& model, const Preprocessing& preprocessing) {
  json doc;
  doc["version"] = kModelFormatVersion;
  doc["algorithm"] = model.split() ? "split" : "unsplit";
  doc["partition_kind"] = std::string(to_string(model.partition_kind()));

  json intervals = json::array();
  for (const auto& cell : model.partition().intervals) {
    intervals.push_back({{"lower", cell.lower}, {"upper", cell.upper}, {"closed_upper", cell.closed_upper}});
  }
  doc["intervals"] = std::move(intervals);

  json tangents = json::array();
  for (const auto& a : model.tangents().vectors) tangents.push_back(vector_json(a));
  doc["tangents"] = std::move(tangents);

  const auto& train = model.train();
  json rows = json::array();
  for (Index i = 0; i < train.features.rows(); ++i) rows.push_back(vector_json(train.features.row(i).transpose()));
  doc["train_features"] = std::move(rows);
  doc["train_responses"] = vector_json(train.responses);
  doc["tangent_index"] = model.tangent_index();
  doc["k"] = model.k();
  doc["eta"] = eta_json(model.eta());

  json pre;
  pre["raw_dim"] = preprocessing.raw_dim;
  pre["kept_columns"] = preprocessing.kept_columns;
  pre["standardized"] = preprocessing.standardized;
  pre["means"] = preprocessing.means;
  pre["stds"] = preprocessing.stds;
  pre["log_response"] = preprocessing.log_response;
  doc["preprocessing"] = std::move(pre);
  return doc;
}

StoredModel model_from_json(const json& doc) {
  try {
    if (!doc.is_object()) schema_error("not a JSON object");
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) schema_error("unsupported version " + std::to_string(version));

    ResponsePartition partition;
    partition.kind = parse_partition_kind(doc.at("partition_kind").get<std::string>());
    for (const auto& cell : doc.at("intervals")) {
      partition.intervals.push_back(
          {cell.at("lower").get<double>(), cell.at("upper").get<double>(), cell.at("closed_upper").get<bool>()});
    }
    const std::size_t J = partition.intervals.size();
    if (J < 1) schema_error("no intervals");

    TangentField field;
    for (const auto& t : doc.at("tangents")) {
      const auto values = t.get<std::vector<double>>();
      field.vectors.push_back(Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size())));
    }
    if (field.vectors.size() != J) schema_error("tangent count differs from interval count");

    const auto& rows = doc.at("train_features");
    const auto responses = doc.at("train_responses").get<std::vector<double>>();
    if (rows.empty() || rows.size() != responses.size()) schema_error("training data is empty or ragged");
    const auto D = static_cast<Index>(rows.front().size());
    Dataset train;
    train.features.resize(static_cast<Index>(rows.size()), D);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto row = rows[i].get<std::vector<double>>();
      if (static_cast<Index>(row.size()) != D) schema_error("ragged training row");
      for (Index d = 0; d < D; ++d) train.features(static_cast<Index>(i), d) = row[static_cast<std::size_t>(d)];
    }
    train.responses = Eigen::Map<const Vector>(responses.data(), static_cast<Index>(responses.size()));
    train.validate();
    for (const auto& a : field.vectors) {
      if (a.size() != D) schema_error("tangent dimension differs from training data");
    }

    auto tangent_index = doc.at("tangent_index").get<std::vector<std::size_t>>();
    if (tangent_index.size() != train.size()) schema_error("tangent_index length differs from training data");
    for (auto j : tangent_index) {
      if (j >= J) schema_error("tangent_index out of range");
    }

    // Level-set statistics are recomputed over the retained samples.
    partition.labels = tangent_index;
    partition.groups.assign(J, {});
    for (std::size_t i = 0; i < tangent_index.size(); ++i) partition.groups[tangent_index[i]].push_back(static_cast<Index>(i));
    for (std::size_t j = 0; j < J; ++j) {
      const auto& g = partition.groups[j];
      field.counts.push_back(g.size());
      if (g.empty()) {
        field.level_means_x.push_back(Vector::Zero(D));
        field.level_means_y.push_back(0.0);
      } else {
        const Dataset level = train.subset(g);
        field.level_means_x.push_back(linalg::sample_mean(level.features));
        field.level_means_y.push_back(level.responses.mean());
      }
    }

    const bool split = doc.value("algorithm", std::string("unsplit")) == "split";
    FittedNsim model(std::move(partition), std::move(field), std::move(train), std::move(tangent_index),
                     doc.at("k").get<std::size_t>(), eta_from_json(doc.at("eta")), split);

    Preprocessing pre = Preprocessing::identity(static_cast<std::size_t>(D));
    if (doc.contains("preprocessing")) {
      const auto& p = doc.at("preprocessing");
      pre.raw_dim = p.at("raw_dim").get<std::size_t>();
      pre.kept_columns = p.at("kept_columns").get<std::vector<std::size_t>>();
      pre.standardized = p.at("standardized").get<bool>();
      pre.means = p.at("means").get<std::vector<double>>();
      pre.stds = p.at("stds").get<std::vector<double>>();
      pre.log_response = p.at("log_response").get<bool>();
      if (pre.kept_columns.size() != static_cast<std::size_t>(D)) schema_error("preprocessing width differs from model");
      if (pre.standardized && (pre.means.size() != pre.kept_columns.size() || pre.stds.size() != pre.kept_columns.size())) {
        schema_error("standardization statistics incomplete");
      }
      for (auto c : pre.kept_columns) {
        if (c >= pre.raw_dim) schema_error("kept column out of range");
      }
    }
    return {std::move(model), std::move(pre)};
  } catch (const json::exception& e) {
    schema_error(e.what());
  }
}

json cv_report_to_json(const CvReport& report) {
  json doc;
  doc["folds"] = report.folds;
  doc["seed"] = report.seed;
  doc["partition_kind"] = std::string(to_string(report.partition_kind));
  doc["eta"] = eta_json(report.eta);
  json grid = json::array();
  for (const auto& p : report.grid) grid.push_back(pair_json(p));
  doc["grid"] = std::move(grid);
  json scores = json::array();
  for (const auto& s : report.scores) {
    json entry = pair_json(s.pair);
    entry["mean_mse"] = s.mean_mse;
    entry["fold_mse"] = s.fold_mse;
    scores.push_back(std::move(entry));
  }
  doc["scores"] = std::move(scores);
  json selected = pair_json(report.selected.pair);
  selected["mean_mse"] = report.selected.mean_mse;
  doc["selected"] = std::move(selected);
  json skipped = json::array();
  for (const auto& s : report.skipped) {
    json entry = pair_json(s.pair);
    entry["fold"] = s.fold;
    entry["reason"] = s.reason;
    skipped.push_back(std::move(entry));
  }
  doc["skipped"] = std::move(skipped);
  return doc;
}

json synth_truth_to_json(const SynthConfig& config, const SynthData& data) {
  json doc;
  doc["curve"] = std::string(to_string(config.curve));
  doc["ambient_dim"] = config.ambient_dim;
  doc["tube_radius"] = config.tube_radius;
  doc["noise_factor"] = config.noise_factor;
  doc["noise_level"] = data.noise_level;
  doc["n_samples"] = config.n_samples;
  doc["seed"] = config.seed;
  std::vector<double> t, f;
  json a = json::array();
  for (const auto& s : data.samples) {
    t.push_back(s.t_true);
    f.push_back(s.f);
    a.push_back(vector_json(s.a_true));
  }
  doc["t_true"] = std::move(t);
  doc["f_true"] = std::move(f);
  doc["a_true"] = std::move(a);
  return doc;
}

std::string records_to_csv(const std::vector<RunRecord>& records) {
  std::string out = "curve,D,c,N,rep,rmse_f,rmse_a,J_used,k_used,rmse_f_knn\n";
  for (const auto& r : records) {
    if (r.skipped) continue;
    out += std::string(to_string(r.curve)) + ',' + std::to_string(r.D) + ',' + format_double(r.c) + ',' +
           std::to_string(r.N) + ',' + std::to_string(r.rep) + ',' + format_double(r.rmse_f) + ',' +
           format_double(r.rmse_a) + ',' + std::to_string(r.J_used) + ',' + std::to_string(r.k_used) + ',' +
           format_double(r.rmse_f_knn) + '\n';
  }
  return out;
}

namespace {

json summaries_json(const std::vector<Summary>& s) {
  json out = json::array();
  for (const auto& v : s) out.push_back({{"mean", v.mean}, {"std", v.std}});
  return out;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json schedule_summary_to_json(const ScheduleConfig& config, const ScheduleOutput& output) {
  json doc;
  doc["fingerprint"] = schedule_fingerprint(config);
  doc["curve"] = std::string(to_string(config.curve));
  doc["n_grid"] = config.n_grid;
  doc["D_values"] = config.D_values;
  doc["noise_factors"] = config.noise_factors;
  doc["repetitions"] = config.repetitions;
  doc["seed"] = config.seed;
  doc["tube_radius"] = config.tube_radius;
  doc["eta"] = eta_json(config.eta);
  doc["cv_J_grid"] = config.cv_J_grid;
  doc["test_points"] = config.test_points;
  json results = json::array();
  for (const auto& r : output.results) {
    json entry;
    entry["D"] = r.D;
    entry["c"] = r.c;
    entry["n_values"] = r.n_values;
    entry["rmse_f"] = summaries_json(r.rmse_f);
    entry["rmse_a"] = summaries_json(r.rmse_a);
    entry["rmse_f_knn"] = summaries_json(r.rmse_f_knn);
    entry["mean_J"] = r.mean_J;
    entry["slope_f"] = optional_json(r.slope_f());
    entry["slope_a"] = optional_json(r.slope_a());
    entry["slope_knn"] = optional_json(r.slope_knn());
    entry["skipped_runs"] = r.skipped_runs;
    results.push_back(std::move(entry));
  }
  doc["results"] = std::move(results);
  json skipped = json::array();
  for (const auto& rec : output.records) {
    if (rec.skipped) skipped.push_back({{"D", rec.D}, {"c", rec.c}, {"N", rec.N}, {"rep", rec.rep}, {"reason", rec.skip_reason}});
  }
  doc["skipped"] = std::move(skipped);
  return doc;
}

std::string holdout_rows_to_csv(const HoldoutReport& report) {
  std::string out = "split,estimator,rmse,k,J,failed\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.split) + ',' + r.estimator + ',' + (r.failed ? std::string() : format_double(r.rmse)) + ',' +
           (r.k ? std::to_string(*r.k) : std::string()) + ',' + (r.J ? std::to_string(*r.J) : std::string()) + ',' +
           (r.failed ? "1" : "0") + '\n';
  }
  return out;
}

json holdout_to_json(const HoldoutReport& report, const HoldoutConfig& config) {
  json doc;
  doc["n"] = report.n;
  doc["dim"] = report.dim;
  doc["response"] = {{"mean", report.response.mean}, {"std", report.response.std}};
  doc["splits"] = config.splits;
  doc["test_fraction"] = config.test_fraction;
  doc["folds"] = config.folds;
  doc["J_grid"] = config.J_grid;
  doc["k_grid"] = config.k_grid;
  doc["eta"] = eta_json(config.eta);
  doc["seed"] = config.seed;
  doc["algorithm"] = "unsplit";
  json est = json::array();
  for (const auto& e : report.estimators) {
    est.push_back({{"estimator", e.estimator},
                   {"rmse_mean", e.rmse.mean},
                   {"rmse_std", e.rmse.std},
                   {"mean_k", optional_json(e.mean_k)},
                   {"mean_J", optional_json(e.mean_J)},
                   {"completed", e.completed},
                   {"failed", e.failed}});
  }
  doc["estimators"] = std::move(est);
  return doc;
}

}  // namespace nsim
