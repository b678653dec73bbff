#include "nsim/nsim.h"

#include <cstdlib>
#include <cstring>
#include <map>
#include <mutex>
#include <new>
#include <string>

#include "nsim/error.hpp"
#include "nsim/estimator.hpp"
#include "nsim/evaluation.hpp"
#include "nsim/io.hpp"
#include "nsim/serialization.hpp"
#include "nsim/synthetic.hpp"

struct nsim_dataset {
  nsim::Dataset data;
  nsim::Preprocessing preprocessing;
  std::vector<std::string> feature_names;
  std::string response_name;
  std::vector<std::string> warnings;
};

struct nsim_model {
  nsim::StoredModel stored;
};

namespace {

thread_local std::string g_error_message;
thread_local std::string g_error_code;

nsim_status set_error(nsim_status status, std::string code, std::string message) {
  g_error_code = std::move(code);
  g_error_message = std::move(message);
  return status;
}

template <class F>
nsim_status guarded(F&& body) {
  try {
    body();
    g_error_code.clear();
    g_error_message.clear();
    return NSIM_OK;
  } catch (const nsim::Error& e) {
    return set_error(static_cast<nsim_status>(e.kind()), e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(NSIM_ERR_INTERNAL, "out_of_memory", "out of memory");
  } catch (const std::exception& e) {
    return set_error(NSIM_ERR_INTERNAL, "internal", e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) nsim::fail(nsim::ErrorKind::usage, "invalid_argument", what);
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nsim::RestrictingRadius to_radius(const nsim_radius& r) {
  return r.unbounded ? nsim::RestrictingRadius::unbounded() : nsim::RestrictingRadius::of(r.value);
}

nsim_radius from_radius(nsim::RestrictingRadius r) {
  return r.is_bounded() ? nsim_radius{0, r.value()} : nsim_radius{1, 0.0};
}

nsim::PartitionKind to_kind(nsim_partition_kind k) {
  require(k == NSIM_PARTITION_DYADIC || k == NSIM_PARTITION_EQUIBLOCK, "unknown partition kind");
  return k == NSIM_PARTITION_DYADIC ? nsim::PartitionKind::dyadic : nsim::PartitionKind::equiblock;
}

nsim::CurveKind to_curve(nsim_curve_kind c) {
  switch (c) {
    case NSIM_CURVE_LINE: return nsim::CurveKind::line;
    case NSIM_CURVE_S_CURVE: return nsim::CurveKind::s_curve;
    case NSIM_CURVE_HELIX: return nsim::CurveKind::helix;
  }
  nsim::fail(nsim::ErrorKind::usage, "invalid_argument", "unknown curve kind");
}

nsim_curve_kind from_curve(nsim::CurveKind c) {
  switch (c) {
    case nsim::CurveKind::line: return NSIM_CURVE_LINE;
    case nsim::CurveKind::s_curve: return NSIM_CURVE_S_CURVE;
    case nsim::CurveKind::helix: return NSIM_CURVE_HELIX;
  }
  return NSIM_CURVE_LINE;
}

nsim::FitOptions to_fit_options(const nsim_fit_options* o) {
  require(o != nullptr, "null fit options");
  nsim::FitOptions f;
  f.J = o->J;
  f.k = o->k;
  f.eta = to_radius(o->eta);
  f.partition_kind = to_kind(o->partition);
  if (o->rank_tol > 0.0) f.rank_tol = o->rank_tol;
  return f;
}

template <class T>
std::vector<T> to_vector(const T* values, size_t count, const char* what) {
  require(count == 0 || values != nullptr, what);
  return std::vector<T>(values, values + count);
}

nsim::Preprocessing preprocessing_for(const nsim_dataset& d) { return d.preprocessing; }

}  // namespace

extern "C" {

const char* nsim_version(void) { return "1.0.0"; }
const char* nsim_last_error_message(void) { return g_error_message.c_str(); }
const char* nsim_last_error_code(void) { return g_error_code.c_str(); }
void nsim_string_free(char* s) { std::free(s); }
void nsim_array_free(double* a) { std::free(a); }

// ---- datasets --------------------------------------------------------------

nsim_status nsim_dataset_create(const double* features, const double* responses, size_t n, size_t d,
                                nsim_dataset** out) {
  return guarded([&] {
    require(out != nullptr && features != nullptr && responses != nullptr, "null argument");
    auto ds = std::make_unique<nsim_dataset>();
    ds->data.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        features, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    ds->data.responses = Eigen::Map<const nsim::Vector>(responses, static_cast<Eigen::Index>(n));
    ds->data.validate();
    ds->preprocessing = nsim::Preprocessing::identity(d);
    *out = ds.release();
  });
}

nsim_status nsim_dataset_load_csv(const char* path, const nsim_ingest_options* options, nsim_dataset** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    nsim::IngestOptions opts;
    if (options) {
      opts.standardize = options->standardize != 0;
      opts.log_response = options->log_response != 0;
    }
    auto loaded = nsim::ingest_csv(path, opts);
    auto ds = std::make_unique<nsim_dataset>();
    ds->data = std::move(loaded.data);
    ds->preprocessing = std::move(loaded.preprocessing);
    ds->feature_names = std::move(loaded.feature_names);
    ds->response_name = std::move(loaded.response_name);
    ds->warnings = std::move(loaded.warnings);
    *out = ds.release();
  });
}

nsim_status nsim_dataset_save_csv(const nsim_dataset* dataset, const char* path) {
  return guarded([&] {
    require(dataset != nullptr && path != nullptr, "null argument");
    std::vector<std::string> header;
    if (!dataset->feature_names.empty()) {
      header = dataset->feature_names;
      header.push_back(dataset->response_name);
    }
    nsim::export_csv(path, dataset->data, header);
  });
}

size_t nsim_dataset_size(const nsim_dataset* dataset) { return dataset ? dataset->data.size() : 0; }
size_t nsim_dataset_dim(const nsim_dataset* dataset) { return dataset ? dataset->data.dim() : 0; }

nsim_status nsim_dataset_copy_features(const nsim_dataset* dataset, double* out) {
  return guarded([&] {
    require(dataset != nullptr && out != nullptr, "null argument");
    const auto& f = dataset->data.features;
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      for (Eigen::Index d = 0; d < f.cols(); ++d) out[i * f.cols() + d] = f(i, d);
    }
  });
}

nsim_status nsim_dataset_copy_responses(const nsim_dataset* dataset, double* out) {
  return guarded([&] {
    require(dataset != nullptr && out != nullptr, "null argument");
    const auto& y = dataset->data.responses;
    std::copy(y.begin(), y.end(), out);
  });
}

size_t nsim_dataset_warning_count(const nsim_dataset* dataset) { return dataset ? dataset->warnings.size() : 0; }

const char* nsim_dataset_warning(const nsim_dataset* dataset, size_t i) {
  if (!dataset || i >= dataset->warnings.size()) return "";
  return dataset->warnings[i].c_str();
}

void nsim_dataset_free(nsim_dataset* dataset) { delete dataset; }

// ---- estimator -------------------------------------------------------------

nsim_status nsim_fit(const nsim_dataset* data, const nsim_fit_options* options, nsim_model** out) {
  return guarded([&] {
    require(data != nullptr && out != nullptr, "null argument");
    auto model = nsim::fit(data->data, to_fit_options(options));
    *out = new nsim_model{{std::move(model), preprocessing_for(*data)}};
  });
}

nsim_status nsim_fit_split(const nsim_dataset* geometry, const nsim_dataset* prediction,
                           const nsim_fit_options* options, nsim_model** out) {
  return guarded([&] {
    require(geometry != nullptr && prediction != nullptr && out != nullptr, "null argument");
    auto model = nsim::fit_split(geometry->data, prediction->data, to_fit_options(options));
    *out = new nsim_model{{std::move(model), preprocessing_for(*prediction)}};
  });
}

nsim_status nsim_model_predict(const nsim_model* model, const double* rows, size_t n, size_t d, double* out) {
  return guarded([&] {
    require(model != nullptr && rows != nullptr && out != nullptr, "null argument");
    const nsim::Matrix raw = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        rows, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    const auto pred = nsim::predict(model->stored.model, model->stored.preprocessing.apply(raw));
    std::copy(pred.begin(), pred.end(), out);
  });
}

nsim_status nsim_model_predict_csv(const nsim_model* model, const char* path, double** out, size_t* n) {
  return guarded([&] {
    require(model != nullptr && path != nullptr && out != nullptr && n != nullptr, "null argument");
    const auto& pre = model->stored.preprocessing;
    const auto raw = nsim::read_feature_csv(path, pre.raw_dim);
    if (!raw.allFinite()) nsim::fail(nsim::ErrorKind::data, "non_finite", "prediction input has non-finite values");
    const auto pred = nsim::predict(model->stored.model, pre.apply(raw));
    auto* buf = static_cast<double*>(std::malloc(sizeof(double) * std::max<size_t>(1, static_cast<size_t>(pred.size()))));
    if (!buf) throw std::bad_alloc();
    std::copy(pred.begin(), pred.end(), buf);
    *out = buf;
    *n = static_cast<size_t>(pred.size());
  });
}

size_t nsim_model_num_level_sets(const nsim_model* model) {
  return model ? model->stored.model.tangents().num_level_sets() : 0;
}

size_t nsim_model_dim(const nsim_model* model) { return model ? model->stored.model.dim() : 0; }

size_t nsim_model_input_dim(const nsim_model* model) { return model ? model->stored.preprocessing.raw_dim : 0; }

nsim_status nsim_model_tangents(const nsim_model* model, double* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const auto& vs = model->stored.model.tangents().vectors;
    for (size_t j = 0; j < vs.size(); ++j) std::copy(vs[j].begin(), vs[j].end(), out + j * static_cast<size_t>(vs[j].size()));
  });
}

nsim_status nsim_model_grammian(const nsim_model* model, double* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const auto g = nsim::grammian(model->stored.model.tangents());
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) out[i * g.cols() + j] = g(i, j);
    }
  });
}

nsim_status nsim_model_to_json(const nsim_model* model, char** json) {
  return guarded([&] {
    require(model != nullptr && json != nullptr, "null argument");
    *json = dup_string(nsim::model_to_json(model->stored.model, model->stored.preprocessing).dump(1) + "\n");
  });
}

nsim_status nsim_model_from_json(const char* json, nsim_model** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "null argument");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      nsim::fail(nsim::ErrorKind::data, "parse_error", std::string("model JSON: ") + e.what());
    }
    *out = new nsim_model{nsim::model_from_json(doc)};
  });
}

nsim_status nsim_model_save(const nsim_model* model, const char* path) {
  return guarded([&] {
    require(model != nullptr && path != nullptr, "null argument");
    nsim::write_text_file(path, nsim::model_to_json(model->stored.model, model->stored.preprocessing).dump(1) + "\n");
  });
}

nsim_status nsim_model_load(const char* path, nsim_model** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    const auto text = nsim::read_text_file(path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      nsim::fail(nsim::ErrorKind::data, "parse_error", std::string(path) + ": " + e.what());
    }
    *out = new nsim_model{nsim::model_from_json(doc)};
  });
}

void nsim_model_free(nsim_model* model) { delete model; }

// ---- cross-validation ------------------------------------------------------

nsim_status nsim_cross_validate(const nsim_dataset* data, const nsim_cv_options* options, char** report_json) {
  return guarded([&] {
    require(data != nullptr && options != nullptr && report_json != nullptr, "null argument");
    nsim::CvOptions cv;
    cv.J_grid = to_vector(options->J_grid, options->J_count, "null J grid");
    cv.k_rule = options->k_two_thirds ? nsim::KRule::two_thirds()
                                      : nsim::KRule::fixed(to_vector(options->k_grid, options->k_count, "null k grid"));
    cv.eta = to_radius(options->eta);
    cv.folds = options->folds;
    cv.seed = options->seed;
    cv.partition_kind = to_kind(options->partition);
    const auto report = nsim::cross_validate(data->data, cv);
    *report_json = dup_string(nsim::cv_report_to_json(report).dump(1) + "\n");
  });
}

// ---- synthetic data --------------------------------------------------------

nsim_status nsim_synth_generate(const nsim_synth_options* options, nsim_dataset** out, char** truth_json) {
  return guarded([&] {
    require(options != nullptr && out != nullptr, "null argument");
    nsim::SynthConfig cfg{to_curve(options->curve), options->ambient_dim, options->tube_radius,
                          options->noise_factor, options->n_samples, options->seed};
    auto synth = nsim::generate(cfg);
    std::string truth = truth_json ? nsim::synth_truth_to_json(cfg, synth).dump(1) + "\n" : std::string();
    auto ds = std::make_unique<nsim_dataset>();
    ds->data = std::move(synth.data);
    ds->preprocessing = nsim::Preprocessing::identity(cfg.ambient_dim);
    char* truth_out = truth_json ? dup_string(truth) : nullptr;
    *out = ds.release();
    if (truth_json) *truth_json = truth_out;
  });
}

// ---- experiments -----------------------------------------------------------

nsim_status nsim_schedule_profile(const char* name, uint64_t seed, nsim_schedule_options* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    static std::mutex mutex;
    static std::map<std::string, nsim::ScheduleConfig> storage;
    std::lock_guard lock(mutex);
    const auto cfg = nsim::schedule_profile(name, seed);
    auto& stored = storage[name];
    stored = cfg;
    out->curve = from_curve(stored.curve);
    out->D_values = stored.D_values.data();
    out->D_count = stored.D_values.size();
    out->noise_factors = stored.noise_factors.data();
    out->noise_count = stored.noise_factors.size();
    out->n_grid = stored.n_grid.data();
    out->n_count = stored.n_grid.size();
    out->repetitions = stored.repetitions;
    out->seed = stored.seed;
    out->tube_radius = stored.tube_radius;
    out->eta = from_radius(stored.eta);
    out->cv_J_grid = stored.cv_J_grid.data();
    out->cv_J_count = stored.cv_J_grid.size();
    out->cv_folds = stored.cv_folds;
    out->test_points = stored.test_points;
  });
}

nsim_status nsim_run_schedule(const nsim_schedule_options* options, char** records_csv, char** summary_json) {
  return guarded([&] {
    require(options != nullptr && records_csv != nullptr && summary_json != nullptr, "null argument");
    nsim::ScheduleConfig cfg;
    cfg.curve = to_curve(options->curve);
    cfg.D_values = to_vector(options->D_values, options->D_count, "null D grid");
    cfg.noise_factors = to_vector(options->noise_factors, options->noise_count, "null noise grid");
    cfg.n_grid = to_vector(options->n_grid, options->n_count, "null N grid");
    cfg.repetitions = options->repetitions;
    cfg.seed = options->seed;
    cfg.tube_radius = options->tube_radius;
    cfg.eta = to_radius(options->eta);
    cfg.cv_J_grid = to_vector(options->cv_J_grid, options->cv_J_count, "null CV J grid");
    cfg.cv_folds = options->cv_folds;
    cfg.test_points = options->test_points;
    const auto output = nsim::run_schedule(cfg);
    const std::string csv = nsim::records_to_csv(output.records);
    const std::string summary = nsim::schedule_summary_to_json(cfg, output).dump(1) + "\n";
    char* csv_out = dup_string(csv);
    char* summary_out = nullptr;
    try {
      summary_out = dup_string(summary);
    } catch (...) {
      std::free(csv_out);
      throw;
    }
    *records_csv = csv_out;
    *summary_json = summary_out;
  });
}

nsim_status nsim_run_holdout(const nsim_dataset* data, const nsim_holdout_options* options, char** rows_csv,
                             char** summary_json) {
  return guarded([&] {
    require(data != nullptr && options != nullptr && rows_csv != nullptr && summary_json != nullptr, "null argument");
    nsim::HoldoutConfig cfg;
    cfg.splits = options->splits;
    cfg.test_fraction = options->test_fraction;
    cfg.folds = options->folds;
    cfg.J_grid = to_vector(options->J_grid, options->J_count, "null J grid");
    cfg.k_grid = to_vector(options->k_grid, options->k_count, "null k grid");
    cfg.eta = to_radius(options->eta);
    cfg.seed = options->seed;
    const auto report = nsim::run_holdout(data->data, cfg);
    const std::string csv = nsim::holdout_rows_to_csv(report);
    const std::string summary = nsim::holdout_to_json(report, cfg).dump(1) + "\n";
    char* csv_out = dup_string(csv);
    char* summary_out = nullptr;
    try {
      summary_out = dup_string(summary);
    } catch (...) {
      std::free(csv_out);
      throw;
    }
    *rows_csv = csv_out;
    *summary_json = summary_out;
  });
}

}  // extern "C"
