// nsim: command-line front end over the C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nsim/nsim.h"

namespace {

constexpr int kFormatVersion = 1;

struct CliError {
  int status;
  std::string code;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& code, const std::string& message) {
  throw CliError{NSIM_ERR_USAGE, code, message};
}

void check(nsim_status status) {
  if (status != NSIM_OK) throw CliError{status, nsim_last_error_code(), nsim_last_error_message()};
}

// Owning wrappers for the C handles.
struct Dataset {
  nsim_dataset* ptr = nullptr;
  Dataset() = default;
  Dataset(const Dataset&) = delete;
  Dataset& operator=(const Dataset&) = delete;
  Dataset(Dataset&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
  ~Dataset() { nsim_dataset_free(ptr); }
};

struct Model {
  nsim_model* ptr = nullptr;
  Model() = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
  ~Model() { nsim_model_free(ptr); }
};

struct CString {
  char* ptr = nullptr;
  CString() = default;
  CString(const CString&) = delete;
  CString& operator=(const CString&) = delete;
  ~CString() { nsim_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{NSIM_ERR_DATA, "io_error", "cannot open '" + path + "' for writing"};
  out << contents;
  if (!out) throw CliError{NSIM_ERR_DATA, "io_error", "failed writing '" + path + "'"};
}

void emit(const std::optional<std::string>& path, const std::string& contents) {
  if (path) {
    write_file(*path, contents);
  } else {
    std::cout << contents;
  }
}

nsim_radius parse_eta(const std::string& text) {
  if (text == "inf" || text == "infinity") return {1, 0.0};
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value) || value <= 0.0) {
    usage_error("invalid_eta", "--eta must be a positive number or 'inf', got '" + text + "'");
  }
  return {0, value};
}

nsim_partition_kind parse_partition(const std::string& text) {
  if (text == "dyadic") return NSIM_PARTITION_DYADIC;
  if (text == "equiblock") return NSIM_PARTITION_EQUIBLOCK;
  usage_error("invalid_partition", "--partition must be 'dyadic' or 'equiblock', got '" + text + "'");
}

nsim_curve_kind parse_curve(const std::string& text) {
  if (text == "line") return NSIM_CURVE_LINE;
  if (text == "s_curve" || text == "s-curve" || text == "scurve") return NSIM_CURVE_S_CURVE;
  if (text == "helix") return NSIM_CURVE_HELIX;
  usage_error("invalid_curve", "--curve must be one of line, s_curve, helix; got '" + text + "'");
}

void require_positive(const std::vector<std::size_t>& values, const char* name) {
  if (values.empty()) usage_error("empty_grid", std::string(name) + " must not be empty");
  for (auto v : values) {
    if (v == 0) usage_error("invalid_grid", std::string(name) + " entries must be positive");
  }
}

struct Globals {
  bool standardize = false;
  bool log_response = false;
  std::optional<std::uint64_t> seed;
  int format_version = kFormatVersion;

  nsim_ingest_options ingest() const { return {standardize ? 1 : 0, log_response ? 1 : 0}; }

  std::uint64_t require_seed() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("NSIM_SEED"); env && *env) {
      std::uint64_t value = 0;
      const std::string text = env;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        usage_error("invalid_seed", "NSIM_SEED must be a non-negative integer, got '" + text + "'");
      }
      return value;
    }
    usage_error("missing_seed", "this command needs a seed: pass --seed or set NSIM_SEED");
  }
};

Dataset load(const std::string& path, const Globals& g) {
  Dataset ds;
  const auto opts = g.ingest();
  check(nsim_dataset_load_csv(path.c_str(), &opts, &ds.ptr));
  for (std::size_t i = 0; i < nsim_dataset_warning_count(ds.ptr); ++i) {
    std::cerr << "warning: " << path << ": " << nsim_dataset_warning(ds.ptr, i) << "\n";
  }
  return ds;
}

// ---- fit ---------------------------------------------------------------

struct FitArgs {
  std::string data;
  std::optional<std::string> prediction_data;
  std::size_t J = 1;
  std::size_t k = 1;
  std::string eta = "inf";
  std::string partition = "dyadic";
  double rank_tol = 0.0;
  std::string model = "model.json";
};

int cmd_fit(const FitArgs& a, const Globals& g) {
  nsim_fit_options opts{a.J, a.k, parse_eta(a.eta), parse_partition(a.partition), a.rank_tol};
  Dataset geometry = load(a.data, g);
  Model model;
  if (a.prediction_data) {
    Dataset prediction = load(*a.prediction_data, g);
    check(nsim_fit_split(geometry.ptr, prediction.ptr, &opts, &model.ptr));
  } else {
    check(nsim_fit(geometry.ptr, &opts, &model.ptr));
  }
  check(nsim_model_save(model.ptr, a.model.c_str()));
  return 0;
}

// ---- predict -------------------------------------------------------------

struct PredictArgs {
  std::string model;
  std::string data;
  std::optional<std::string> out;
};

int cmd_predict(const PredictArgs& a) {
  Model model;
  check(nsim_model_load(a.model.c_str(), &model.ptr));
  double* values = nullptr;
  std::size_t n = 0;
  check(nsim_model_predict_csv(model.ptr, a.data.c_str(), &values, &n));
  std::string csv = "prediction\n";
  for (std::size_t i = 0; i < n; ++i) csv += fmt(values[i]) + "\n";
  nsim_array_free(values);
  emit(a.out, csv);
  return 0;
}

// ---- cv ------------------------------------------------------------------

struct CvArgs {
  std::string data;
  std::vector<std::size_t> J_grid{1, 2, 4, 8};
  std::vector<std::size_t> k_grid{1, 2, 3, 5, 8, 12, 16, 24, 32};
  bool k_two_thirds = false;
  std::size_t folds = 5;
  std::string eta = "inf";
  std::string partition = "dyadic";
  std::optional<std::string> out;
};

int cmd_cv(const CvArgs& a, const Globals& g) {
  require_positive(a.J_grid, "--J-grid");
  if (!a.k_two_thirds) require_positive(a.k_grid, "--k-grid");
  if (a.folds < 2) usage_error("invalid_folds", "--folds must be at least 2");
  nsim_cv_options opts{a.J_grid.data(), a.J_grid.size(), a.k_grid.data(), a.k_grid.size(),
                       a.k_two_thirds ? 1 : 0, parse_eta(a.eta), a.folds, g.require_seed(),
                       parse_partition(a.partition)};
  Dataset ds = load(a.data, g);
  CString report;
  check(nsim_cross_validate(ds.ptr, &opts, &report.ptr));
  emit(a.out, report.str());
  return 0;
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string curve = "line";
  std::size_t dim = 4;
  std::size_t n = 512;
  double noise = 0.0;
  double tube_radius = 0.25;
  std::string out = "synth.csv";
  std::optional<std::string> truth;
};

int cmd_synth(const SynthArgs& a, const Globals& g) {
  if (a.noise < 0.0 || !std::isfinite(a.noise)) usage_error("invalid_noise", "--noise must be >= 0");
  if (a.tube_radius < 0.0 || !std::isfinite(a.tube_radius)) usage_error("invalid_tube_radius", "--tube-radius must be >= 0");
  nsim_synth_options opts{parse_curve(a.curve), a.dim, a.tube_radius, a.noise, a.n, g.require_seed()};
  Dataset ds;
  CString truth;
  check(nsim_synth_generate(&opts, &ds.ptr, &truth.ptr));
  check(nsim_dataset_save_csv(ds.ptr, a.out.c_str()));
  write_file(a.truth.value_or(a.out + ".truth.json"), truth.str());
  return 0;
}

// ---- benchmark -----------------------------------------------------------

struct BenchmarkArgs {
  std::optional<std::string> profile;
  std::optional<std::string> curve;
  std::vector<std::size_t> dims;
  std::vector<double> noise;
  std::vector<std::size_t> n_grid;
  std::optional<std::size_t> reps;
  std::optional<double> tube_radius;
  std::optional<std::string> eta;
  std::vector<std::size_t> cv_J_grid;
  std::optional<std::size_t> cv_folds;
  std::optional<std::size_t> test_points;

  // Hold-out protocol on a user CSV.
  std::optional<std::string> data;
  std::size_t splits = 30;
  double test_fraction = 0.15;
  std::size_t folds = 5;
  std::vector<std::size_t> J_grid{1, 2, 3, 4, 5, 6, 8, 10};
  std::vector<std::size_t> k_grid{1, 2, 3, 5, 8, 12, 16, 24, 32, 48, 64};

  std::optional<std::string> out_csv;
  std::optional<std::string> out_json;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int run_holdout_benchmark(const BenchmarkArgs& a, const Globals& g) {
  require_positive(a.J_grid, "--J-grid");
  require_positive(a.k_grid, "--k-grid");
  if (a.splits == 0) usage_error("invalid_splits", "--splits must be positive");
  if (!(a.test_fraction > 0.0 && a.test_fraction < 1.0)) {
    usage_error("invalid_test_fraction", "--test-fraction must lie in (0, 1)");
  }
  if (a.folds < 2) usage_error("invalid_folds", "--folds must be at least 2");
  nsim_holdout_options opts{a.splits,       a.test_fraction, a.folds,
                            a.J_grid.data(), a.J_grid.size(), a.k_grid.data(),
                            a.k_grid.size(), parse_eta(a.eta.value_or("inf")), g.require_seed()};
  Dataset ds = load(*a.data, g);
  CString rows;
  CString summary;
  check(nsim_run_holdout(ds.ptr, &opts, &rows.ptr, &summary.ptr));
  if (a.out_csv) write_file(*a.out_csv, rows.str());
  if (a.out_json) write_file(*a.out_json, summary.str());

  const auto doc = nlohmann::json::parse(summary.str());
  std::cout << "data: " << *a.data << "  N=" << doc["n"].get<std::size_t>() << "  D=" << doc["dim"].get<std::size_t>()
            << "  splits=" << a.splits << "\n";
  std::cout << "estimator     RMSE (mean +- std)          k       J      failed\n";
  for (const auto& e : doc["estimators"]) {
    char line[160];
    const auto opt = [](const nlohmann::json& v) { return v.is_null() ? std::string("-") : fixed(v.get<double>(), 1); };
    std::snprintf(line, sizeof line, "%-12s  %-12s +- %-12s  %-6s  %-6s %zu\n", e["estimator"].get<std::string>().c_str(),
                  fixed(e["rmse_mean"].get<double>(), 4).c_str(), fixed(e["rmse_std"].get<double>(), 4).c_str(),
                  opt(e["mean_k"]).c_str(), opt(e["mean_J"]).c_str(), e["failed"].get<std::size_t>());
    std::cout << line;
  }
  return 0;
}

int run_schedule_benchmark(const BenchmarkArgs& a, const Globals& g) {
  const std::uint64_t seed = g.require_seed();
  nsim_schedule_options opts{};
  check(nsim_schedule_profile(a.profile.value_or("line-noise-free").c_str(), seed, &opts));

  // Explicit options override the profile; storage must outlive the run.
  std::vector<std::size_t> dims = a.dims;
  std::vector<double> noise = a.noise;
  std::vector<std::size_t> n_grid = a.n_grid;
  std::vector<std::size_t> cv_J = a.cv_J_grid;
  if (a.curve) opts.curve = parse_curve(*a.curve);
  if (!dims.empty()) {
    require_positive(dims, "--dims");
    opts.D_values = dims.data();
    opts.D_count = dims.size();
  }
  if (!noise.empty()) {
    for (double c : noise) {
      if (!(c >= 0.0) || !std::isfinite(c)) usage_error("invalid_noise", "--noise entries must be >= 0");
    }
    opts.noise_factors = noise.data();
    opts.noise_count = noise.size();
  }
  if (!n_grid.empty()) {
    require_positive(n_grid, "--n-grid");
    opts.n_grid = n_grid.data();
    opts.n_count = n_grid.size();
  }
  if (!cv_J.empty()) {
    require_positive(cv_J, "--cv-J-grid");
    opts.cv_J_grid = cv_J.data();
    opts.cv_J_count = cv_J.size();
  }
  if (a.reps) {
    if (*a.reps == 0) usage_error("invalid_reps", "--reps must be positive");
    opts.repetitions = *a.reps;
  }
  if (a.tube_radius) {
    if (!(*a.tube_radius >= 0.0)) usage_error("invalid_tube_radius", "--tube-radius must be >= 0");
    opts.tube_radius = *a.tube_radius;
  }
  if (a.eta) opts.eta = parse_eta(*a.eta);
  if (a.cv_folds) {
    if (*a.cv_folds < 2) usage_error("invalid_folds", "--cv-folds must be at least 2");
    opts.cv_folds = *a.cv_folds;
  }
  if (a.test_points) {
    if (*a.test_points == 0) usage_error("invalid_test_points", "--test-points must be positive");
    opts.test_points = *a.test_points;
  }

  CString csv;
  CString summary;
  check(nsim_run_schedule(&opts, &csv.ptr, &summary.ptr));
  emit(a.out_csv, csv.str());
  if (a.out_json) write_file(*a.out_json, summary.str());
  if (a.out_csv) {
    const auto doc = nlohmann::json::parse(summary.str());
    for (const auto& e : doc["results"]) {
      const auto slope = [](const nlohmann::json& v) { return v.is_null() ? std::string("-") : fixed(v.get<double>(), 3); };
      std::cout << doc["curve"].get<std::string>() << " D=" << e["D"].get<std::size_t>() << " c=" << fmt(e["c"].get<double>())
                << "  slope_f=" << slope(e["slope_f"]) << "  slope_a=" << slope(e["slope_a"])
                << "  slope_knn=" << slope(e["slope_knn"]) << "\n";
    }
  }
  return 0;
}

int cmd_benchmark(const BenchmarkArgs& a, const Globals& g) {
  if (a.data) {
    if (a.profile || a.curve || !a.dims.empty() || !a.n_grid.empty()) {
      usage_error("conflicting_options", "--data runs the hold-out protocol and cannot be combined with schedule options");
    }
    return run_holdout_benchmark(a, g);
  }
  return run_schedule_benchmark(a, g);
}

// ---- gram ----------------------------------------------------------------

struct GramArgs {
  std::string data;
  std::vector<std::size_t> J_list{1};
  std::string eta = "inf";
  std::string partition = "dyadic";
  std::string prefix = "gram";
};

int cmd_gram(const GramArgs& a, const Globals& g) {
  require_positive(a.J_list, "--J");
  const nsim_radius eta = parse_eta(a.eta);
  const nsim_partition_kind kind = parse_partition(a.partition);
  Dataset ds = load(a.data, g);
  for (std::size_t J : a.J_list) {
    nsim_fit_options opts{J, 1, eta, kind, 0.0};
    Model model;
    check(nsim_fit(ds.ptr, &opts, &model.ptr));
    std::vector<double> gram(J * J);
    check(nsim_model_grammian(model.ptr, gram.data()));
    std::string csv;
    for (std::size_t i = 0; i < J; ++i) {
      for (std::size_t j = 0; j < J; ++j) {
        if (j) csv += ',';
        csv += fmt(gram[i * J + j]);
      }
      csv += '\n';
    }
    const std::string path = a.prefix + "_J" + std::to_string(J) + ".csv";
    write_file(path, csv);
    std::cout << path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear single index model regression"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI file with option values; unknown keys are rejected");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_version_flag("--version", std::string(nsim_version()));

  Globals g;
  std::uint64_t seed_value = 0;
  app.add_flag("--standardize", g.standardize, "z-score feature columns, dropping constant ones");
  app.add_flag("--log-response", g.log_response, "replace the response by its logarithm");
  auto* seed_opt = app.add_option("--seed", seed_value, "random seed (falls back to NSIM_SEED)");
  app.add_option("--format-version", g.format_version, "configuration format version")->check(CLI::IsMember({kFormatVersion}));

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit a model and write it as JSON");
  fit_cmd->add_option("--data", fit.data, "training CSV (geometry half for the split variant)")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--prediction-data", fit.prediction_data, "CSV supplying neighbors and responses (split variant)")
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("-J,--J", fit.J, "number of level sets")->check(CLI::PositiveNumber);
  fit_cmd->add_option("-k,--k", fit.k, "number of neighbors")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--eta", fit.eta, "restricting radius (number or 'inf')");
  fit_cmd->add_option("--partition", fit.partition, "dyadic or equiblock");
  fit_cmd->add_option("--rank-tol", fit.rank_tol, "relative eigenvalue cutoff for the pseudo-inverse")->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("-o,--model", fit.model, "output model path");

  PredictArgs pred;
  auto* pred_cmd = app.add_subcommand("predict", "predict responses for the rows of a CSV");
  pred_cmd->add_option("--model", pred.model, "model JSON")->required()->check(CLI::ExistingFile);
  pred_cmd->add_option("--data", pred.data, "CSV of features (a trailing response column is ignored)")->required()->check(CLI::ExistingFile);
  pred_cmd->add_option("-o,--out", pred.out, "output CSV (default: stdout)");

  CvArgs cv;
  auto* cv_cmd = app.add_subcommand("cv", "cross-validate over (J, k) and write the report as JSON");
  cv_cmd->add_option("--data", cv.data, "training CSV")->required()->check(CLI::ExistingFile);
  cv_cmd->add_option("--J-grid", cv.J_grid, "comma-separated level-set counts")->delimiter(',');
  auto* k_grid_opt = cv_cmd->add_option("--k-grid", cv.k_grid, "comma-separated neighbor counts")->delimiter(',');
  cv_cmd->add_flag("--k-two-thirds", cv.k_two_thirds, "use k = ceil(n^(2/3) / 2) per fold")->excludes(k_grid_opt);
  cv_cmd->add_option("--folds", cv.folds, "number of folds");
  cv_cmd->add_option("--eta", cv.eta, "restricting radius (number or 'inf')");
  cv_cmd->add_option("--partition", cv.partition, "dyadic or equiblock");
  cv_cmd->add_option("-o,--out", cv.out, "output JSON (default: stdout)");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "sample a synthetic tube dataset");
  synth_cmd->add_option("--curve", synth.curve, "line, s_curve or helix");
  synth_cmd->add_option("-D,--dim", synth.dim, "ambient dimension")->check(CLI::Range(std::size_t{3}, std::size_t{100000}));
  synth_cmd->add_option("-n,--n", synth.n, "number of samples")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--noise", synth.noise, "noise factor c");
  synth_cmd->add_option("--tube-radius", synth.tube_radius, "tube radius");
  synth_cmd->add_option("-o,--out", synth.out, "output CSV");
  synth_cmd->add_option("--truth", synth.truth, "truth sidecar JSON (default: <out>.truth.json)");

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "run a convergence schedule, or the hold-out protocol on a CSV");
  bench_cmd->add_option("--profile", bench.profile, "named schedule preset");
  bench_cmd->add_option("--curve", bench.curve, "line, s_curve or helix");
  bench_cmd->add_option("--dims", bench.dims, "comma-separated ambient dimensions")->delimiter(',');
  bench_cmd->add_option("--noise", bench.noise, "comma-separated noise factors")->delimiter(',');
  bench_cmd->add_option("--n-grid", bench.n_grid, "comma-separated sample sizes")->delimiter(',');
  bench_cmd->add_option("--reps", bench.reps, "repetitions per grid cell");
  bench_cmd->add_option("--tube-radius", bench.tube_radius, "tube radius");
  bench_cmd->add_option("--eta", bench.eta, "restricting radius (number or 'inf')");
  bench_cmd->add_option("--cv-J-grid", bench.cv_J_grid, "level-set counts tried by CV on noisy data")->delimiter(',');
  bench_cmd->add_option("--cv-folds", bench.cv_folds, "folds for CV on noisy data");
  bench_cmd->add_option("--test-points", bench.test_points, "test points per run");
  bench_cmd->add_option("--data", bench.data, "CSV for the repeated hold-out protocol")->check(CLI::ExistingFile);
  bench_cmd->add_option("--splits", bench.splits, "hold-out splits");
  bench_cmd->add_option("--test-fraction", bench.test_fraction, "hold-out test fraction");
  bench_cmd->add_option("--folds", bench.folds, "CV folds within each split");
  bench_cmd->add_option("--J-grid", bench.J_grid, "level-set counts for the hold-out CV")->delimiter(',');
  bench_cmd->add_option("--k-grid", bench.k_grid, "neighbor counts for the hold-out CV")->delimiter(',');
  bench_cmd->add_option("--out-csv", bench.out_csv, "per-run CSV (default: stdout for schedules)");
  bench_cmd->add_option("--out-json", bench.out_json, "summary JSON");

  GramArgs gram;
  auto* gram_cmd = app.add_subcommand("gram", "write the index-vector Grammian for each J");
  gram_cmd->add_option("--data", gram.data, "training CSV")->required()->check(CLI::ExistingFile);
  gram_cmd->add_option("-J,--J", gram.J_list, "comma-separated level-set counts")->delimiter(',');
  gram_cmd->add_option("--eta", gram.eta, "restricting radius (number or 'inf')");
  gram_cmd->add_option("--partition", gram.partition, "dyadic or equiblock");
  gram_cmd->add_option("--prefix", gram.prefix, "output path prefix; files are <prefix>_J<J>.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : NSIM_ERR_USAGE;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (*fit_cmd) return cmd_fit(fit, g);
    if (*pred_cmd) return cmd_predict(pred);
    if (*cv_cmd) return cmd_cv(cv, g);
    if (*synth_cmd) return cmd_synth(synth, g);
    if (*bench_cmd) return cmd_benchmark(bench, g);
    if (*gram_cmd) return cmd_gram(gram, g);
  } catch (const CliError& e) {
    std::cerr << "error [" << e.code << "]: " << e.message << "\n";
    return e.status;
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return NSIM_ERR_INTERNAL;
  }
  return NSIM_ERR_USAGE;
}
