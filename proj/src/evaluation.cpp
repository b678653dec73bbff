#include "nsim/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "nsim/error.hpp"

namespace nsim {

double rmse_function(const Vector& predictions, const Vector& truths) {
  if (predictions.size() != truths.size() || truths.size() < 1) {
    fail(ErrorKind::usage, "length_mismatch", "predictions and truths must have equal non-zero length");
  }
  const double denom = truths.squaredNorm();
  if (!(denom > 0.0)) fail(ErrorKind::data, "undefined_relative_rmse", "undefined relative RMSE");
  return std::sqrt((predictions - truths).squaredNorm() / denom);
}

double rmse_absolute(const Vector& predictions, const Vector& truths) {
  if (predictions.size() != truths.size() || truths.size() < 1) {
    fail(ErrorKind::usage, "length_mismatch", "predictions and truths must have equal non-zero length");
  }
  return std::sqrt((predictions - truths).squaredNorm() / static_cast<double>(truths.size()));
}

double rmse_tangent(const std::vector<Vector>& estimated, const std::vector<Vector>& truth) {
  if (estimated.size() != truth.size() || truth.empty()) {
    fail(ErrorKind::usage, "length_mismatch", "tangent lists must have equal non-zero length");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (estimated[j].size() != truth[j].size()) {
      fail(ErrorKind::usage, "dimension_mismatch", "tangent dimensions differ");
    }
    sum += (estimated[j] - truth[j]).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(truth.size()));
}

double decay_slope(const std::vector<double>& n_values, const std::vector<double>& errors) {
  if (n_values.size() != errors.size()) {
    fail(ErrorKind::usage, "length_mismatch", "decay_slope inputs differ in length");
  }
  if (n_values.size() < 3) fail(ErrorKind::usage, "invalid_argument", "decay_slope needs at least 3 points");
  const auto m = static_cast<Index>(n_values.size());
  Vector lx(m), ly(m);
  for (Index i = 0; i < m; ++i) {
    const double n = n_values[static_cast<std::size_t>(i)];
    const double e = errors[static_cast<std::size_t>(i)];
    if (!(n > 0.0) || !(e > 0.0)) {
      fail(ErrorKind::data, "non_positive_value", "decay_slope requires positive values");
    }
    lx[i] = std::log(n);
    ly[i] = std::log(e);
  }
  const Vector dx = lx.array() - lx.mean();
  const Vector dy = ly.array() - ly.mean();
  return dx.dot(dy) / dx.squaredNorm();
}

std::vector<Vector> midpoint_tangents(const ParametricCurve& curve, const ResponsePartition& partition,
                                      const std::vector<SynthSample>& samples, std::size_t ambient_dim) {
  std::vector<Vector> out;
  out.reserve(partition.groups.size());
  for (const auto& group : partition.groups) {
    if (group.empty()) fail(ErrorKind::infeasible, "empty_level_set", "empty level set");
    double t = 0.0;
    for (Index i : group) t += samples.at(static_cast<std::size_t>(i)).t_true;
    t /= static_cast<double>(group.size());
    out.push_back(embed(curve_tangent(curve, t), ambient_dim));
  }
  return out;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

// ---------------------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // splitmix64 finalizer applied to a running mix of the inputs.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(master);
  h = mix(h ^ a);
  h = mix(h ^ b);
  h = mix(h ^ c);
  return h;
}

ScheduleConfig schedule_profile(const std::string& name, std::uint64_t seed) {
  ScheduleConfig c;
  c.seed = seed;
  if (name == "line-noise-free") {
    c.curve = CurveKind::line;
  } else if (name == "line-dimensions") {
    c.curve = CurveKind::line;
    c.D_values = {4, 8, 12};
  } else if (name == "line-noisy") {
    c.curve = CurveKind::line;
    c.D_values = {12};
    c.noise_factors = {0.1};
  } else if (name == "helix-noise-free") {
    c.curve = CurveKind::helix;
    c.D_values = {12};
  } else if (name == "scurve-plateau") {
    c.curve = CurveKind::s_curve;
    c.D_values = {12};
    c.noise_factors = {0.0, 0.1};
    c.n_grid = {256, 512, 1024, 2048, 4096};
  } else {
    fail(ErrorKind::usage, "invalid_argument", "unknown benchmark profile '" + name + "'");
  }
  return c;
}

std::vector<std::string> schedule_profile_names() {
  return {"line-noise-free", "line-dimensions", "line-noisy", "helix-noise-free", "scurve-plateau"};
}

std::string schedule_fingerprint(const ScheduleConfig& config) {
  std::ostringstream os;
  os.precision(17);
  os << to_string(config.curve) << '|';
  for (auto d : config.D_values) os << d << ',';
  os << '|';
  for (auto c : config.noise_factors) os << c << ',';
  os << '|';
  for (auto n : config.n_grid) os << n << ',';
  os << '|' << config.repetitions << '|' << config.seed << '|' << config.tube_radius << '|'
     << config.eta.to_string() << '|';
  for (auto j : config.cv_J_grid) os << j << ',';
  os << '|' << config.cv_folds << '|' << config.test_points << '|' << config.noise_free_samples_per_dim;
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

Vector knn_predictions(const Dataset& train, const Matrix& queries, std::size_t k) {
  Vector out(queries.rows());
  for (Index m = 0; m < queries.rows(); ++m) {
    out[m] = baseline_knn(train, Vector(queries.row(m).transpose()), k);
  }
  return out;
}

}  // namespace

RunRecord run_single(const ScheduleConfig& config, std::size_t D, double c, std::size_t N,
                     std::size_t rep, std::uint64_t cell_seed) {
  RunRecord rec;
  rec.curve = config.curve;
  rec.D = D;
  rec.c = c;
  rec.N = N;
  rec.rep = rep;

  const auto curve = ParametricCurve::of(config.curve);
  SynthConfig train_cfg{config.curve, D, config.tube_radius, c, N, derive_seed(cell_seed, rep, 0, 0)};
  SynthConfig test_cfg = train_cfg;
  test_cfg.n_samples = config.test_points;
  test_cfg.noise_factor = 0.0;
  test_cfg.seed = derive_seed(cell_seed, rep, 1, 0);

  const SynthData train = generate(train_cfg);
  const SynthData test = generate(test_cfg);
  Vector truths(test.data.size());
  for (std::size_t m = 0; m < test.samples.size(); ++m) truths[static_cast<Index>(m)] = test.samples[m].f;

  FitOptions options;
  options.eta = config.eta;
  options.partition_kind = PartitionKind::dyadic;

  std::optional<FittedNsim> model;
  if (c == 0.0) {
    options.k = 1;
    std::size_t J = std::max<std::size_t>(1, N / (config.noise_free_samples_per_dim * D));
    std::string last_error;
    // Cap J by feasibility: step down until every level set is large enough.
    for (; J >= 1 && !model; --J) {
      options.J = J;
      try {
        model.emplace(fit(train.data, options));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::infeasible) throw;
        last_error = e.what();
      }
    }
    if (!model) {
      rec.skipped = true;
      rec.skip_reason = last_error;
      return rec;
    }
  } else {
    CvOptions cv;
    cv.J_grid = config.cv_J_grid;
    cv.k_rule = KRule::two_thirds();
    cv.eta = config.eta;
    cv.folds = config.cv_folds;
    cv.seed = derive_seed(cell_seed, rep, 2, 0);
    cv.partition_kind = PartitionKind::dyadic;
    try {
      const auto report = cross_validate(train.data, cv);
      options.J = report.selected.pair.J;
      options.k = two_thirds_k(N);
      model.emplace(fit(train.data, options));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::infeasible) throw;
      rec.skipped = true;
      rec.skip_reason = e.what();
      return rec;
    }
  }

  rec.J_used = model->tangents().num_level_sets();
  rec.k_used = model->k();
  rec.rmse_f = rmse_function(predict(*model, test.data.features), truths);
  rec.rmse_a = rmse_tangent(model->tangents().vectors,
                            midpoint_tangents(curve, model->partition(), train.samples, D));
  rec.rmse_f_knn = rmse_function(knn_predictions(train.data, test.data.features, rec.k_used), truths);
  return rec;
}

ScheduleOutput run_schedule(const ScheduleConfig& config) {
  if (config.D_values.empty() || config.noise_factors.empty() || config.n_grid.empty() ||
      config.repetitions < 1) {
    fail(ErrorKind::usage, "invalid_argument", "schedule grids must be non-empty and repetitions >= 1");
  }
  ScheduleOutput out;
  std::uint64_t cell = 0;
  for (auto D : config.D_values) {
    for (auto c : config.noise_factors) {
      for (auto N : config.n_grid) {
        const std::uint64_t cell_seed = derive_seed(config.seed, cell++, 0, 0);
        for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
          out.records.push_back(run_single(config, D, c, N, rep, cell_seed));
        }
      }
    }
  }
  out.results = aggregate(config, out.records);
  return out;
}

std::vector<ExperimentResult> aggregate(const ScheduleConfig& config, const std::vector<RunRecord>& records) {
  std::vector<ExperimentResult> results;
  const auto fingerprint = schedule_fingerprint(config);
  for (auto D : config.D_values) {
    for (auto c : config.noise_factors) {
      ExperimentResult r;
      r.curve = config.curve;
      r.D = D;
      r.c = c;
      r.repetitions = config.repetitions;
      r.fingerprint = fingerprint;
      for (auto N : config.n_grid) {
        // Sort by repetition so the summation order does not depend on
        // record order.
        std::map<std::size_t, const RunRecord*> by_rep;
        for (const auto& rec : records) {
          if (rec.D == D && rec.c == c && rec.N == N) {
            if (rec.skipped) {
              ++r.skipped_runs;
            } else {
              by_rep[rec.rep] = &rec;
            }
          }
        }
        if (by_rep.empty()) continue;
        std::vector<double> f, a, knn, J;
        for (const auto& [rep, rec] : by_rep) {
          f.push_back(rec->rmse_f);
          a.push_back(rec->rmse_a);
          knn.push_back(rec->rmse_f_knn);
          J.push_back(static_cast<double>(rec->J_used));
        }
        r.n_values.push_back(N);
        r.rmse_f.push_back(summarize(f));
        r.rmse_a.push_back(summarize(a));
        r.rmse_f_knn.push_back(summarize(knn));
        r.mean_J.push_back(summarize(J).mean);
      }
      results.push_back(std::move(r));
    }
  }
  return results;
}

namespace {

std::optional<double> slope_of(const std::vector<std::size_t>& n, const std::vector<Summary>& s) {
  if (n.size() < 3) return std::nullopt;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(s[i].mean > 0.0)) return std::nullopt;
    x.push_back(static_cast<double>(n[i]));
    y.push_back(s[i].mean);
  }
  return decay_slope(x, y);
}

}  // namespace

std::optional<double> ExperimentResult::slope_f() const { return slope_of(n_values, rmse_f); }
std::optional<double> ExperimentResult::slope_a() const { return slope_of(n_values, rmse_a); }
std::optional<double> ExperimentResult::slope_knn() const { return slope_of(n_values, rmse_f_knn); }

// ---------------------------------------------------------------------------

namespace {

std::size_t select_knn_k(const Dataset& data, const std::vector<std::size_t>& k_grid, std::size_t folds,
                         std::uint64_t seed) {
  const auto parts = fold_indices(data.size(), folds, seed);
  const std::size_t k_max = *std::max_element(k_grid.begin(), k_grid.end());
  std::vector<double> sse(k_grid.size(), 0.0);
  for (std::size_t f = 0; f < parts.size(); ++f) {
    std::vector<Index> train_idx;
    for (std::size_t g = 0; g < parts.size(); ++g) {
      if (g != f) train_idx.insert(train_idx.end(), parts[g].begin(), parts[g].end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    const Dataset train = data.subset(train_idx);
    const Dataset valid = data.subset(parts[f]);
    std::vector<Index> all(train.size());
    std::iota(all.begin(), all.end(), Index{0});
    std::vector<double> fold_sse(k_grid.size(), 0.0);
    for (std::size_t v = 0; v < valid.size(); ++v) {
      Vector sq = Vector::Zero(static_cast<Index>(train.size()));
      for (Index d = 0; d < train.features.cols(); ++d) {
        sq.array() += (train.features.col(d).array() - valid.features(static_cast<Index>(v), d)).square();
      }
      const auto order = select_smallest(sq, all, k_max);
      const double y = valid.responses[static_cast<Index>(v)];
      for (std::size_t c = 0; c < k_grid.size(); ++c) {
        const std::size_t used = std::min(k_grid[c], order.size());
        double s = 0.0;
        for (std::size_t r = 0; r < used; ++r) s += train.responses[order[r]];
        const double pred = s / static_cast<double>(used);
        fold_sse[c] += (pred - y) * (pred - y);
      }
    }
    for (std::size_t c = 0; c < k_grid.size(); ++c) sse[c] += fold_sse[c] / static_cast<double>(valid.size());
  }
  const auto best = std::min_element(sse.begin(), sse.end()) - sse.begin();
  return k_grid[static_cast<std::size_t>(best)];
}

}  // namespace

HoldoutReport run_holdout(const Dataset& data, const HoldoutConfig& config) {
  data.validate();
  if (config.splits < 1) fail(ErrorKind::usage, "invalid_argument", "splits must be >= 1");
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    fail(ErrorKind::usage, "invalid_argument", "test fraction must lie in (0, 1)");
  }
  if (config.J_grid.empty() || config.k_grid.empty()) {
    fail(ErrorKind::usage, "invalid_argument", "J and k grids must be non-empty");
  }
  const std::size_t n = data.size();
  const std::size_t n_test =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(config.test_fraction * static_cast<double>(n))));
  if (n_test + config.folds > n) {
    fail(ErrorKind::data, "dataset_too_small", "dataset too small for the requested split and folds");
  }

  HoldoutReport report;
  report.n = n;
  report.dim = data.dim();
  report.response = summarize(std::vector<double>(data.responses.begin(), data.responses.end()));

  const std::vector<std::string> names{"NSIM-dyad", "NSIM-stat", "Lin-Reg", "kNN"};
  for (std::size_t s = 0; s < config.splits; ++s) {
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), Index{0});
    std::mt19937_64 rng(derive_seed(config.seed, s, 0, 0));
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Index> test_idx(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<Index> train_idx(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    const Dataset train = data.subset(train_idx);
    const Dataset test = data.subset(test_idx);
    const std::uint64_t cv_seed = derive_seed(config.seed, s, 1, 0);

    for (auto kind : {PartitionKind::dyadic, PartitionKind::equiblock}) {
      HoldoutSplitRow row;
      row.split = s;
      row.estimator = kind == PartitionKind::dyadic ? names[0] : names[1];
      try {
        CvOptions cv;
        cv.J_grid = config.J_grid;
        cv.k_rule = KRule::fixed(config.k_grid);
        cv.eta = config.eta;
        cv.folds = config.folds;
        cv.seed = cv_seed;
        cv.partition_kind = kind;
        const auto selected = cross_validate(train, cv).selected.pair;
        FitOptions fo;
        fo.J = selected.J;
        fo.k = *selected.k;
        fo.eta = config.eta;
        fo.partition_kind = kind;
        const auto model = fit(train, fo);
        row.rmse = rmse_absolute(predict(model, test.features), test.responses);
        row.k = fo.k;
        row.J = fo.J;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::infeasible && e.kind() != ErrorKind::data) throw;
        row.failed = true;
        row.reason = e.what();
      }
      report.rows.push_back(std::move(row));
    }

    {
      HoldoutSplitRow row;
      row.split = s;
      row.estimator = names[2];
      const auto lin = baseline_linreg(train);
      Vector pred(static_cast<Index>(test.size()));
      for (Index m = 0; m < pred.size(); ++m) pred[m] = lin.predict(test.features.row(m).transpose());
      row.rmse = rmse_absolute(pred, test.responses);
      report.rows.push_back(std::move(row));
    }
    {
      HoldoutSplitRow row;
      row.split = s;
      row.estimator = names[3];
      const std::size_t k = select_knn_k(train, config.k_grid, config.folds, cv_seed);
      Vector pred(static_cast<Index>(test.size()));
      for (Index m = 0; m < pred.size(); ++m) pred[m] = baseline_knn(train, test.features.row(m).transpose(), k);
      row.rmse = rmse_absolute(pred, test.responses);
      row.k = k;
      report.rows.push_back(std::move(row));
    }
  }

  for (const auto& name : names) {
    HoldoutEstimatorSummary summary;
    summary.estimator = name;
    std::vector<double> rmse, ks, Js;
    for (const auto& row : report.rows) {
      if (row.estimator != name) continue;
      if (row.failed) {
        ++summary.failed;
        continue;
      }
      ++summary.completed;
      rmse.push_back(row.rmse);
      if (row.k) ks.push_back(static_cast<double>(*row.k));
      if (row.J) Js.push_back(static_cast<double>(*row.J));
    }
    summary.rmse = summarize(rmse);
    if (!ks.empty()) summary.mean_k = summarize(ks).mean;
    if (!Js.empty()) summary.mean_J = summarize(Js).mean;
    report.estimators.push_back(std::move(summary));
  }
  return report;
}

}  // namespace nsim
