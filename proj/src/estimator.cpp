#include "nsim/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nsim/error.hpp"

namespace nsim {

FittedNsim::FittedNsim(ResponsePartition partition, TangentField tangents, Dataset train,
                       std::vector<std::size_t> tangent_index, std::size_t k, RestrictingRadius eta,
                       bool split)
    : partition_(std::move(partition)),
      tangents_(std::move(tangents)),
      train_(std::move(train)),
      tangent_index_(std::move(tangent_index)),
      k_(k),
      eta_(eta),
      split_(split) {
  if (k_ < 1) fail(ErrorKind::usage, "invalid_argument", "k must be >= 1");
  search_ = ProxyNeighborSearch(train_.features, tangents_.vectors, tangent_index_);
}

namespace {

void require_fit_options(const FitOptions& options) {
  if (options.J < 1) fail(ErrorKind::usage, "invalid_argument", "J must be >= 1");
  if (options.k < 1) fail(ErrorKind::usage, "invalid_argument", "k must be >= 1");
}

struct Geometry {
  ResponsePartition partition;
  TangentField tangents;
};

Geometry learn_geometry(const Dataset& data, const FitOptions& options) {
  try {
    auto partition = make_partition(options.partition_kind, data.responses, options.J);
    auto tangents = fit_tangents(data, partition, options.rank_tol);
    return {std::move(partition), std::move(tangents)};
  } catch (const Error& e) {
    throw Error(e.kind(), e.code(), "J=" + std::to_string(options.J) + ": " + e.what());
  }
}

double mean_of(const Vector& responses, const std::vector<Index>& idx, std::size_t count) {
  double sum = 0.0;
  for (std::size_t r = 0; r < count; ++r) sum += responses[idx[r]];
  return sum / static_cast<double>(count);
}

}  // namespace

FittedNsim fit(const Dataset& data, const FitOptions& options) {
  data.validate();
  require_fit_options(options);
  auto geometry = learn_geometry(data, options);
  auto labels = geometry.partition.labels;
  return FittedNsim(std::move(geometry.partition), std::move(geometry.tangents), data,
                    std::move(labels), options.k, options.eta, false);
}

double predict(const FittedNsim& model, const Vector& x) {
  const auto order = model.search().nearest(x, model.eta(), model.k());
  const Vector& y = model.train().responses;
  if (order.empty()) return y[model.search().euclidean_nearest(x)];
  return mean_of(y, order, order.size());
}

Vector predict(const FittedNsim& model, const Matrix& rows) {
  Vector out(rows.rows());
  for (Index i = 0; i < rows.rows(); ++i) out[i] = predict(model, Vector(rows.row(i).transpose()));
  return out;
}

FittedNsim fit_split(const Dataset& geometry_half, const Dataset& prediction_half,
                     const FitOptions& options) {
  geometry_half.validate();
  prediction_half.validate();
  require_fit_options(options);
  if (geometry_half.dim() != prediction_half.dim()) {
    fail(ErrorKind::data, "dimension_mismatch", "geometry and prediction halves differ in dimension");
  }
  auto geometry = learn_geometry(geometry_half, options);

  const ProxyNeighborSearch geometry_search(geometry_half.features, geometry.tangents.vectors,
                                            geometry.partition.labels);
  std::vector<std::size_t> extended(prediction_half.size());
  for (std::size_t l = 0; l < prediction_half.size(); ++l) {
    const Vector x = prediction_half.features.row(static_cast<Index>(l)).transpose();
    const auto best = geometry_search.nearest(x, options.eta, 1);
    const Index i_star = best.empty() ? geometry_search.euclidean_nearest(x) : best.front();
    extended[l] = geometry.partition.labels[static_cast<std::size_t>(i_star)];
  }
  return FittedNsim(std::move(geometry.partition), std::move(geometry.tangents), prediction_half,
                    std::move(extended), options.k, options.eta, true);
}

// ---------------------------------------------------------------------------

std::size_t two_thirds_k(std::size_t n_train) {
  const double k = std::ceil(0.5 * std::pow(static_cast<double>(n_train), 2.0 / 3.0));
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

std::vector<std::vector<Index>> fold_indices(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 2 || folds > n) {
    fail(ErrorKind::usage, "invalid_argument",
         "folds must satisfy 2 <= folds <= N (folds=" + std::to_string(folds) +
             ", N=" + std::to_string(n) + ")");
  }
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<std::vector<Index>> out(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t begin = f * n / folds;
    const std::size_t end = (f + 1) * n / folds;
    out[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(begin),
                  perm.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

CvReport cross_validate(const Dataset& data, const CvOptions& options) {
  data.validate();
  if (options.J_grid.empty()) fail(ErrorKind::usage, "invalid_argument", "empty J grid");
  if (!options.k_rule.two_thirds_rule && options.k_rule.ks.empty()) {
    fail(ErrorKind::usage, "invalid_argument", "empty k grid");
  }
  for (auto k : options.k_rule.ks) {
    if (k < 1) fail(ErrorKind::usage, "invalid_argument", "k must be >= 1");
  }
  for (auto J : options.J_grid) {
    if (J < 1) fail(ErrorKind::usage, "invalid_argument", "J must be >= 1");
  }

  const auto folds = fold_indices(data.size(), options.folds, options.seed);

  CvReport report;
  report.folds = options.folds;
  report.seed = options.seed;
  report.partition_kind = options.partition_kind;
  report.eta = options.eta;

  std::vector<std::optional<std::size_t>> k_values;
  if (options.k_rule.two_thirds_rule) {
    k_values.push_back(std::nullopt);
  } else {
    for (auto k : options.k_rule.ks) k_values.emplace_back(k);
  }
  for (auto J : options.J_grid) {
    for (const auto& k : k_values) report.grid.push_back({J, k});
  }

  // fold_mse[pair][fold]; NaN marks an infeasible combination.
  const std::size_t n_k = k_values.size();
  std::vector<std::vector<double>> fold_mse(report.grid.size(),
                                            std::vector<double>(folds.size(), std::nan("")));

  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<Index> train_idx;
    train_idx.reserve(data.size() - folds[f].size());
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    const Dataset train = data.subset(train_idx);
    const Dataset valid = data.subset(folds[f]);

    std::vector<std::size_t> ks(n_k);
    for (std::size_t c = 0; c < n_k; ++c) ks[c] = k_values[c].value_or(two_thirds_k(train.size()));
    const std::size_t k_max = *std::max_element(ks.begin(), ks.end());

    for (std::size_t jg = 0; jg < options.J_grid.size(); ++jg) {
      FitOptions fo;
      fo.J = options.J_grid[jg];
      fo.k = k_max;
      fo.eta = options.eta;
      fo.partition_kind = options.partition_kind;

      std::optional<FittedNsim> model;
      try {
        model.emplace(fit(train, fo));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::infeasible && e.code() != "degenerate_response_range") throw;
        for (std::size_t c = 0; c < n_k; ++c) {
          report.skipped.push_back({report.grid[jg * n_k + c], f, e.what()});
        }
        continue;
      }

      std::vector<double> sse(n_k, 0.0);
      for (std::size_t v = 0; v < valid.size(); ++v) {
        const Vector x = valid.features.row(static_cast<Index>(v)).transpose();
        const double y = valid.responses[static_cast<Index>(v)];
        const auto order = model->search().nearest(x, options.eta, k_max);
        if (order.empty()) {
          const double pred = train.responses[model->search().euclidean_nearest(x)];
          for (auto& s : sse) s += (pred - y) * (pred - y);
          continue;
        }
        // Prefix means serve every k in the grid from one neighbor ordering.
        for (std::size_t c = 0; c < n_k; ++c) {
          const std::size_t used = std::min(ks[c], order.size());
          const double pred = mean_of(train.responses, order, used);
          sse[c] += (pred - y) * (pred - y);
        }
      }
      for (std::size_t c = 0; c < n_k; ++c) {
        fold_mse[jg * n_k + c][f] = sse[c] / static_cast<double>(valid.size());
      }
    }
  }

  for (std::size_t p = 0; p < report.grid.size(); ++p) {
    const auto& scores = fold_mse[p];
    if (std::any_of(scores.begin(), scores.end(), [](double s) { return std::isnan(s); })) continue;
    CvScore score{report.grid[p], 0.0, scores};
    score.mean_mse = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
    report.scores.push_back(std::move(score));
  }
  if (report.scores.empty()) {
    fail(ErrorKind::infeasible, "all_pairs_infeasible",
         "cross-validation found no feasible (J, k) pair");
  }
  report.selected = *std::min_element(
      report.scores.begin(), report.scores.end(),
      [](const CvScore& a, const CvScore& b) { return a.mean_mse < b.mean_mse; });
  return report;
}

// ---------------------------------------------------------------------------

double baseline_knn(const Dataset& data, const Vector& x, std::size_t k) {
  data.validate();
  if (k < 1) fail(ErrorKind::usage, "invalid_argument", "k must be >= 1");
  if (static_cast<std::size_t>(x.size()) != data.dim()) {
    fail(ErrorKind::usage, "dimension_mismatch", "query dimension differs from the dataset");
  }
  const Index n = data.features.rows();
  Vector sq = Vector::Zero(n);
  for (Index d = 0; d < data.features.cols(); ++d) {
    sq.array() += (data.features.col(d).array() - x[d]).square();
  }
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  const auto order = select_smallest(sq, std::move(pool), k);
  return mean_of(data.responses, order, order.size());
}

LinearModel baseline_linreg(const Dataset& data) {
  data.validate();
  const Matrix cov = linalg::sample_covariance(data.features);
  const Vector cross = linalg::cross_covariance(data.features, data.responses);
  LinearModel model;
  model.weights = linalg::pseudo_inverse(cov) * cross;
  model.intercept = data.responses.mean() - model.weights.dot(linalg::sample_mean(data.features));
  return model;
}

}  // namespace nsim
