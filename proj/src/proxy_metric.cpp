#include "nsim/proxy_metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "nsim/error.hpp"

namespace nsim {

RestrictingRadius RestrictingRadius::of(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    fail(ErrorKind::usage, "invalid_argument", "restricting radius must be a positive real or inf");
  }
  RestrictingRadius r;
  r.bounded_ = true;
  r.value_ = value;
  return r;
}

RestrictingRadius RestrictingRadius::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return unbounded();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || used == 0) {
    fail(ErrorKind::usage, "invalid_argument", "cannot parse restricting radius '" + text + "'");
  }
  return of(v);
}

std::string RestrictingRadius::to_string() const {
  if (!bounded_) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

ProxyDistance proxy_distance(const Vector& x, const Vector& xi, const Vector& a_hat_xi,
                             RestrictingRadius eta) {
  if (x.size() != xi.size() || x.size() != a_hat_xi.size()) {
    fail(ErrorKind::usage, "dimension_mismatch", "proxy_distance arguments differ in dimension");
  }
  if (!eta.admits((x - xi).squaredNorm())) return ProxyDistance::infinite();
  return ProxyDistance::finite(std::abs(a_hat_xi.dot(x) - a_hat_xi.dot(xi)));
}

std::vector<Index> select_smallest(const Vector& distances, std::vector<Index> pool, std::size_t k) {
  const auto less = [&](Index a, Index b) {
    return distances[a] < distances[b] || (distances[a] == distances[b] && a < b);
  };
  const std::size_t take = std::min(k, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(), less);
  pool.resize(take);
  return pool;
}

ProxyNeighborSearch::ProxyNeighborSearch(Matrix candidates, std::vector<Vector> tangents,
                                         std::vector<std::size_t> tangent_index)
    : candidates_(std::move(candidates)),
      tangents_(std::move(tangents)),
      tangent_index_(std::move(tangent_index)) {
  if (static_cast<Index>(tangent_index_.size()) != candidates_.rows()) {
    fail(ErrorKind::usage, "length_mismatch", "one tangent index per candidate required");
  }
  for (const auto& a : tangents_) {
    if (a.size() != candidates_.cols()) {
      fail(ErrorKind::usage, "dimension_mismatch", "tangent dimension differs from candidates");
    }
  }
  projections_.resize(candidates_.rows());
  for (Index i = 0; i < candidates_.rows(); ++i) {
    const auto t = tangent_index_[static_cast<std::size_t>(i)];
    if (t >= tangents_.size()) fail(ErrorKind::usage, "out_of_range", "tangent index out of range");
    const Vector row = candidates_.row(i).transpose();
    projections_[i] = tangents_[t].dot(row);
  }
}

std::vector<Index> ProxyNeighborSearch::nearest(const Vector& x, RestrictingRadius eta,
                                                std::size_t k) const {
  if (k < 1) fail(ErrorKind::usage, "invalid_argument", "k must be >= 1");
  if (x.size() != candidates_.cols()) {
    fail(ErrorKind::usage, "dimension_mismatch",
         "query has dimension " + std::to_string(x.size()) + ", expected " +
             std::to_string(candidates_.cols()));
  }
  const Index n = candidates_.rows();

  std::vector<double> tangent_dot(tangents_.size());
  for (std::size_t j = 0; j < tangents_.size(); ++j) tangent_dot[j] = tangents_[j].dot(x);

  Vector distances(n);
  for (Index i = 0; i < n; ++i) {
    distances[i] = std::abs(tangent_dot[tangent_index_[static_cast<std::size_t>(i)]] - projections_[i]);
  }

  std::vector<Index> pool;
  pool.reserve(static_cast<std::size_t>(n));
  if (eta.is_bounded()) {
    Vector sq = Vector::Zero(n);
    for (Index d = 0; d < candidates_.cols(); ++d) {
      sq.array() += (candidates_.col(d).array() - x[d]).square();
    }
    for (Index i = 0; i < n; ++i) {
      if (eta.admits(sq[i])) pool.push_back(i);
    }
  } else {
    for (Index i = 0; i < n; ++i) pool.push_back(i);
  }
  return select_smallest(distances, std::move(pool), k);
}

Index ProxyNeighborSearch::euclidean_nearest(const Vector& x) const {
  if (candidates_.rows() < 1) fail(ErrorKind::usage, "empty_sample", "empty sample");
  Vector sq = Vector::Zero(candidates_.rows());
  for (Index d = 0; d < candidates_.cols(); ++d) {
    sq.array() += (candidates_.col(d).array() - x[d]).square();
  }
  Index best = 0;
  for (Index i = 1; i < sq.size(); ++i) {
    if (sq[i] < sq[best]) best = i;
  }
  return best;
}

std::vector<Index> neighbor_order(const Vector& x, const Matrix& candidates,
                                  std::span<const Vector> tangents, RestrictingRadius eta,
                                  std::size_t k) {
  if (static_cast<Index>(tangents.size()) != candidates.rows()) {
    fail(ErrorKind::usage, "length_mismatch", "one tangent per candidate required");
  }
  std::vector<std::size_t> index(tangents.size());
  std::iota(index.begin(), index.end(), std::size_t{0});
  const ProxyNeighborSearch search(candidates, std::vector<Vector>(tangents.begin(), tangents.end()),
                                   std::move(index));
  auto order = search.nearest(x, eta, k);
  if (order.empty()) {
    fail(ErrorKind::data, "no_candidate_in_radius", "no candidate within restricting radius");
  }
  return order;
}

}  // namespace nsim
