#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nsim/linalg.hpp"

namespace nsim {

// Euclidean cutoff eta of the proxy metric: a positive real or unbounded.
class RestrictingRadius {
 public:
  static RestrictingRadius unbounded() { return RestrictingRadius(); }
  static RestrictingRadius of(double value);
  // Accepts a positive number or "inf".
  static RestrictingRadius parse(const std::string& text);

  bool is_bounded() const { return bounded_; }
  // Only meaningful when bounded.
  double value() const { return value_; }
  bool admits(double squared_euclidean) const {
    return !bounded_ || squared_euclidean <= value_ * value_;
  }
  std::string to_string() const;

  friend bool operator==(const RestrictingRadius&, const RestrictingRadius&) = default;

 private:
  RestrictingRadius() = default;
  bool bounded_ = false;
  double value_ = 0.0;
};

class ProxyDistance {
 public:
  static ProxyDistance infinite() { return ProxyDistance(); }
  static ProxyDistance finite(double value) { return ProxyDistance(value); }

  bool is_finite() const { return finite_; }
  double value() const { return value_; }

 private:
  ProxyDistance() = default;
  explicit ProxyDistance(double v) : finite_(true), value_(v) {}
  bool finite_ = false;
  double value_ = 0.0;
};

/// |a^T (x - xi)| if |x - xi| <= eta, otherwise infinite. The projection is
/// evaluated as a^T x - a^T xi so that it agrees bitwise with the batched
/// search below.
ProxyDistance proxy_distance(const Vector& x, const Vector& xi, const Vector& a_hat_xi,
                             RestrictingRadius eta);

// Proxy-metric neighbor search over a fixed candidate set where each
// candidate carries one of a small table of tangents. Projections of the
// candidates are precomputed, so a query with unbounded eta costs O(N + JD).
class ProxyNeighborSearch {
 public:
  ProxyNeighborSearch() = default;
  ProxyNeighborSearch(Matrix candidates, std::vector<Vector> tangents,
                      std::vector<std::size_t> tangent_index);

  /// Indices of the (at most) k smallest finite proxy distances, ascending,
  /// ties broken by lower candidate index. Empty when nothing lies within eta.
  std::vector<Index> nearest(const Vector& x, RestrictingRadius eta, std::size_t k) const;

  /// Euclidean nearest candidate (lowest index on ties).
  Index euclidean_nearest(const Vector& x) const;

  const Matrix& candidates() const { return candidates_; }
  const std::vector<Vector>& tangents() const { return tangents_; }
  const std::vector<std::size_t>& tangent_index() const { return tangent_index_; }

 private:
  Matrix candidates_;
  std::vector<Vector> tangents_;
  std::vector<std::size_t> tangent_index_;
  Vector projections_;
};

/// Free-standing form with one tangent per candidate. Throws
/// "no candidate within restricting radius" when no distance is finite.
std::vector<Index> neighbor_order(const Vector& x, const Matrix& candidates,
                                  std::span<const Vector> tangents, RestrictingRadius eta,
                                  std::size_t k);

// Ascending (distance, index) selection of the k smallest entries of
// `distances` restricted to `pool`; shared by the proxy and Euclidean searches.
std::vector<Index> select_smallest(const Vector& distances, std::vector<Index> pool, std::size_t k);

}  // namespace nsim
