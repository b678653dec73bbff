#include <algorithm>
#include <numeric>
#include <set>

#include "nsim/proxy_metric.hpp"
#include "support.hpp"

using namespace nsim;
using testing::vec;

namespace {

Matrix column(std::initializer_list<double> values) { return vec(values); }

std::vector<Vector> repeated(const Vector& a, std::size_t n) { return std::vector<Vector>(n, a); }

std::set<Index> finite_set(const Vector& x, const Matrix& c, const std::vector<Vector>& tangents, RestrictingRadius eta) {
  std::set<Index> out;
  for (Index i = 0; i < c.rows(); ++i) {
    if (proxy_distance(x, c.row(i).transpose(), tangents[static_cast<std::size_t>(i)], eta).is_finite()) out.insert(i);
  }
  return out;
}

std::vector<Vector> random_unit_tangents(std::size_t n, Index d, std::uint64_t seed) {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(testing::gaussian_vector(d, seed + i).normalized());
  return out;
}

}  // namespace

TEST_CASE("proxy_distance") {
  const auto d1 = proxy_distance(vec({0, 0}), vec({1, 0}), vec({1, 0}), RestrictingRadius::of(2));
  REQUIRE(d1.is_finite());
  CHECK(d1.value() == 1.0);

  CHECK_FALSE(proxy_distance(vec({0, 0}), vec({1, 0}), vec({1, 0}), RestrictingRadius::of(0.5)).is_finite());

  const auto d3 = proxy_distance(vec({0, 0}), vec({1, 1}), vec({0, 1}), RestrictingRadius::unbounded());
  REQUIRE(d3.is_finite());
  CHECK(d3.value() == 1.0);

  // On the radius boundary the candidate is admitted.
  CHECK(proxy_distance(vec({0, 0}), vec({3, 4}), vec({1, 0}), RestrictingRadius::of(5)).is_finite());

  CHECK_NSIM_ERROR(proxy_distance(vec({0, 0}), vec({1, 0, 0}), vec({1, 0, 0}), RestrictingRadius::unbounded()),
                   "dimension_mismatch");
}

TEST_CASE("proxy distance depends on the candidate's tangent") {
  const Vector x = vec({0, 0});
  const Vector y = vec({1, 1});
  const auto xy = proxy_distance(x, y, vec({1, 0}), RestrictingRadius::unbounded());
  const auto yx = proxy_distance(y, x, vec({0.6, 0.8}), RestrictingRadius::unbounded());
  CHECK(xy.value() != doctest::Approx(yx.value()));
}

TEST_CASE("neighbor_order") {
  const Vector x = vec({0});
  const Vector a = vec({1});
  const Matrix three = column({2, 0, 1});
  CHECK(neighbor_order(x, three, repeated(a, 3), RestrictingRadius::unbounded(), 2) == std::vector<Index>{1, 2});

  // Only two candidates lie within eta = 1.5; k = 5 returns both.
  CHECK(neighbor_order(x, three, repeated(a, 3), RestrictingRadius::of(1.5), 5) == std::vector<Index>{1, 2});
  CHECK(neighbor_order(x, three, repeated(a, 3), RestrictingRadius::unbounded(), 10) ==
        std::vector<Index>{1, 2, 0});

  const Matrix ties = column({5, 6, 7, 8, 1, 9, 9, 1});
  CHECK(neighbor_order(x, ties, repeated(a, 8), RestrictingRadius::unbounded(), 2) == std::vector<Index>{4, 7});

  CHECK_NSIM_ERROR(neighbor_order(vec({100}), three, repeated(a, 3), RestrictingRadius::of(1), 1),
                   "no_candidate_in_radius");
  CHECK_NSIM_ERROR(neighbor_order(x, three, repeated(a, 3), RestrictingRadius::unbounded(), 0), "invalid_argument");
}

TEST_CASE("restricting radius parsing") {
  CHECK_FALSE(RestrictingRadius::parse("inf").is_bounded());
  CHECK(RestrictingRadius::parse("0.5").value() == 0.5);
  CHECK(RestrictingRadius::parse("0.5").to_string() == "0.5");
  CHECK(RestrictingRadius::unbounded().to_string() == "inf");
  CHECK_NSIM_ERROR(RestrictingRadius::parse("-1"), "invalid_argument");
  CHECK_NSIM_ERROR(RestrictingRadius::parse("abc"), "invalid_argument");
  CHECK_NSIM_ERROR(RestrictingRadius::of(0.0), "invalid_argument");
}

TEST_CASE("batched search agrees with the free-standing ordering") {
  const Index n = 200;
  const Index d = 4;
  const Matrix cands = testing::gaussian_matrix(n, d, 61);
  const std::vector<Vector> table = random_unit_tangents(3, d, 62);
  std::vector<std::size_t> idx(static_cast<std::size_t>(n));
  std::vector<Vector> per_candidate;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    idx[i] = i % 3;
    per_candidate.push_back(table[idx[i]]);
  }
  const ProxyNeighborSearch search(cands, table, idx);
  for (std::uint64_t q = 0; q < 30; ++q) {
    const Vector x = testing::gaussian_vector(d, 70 + q);
    for (auto eta : {RestrictingRadius::unbounded(), RestrictingRadius::of(1.5)}) {
      const auto got = search.nearest(x, eta, 7);
      if (got.empty()) {
        CHECK(finite_set(x, cands, per_candidate, eta).empty());
        continue;
      }
      CHECK(got == neighbor_order(x, cands, per_candidate, eta, 7));
    }
  }
  // Euclidean nearest by brute force.
  const Vector x = testing::gaussian_vector(d, 99);
  Index best = 0;
  (cands.rowwise() - x.transpose()).rowwise().squaredNorm().minCoeff(&best);
  CHECK(search.euclidean_nearest(x) == best);
}

TEST_SUITE("properties") {
  TEST_CASE("finite neighbor sets grow with eta") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Matrix cands = testing::gaussian_matrix(60, 3, 1100 + seed);
      const auto tangents = random_unit_tangents(60, 3, 1200 + seed * 100);
      const Vector x = testing::gaussian_vector(3, 1300 + seed);
      std::set<Index> previous;
      for (double eta : {0.2, 0.5, 1.0, 1.7, 3.0}) {
        const auto current = finite_set(x, cands, tangents, RestrictingRadius::of(eta));
        CHECK(std::includes(current.begin(), current.end(), previous.begin(), previous.end()));
        previous = current;
      }
      const auto all = finite_set(x, cands, tangents, RestrictingRadius::unbounded());
      CHECK(all.size() == 60);
    }
  }

  TEST_CASE("single tangent with unbounded eta orders by projected distance") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Index n = 50;
      const Matrix cands = testing::gaussian_matrix(n, 5, 1400 + seed);
      const Vector a = testing::gaussian_vector(5, 1500 + seed).normalized();
      const Vector x = testing::gaussian_vector(5, 1600 + seed);
      std::vector<Index> expected(static_cast<std::size_t>(n));
      std::iota(expected.begin(), expected.end(), Index{0});
      const double ax = a.dot(x);
      auto key = [&](Index i) { return std::abs(ax - a.dot(cands.row(i).transpose())); };
      std::stable_sort(expected.begin(), expected.end(), [&](Index l, Index r) { return key(l) < key(r); });
      expected.resize(10);
      CHECK(neighbor_order(x, cands, repeated(a, static_cast<std::size_t>(n)), RestrictingRadius::unbounded(), 10) ==
            expected);
    }
  }
}
