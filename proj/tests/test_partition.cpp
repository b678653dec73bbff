#include <algorithm>
#include <set>

#include "nsim/partition.hpp"
#include "support.hpp"

using namespace nsim;
using testing::vec;

namespace {

void check_disjoint_cover(const ResponsePartition& p, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (std::size_t j = 0; j < p.groups.size(); ++j) {
    for (Index i : p.groups[j]) {
      REQUIRE(static_cast<std::size_t>(i) < n);
      ++seen[static_cast<std::size_t>(i)];
      CHECK(p.labels[static_cast<std::size_t>(i)] == j);
    }
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

void check_membership(const ResponsePartition& p, const Vector& y) {
  for (std::size_t j = 0; j < p.groups.size(); ++j) {
    for (Index i : p.groups[j]) CHECK(p.intervals[j].contains(y[i]));
  }
  for (std::size_t j = 0; j + 1 < p.intervals.size(); ++j) {
    CHECK(p.intervals[j].lower <= p.intervals[j].upper);
    CHECK(p.intervals[j].upper == p.intervals[j + 1].lower);
    CHECK_FALSE(p.intervals[j].closed_upper);
  }
  CHECK(p.intervals.back().closed_upper);
}

}  // namespace

TEST_CASE("dyadic_partition") {
  const Vector unit = vec({0.0, 0.2, 0.5, 0.7, 1.0});
  const auto halves = dyadic_partition(unit, 2);
  REQUIRE(halves.num_level_sets() == 2);
  CHECK(halves.intervals[0].lower == 0.0);
  CHECK(halves.intervals[0].upper == 0.5);
  CHECK_FALSE(halves.intervals[0].closed_upper);
  CHECK(halves.intervals[1].lower == 0.5);
  CHECK(halves.intervals[1].upper == 1.0);
  CHECK(halves.intervals[1].closed_upper);
  CHECK(halves.groups[0] == std::vector<Index>{0, 1});
  CHECK(halves.groups[1] == std::vector<Index>{2, 3, 4});

  const Vector any = testing::gaussian_vector(17, 3);
  const auto one = dyadic_partition(any, 1);
  REQUIRE(one.groups.size() == 1);
  CHECK(one.groups[0].size() == 17);

  // Scaled to [0,1]: 0.1 -> 0, 0.4 -> 0.375, 0.6 -> 0.625, 0.9 -> 1 in cells of width 1/4.
  const auto quarters = dyadic_partition(vec({0.1, 0.4, 0.6, 0.9}), 4);
  for (std::size_t j = 0; j < 4; ++j) {
    REQUIRE(quarters.groups[j].size() == 1);
    CHECK(quarters.groups[j][0] == static_cast<Index>(j));
  }

  CHECK_NSIM_ERROR(dyadic_partition(any, 0), "invalid_argument");
  CHECK_NSIM_ERROR(dyadic_partition(Vector::Constant(5, 2.0), 2), "degenerate_response_range");
  CHECK(dyadic_partition(Vector::Constant(5, 2.0), 1).groups[0].size() == 5);

  // Empty level sets are allowed at construction.
  const auto sparse = dyadic_partition(vec({0.0, 0.01, 1.0}), 4);
  CHECK(sparse.groups[1].empty());
}

TEST_CASE("equiblock_partition") {
  const auto two = equiblock_partition(vec({3, 1, 4, 2}), 2);
  CHECK(two.groups[0] == std::vector<Index>{1, 3});
  CHECK(two.groups[1] == std::vector<Index>{0, 2});
  CHECK(two.intervals[0].upper == 2.5);

  const auto one = equiblock_partition(vec({5, 1, 3}), 1);
  CHECK(one.groups[0].size() == 3);
  CHECK(one.intervals.size() == 1);

  const auto five = equiblock_partition(vec({1, 2, 3, 4, 5}), 2);
  CHECK(five.groups[0].size() == 3);
  CHECK(five.groups[1].size() == 2);

  CHECK_NSIM_ERROR(equiblock_partition(vec({1, 2}), 3), "too_many_level_sets");
  CHECK_NSIM_ERROR(equiblock_partition(vec({1, 2}), 0), "invalid_argument");

  // Tied responses are ordered by sample index.
  const auto ties = equiblock_partition(vec({1, 1, 1, 1}), 2);
  CHECK(ties.groups[0] == std::vector<Index>{0, 1});
  CHECK(ties.groups[1] == std::vector<Index>{2, 3});
}

TEST_CASE("locate") {
  const auto p = dyadic_partition(vec({0.0, 0.3, 0.6, 1.0}), 4);
  CHECK(locate(p, 0.6) == 2);
  CHECK(locate(p, -5.0) == 0);
  CHECK(locate(p, 7.0) == 3);
  CHECK(locate(p, 0.5) == 2);
  CHECK(locate(p, 0.25) == 1);
  CHECK(locate(p, 1.0) == 3);
}

TEST_CASE("partition kind names") {
  CHECK(parse_partition_kind("dyadic") == PartitionKind::dyadic);
  CHECK(parse_partition_kind("equiblock") == PartitionKind::equiblock);
  CHECK(to_string(PartitionKind::equiblock) == "equiblock");
  CHECK_NSIM_ERROR(parse_partition_kind("quantile"), "invalid_argument");
}

TEST_SUITE("properties") {
  TEST_CASE("partitions are disjoint covers consistent with their intervals") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const Index n = 5 + static_cast<Index>(seed * 7 % 90);
      Vector y = testing::gaussian_vector(n, 500 + seed);
      if (seed % 3 == 0) y = y.array().round();  // many ties
      for (std::size_t J : {1u, 2u, 3u, 5u, 8u}) {
        if (J > static_cast<std::size_t>(n)) continue;
        for (auto kind : {PartitionKind::dyadic, PartitionKind::equiblock}) {
          const auto p = make_partition(kind, y, J);
          CHECK(p.num_level_sets() == J);
          check_disjoint_cover(p, static_cast<std::size_t>(n));
          for (Index a = 0; a < n; ++a) {
            for (Index b = 0; b < n; ++b) {
              if (y[a] < y[b]) CHECK(p.labels[static_cast<std::size_t>(a)] <= p.labels[static_cast<std::size_t>(b)]);
            }
          }
          // Equal-count blocks may split a run of tied responses across a boundary.
          if (kind == PartitionKind::equiblock && seed % 3 == 0) continue;
          check_membership(p, y);
          for (Index i = 0; i < n; ++i) CHECK(locate(p, y[i]) == p.labels[static_cast<std::size_t>(i)]);
        }
      }
    }
  }

  TEST_CASE("equiblock sizes differ by at most one, larger blocks first") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const Index n = 3 + static_cast<Index>(seed * 11 % 120);
      const Vector y = testing::gaussian_vector(n, 600 + seed);
      for (std::size_t J = 1; J <= std::min<std::size_t>(12, static_cast<std::size_t>(n)); ++J) {
        const auto p = equiblock_partition(y, J);
        std::size_t lo = p.groups[0].size();
        std::size_t hi = lo;
        for (std::size_t j = 1; j < J; ++j) {
          CHECK(p.groups[j].size() <= p.groups[j - 1].size());
          lo = std::min(lo, p.groups[j].size());
          hi = std::max(hi, p.groups[j].size());
        }
        CHECK(hi - lo <= 1);
      }
    }
  }

  TEST_CASE("dyadic cells have equal scaled width") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Vector y = testing::uniform_vector(40, -3.0 - static_cast<double>(seed), 5.0, 700 + seed);
      const double lo = y.minCoeff();
      const double range = y.maxCoeff() - lo;
      for (std::size_t J : {1u, 2u, 3u, 7u, 16u}) {
        const auto p = dyadic_partition(y, J);
        for (const auto& cell : p.intervals) {
          CHECK(std::abs((cell.upper - cell.lower) / range - 1.0 / static_cast<double>(J)) <= 1e-12);
        }
      }
    }
  }
}
