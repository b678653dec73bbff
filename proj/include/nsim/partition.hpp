#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "nsim/linalg.hpp"

namespace nsim {

enum class PartitionKind { dyadic, equiblock };

std::string_view to_string(PartitionKind kind);
PartitionKind parse_partition_kind(std::string_view name);

// One response range R_j. Intervals are right-open except the last one.
struct ResponseInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool closed_upper = false;

  bool contains(double y) const { return y >= lower && (closed_upper ? y <= upper : y < upper); }
};

// J ordered response intervals and the level sets they induce on a sample.
struct ResponsePartition {
  PartitionKind kind = PartitionKind::dyadic;
  std::vector<ResponseInterval> intervals;
  std::vector<std::vector<Index>> groups;
  // labels[i] is the level set containing sample i.
  std::vector<std::size_t> labels;

  std::size_t num_level_sets() const { return intervals.size(); }
};

/// J equal-width cells over the min-max scaled response range. Level sets
/// may be empty; feasibility is checked when tangents are fitted.
ResponsePartition dyadic_partition(const Vector& responses, std::size_t J);

/// J contiguous blocks of the response-ordered sample with sizes differing by
/// at most one (larger blocks first). Boundaries sit at midpoints between the
/// adjacent responses on either side of a block split; response ties are
/// broken by sample index.
ResponsePartition equiblock_partition(const Vector& responses, std::size_t J);

ResponsePartition make_partition(PartitionKind kind, const Vector& responses, std::size_t J);

/// Index of the interval containing y. Values below the first interval map
/// to 0, above the last to J-1; a value on a shared boundary belongs to the
/// higher interval.
std::size_t locate(const ResponsePartition& partition, double y);

}  // namespace nsim
