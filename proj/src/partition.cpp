#include "nsim/partition.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "nsim/error.hpp"

namespace nsim {

std::string_view to_string(PartitionKind kind) {
  return kind == PartitionKind::dyadic ? "dyadic" : "equiblock";
}

PartitionKind parse_partition_kind(std::string_view name) {
  if (name == "dyadic") return PartitionKind::dyadic;
  if (name == "equiblock") return PartitionKind::equiblock;
  fail(ErrorKind::usage, "invalid_argument",
       "unknown partition kind '" + std::string(name) + "' (expected dyadic or equiblock)");
}

namespace {

void require_responses(const Vector& responses, std::size_t J) {
  if (J < 1) fail(ErrorKind::usage, "invalid_argument", "number of level sets J must be >= 1");
  if (responses.size() < 1) fail(ErrorKind::data, "empty_sample", "empty sample");
  if (!responses.allFinite()) fail(ErrorKind::data, "non_finite", "responses contain non-finite values");
}

// Derives groups from labels so that the two views always agree.
void fill_groups(ResponsePartition& p) {
  p.groups.assign(p.intervals.size(), {});
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    p.groups[p.labels[i]].push_back(static_cast<Index>(i));
  }
}

}  // namespace

ResponsePartition dyadic_partition(const Vector& responses, std::size_t J) {
  require_responses(responses, J);
  const double lo = responses.minCoeff();
  const double hi = responses.maxCoeff();
  const double range = hi - lo;
  if (J > 1 && !(range > 0.0)) {
    fail(ErrorKind::data, "degenerate_response_range", "degenerate response range");
  }

  ResponsePartition p;
  p.kind = PartitionKind::dyadic;
  p.intervals.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    auto& cell = p.intervals[j];
    cell.lower = j == 0 ? lo : lo + range * (static_cast<double>(j) / static_cast<double>(J));
    cell.upper = j + 1 == J ? hi : lo + range * (static_cast<double>(j + 1) / static_cast<double>(J));
    cell.closed_upper = j + 1 == J;
  }

  p.labels.resize(static_cast<std::size_t>(responses.size()));
  for (Index i = 0; i < responses.size(); ++i) {
    p.labels[static_cast<std::size_t>(i)] = locate(p, responses[i]);
  }
  fill_groups(p);
  return p;
}

ResponsePartition equiblock_partition(const Vector& responses, std::size_t J) {
  require_responses(responses, J);
  const auto n = static_cast<std::size_t>(responses.size());
  if (J > n) {
    fail(ErrorKind::infeasible, "too_many_level_sets",
         "J=" + std::to_string(J) + " exceeds the sample size " + std::to_string(n));
  }

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return responses[a] < responses[b]; });

  const std::size_t base = n / J;
  const std::size_t extra = n % J;

  ResponsePartition p;
  p.kind = PartitionKind::equiblock;
  p.intervals.resize(J);
  p.labels.resize(n);

  std::size_t start = 0;
  for (std::size_t j = 0; j < J; ++j) {
    const std::size_t len = base + (j < extra ? 1 : 0);
    for (std::size_t r = start; r < start + len; ++r) p.labels[static_cast<std::size_t>(order[r])] = j;

    auto& cell = p.intervals[j];
    cell.lower = j == 0 ? responses[order.front()] : p.intervals[j - 1].upper;
    if (j + 1 == J) {
      cell.upper = responses[order.back()];
      cell.closed_upper = true;
    } else {
      const double last = responses[order[start + len - 1]];
      const double next = responses[order[start + len]];
      cell.upper = last + 0.5 * (next - last);
    }
    start += len;
  }
  fill_groups(p);
  return p;
}

ResponsePartition make_partition(PartitionKind kind, const Vector& responses, std::size_t J) {
  return kind == PartitionKind::dyadic ? dyadic_partition(responses, J)
                                       : equiblock_partition(responses, J);
}

std::size_t locate(const ResponsePartition& partition, double y) {
  const auto& cells = partition.intervals;
  if (cells.empty()) fail(ErrorKind::usage, "invalid_argument", "locate on an empty partition");
  // First interval (other than the last) whose upper bound exceeds y.
  auto it = std::upper_bound(cells.begin(), cells.end() - 1, y,
                             [](double v, const ResponseInterval& cell) { return v < cell.upper; });
  return static_cast<std::size_t>(it - cells.begin());
}

}  // namespace nsim
