#pragma once

#include <cstddef>
#include <vector>

#include "nsim/linalg.hpp"

namespace nsim {

// N feature rows of dimension D paired with N scalar responses.
struct Dataset {
  Matrix features;
  Vector responses;

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }

  // Throws nsim::Error unless N >= 1, D >= 1, shapes agree and all values are finite.
  void validate() const;

  Dataset subset(const std::vector<Index>& indices) const;
};

}  // namespace nsim
