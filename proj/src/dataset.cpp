#include "nsim/dataset.hpp"

#include <string>

#include "nsim/error.hpp"

namespace nsim {

void Dataset::validate() const {
  if (features.rows() < 1 || features.cols() < 1) {
    fail(ErrorKind::data, "empty_sample", "empty sample");
  }
  if (features.rows() != responses.size()) {
    fail(ErrorKind::data, "length_mismatch",
         "feature rows (" + std::to_string(features.rows()) + ") and responses (" +
             std::to_string(responses.size()) + ") differ in length");
  }
  if (!features.allFinite() || !responses.allFinite()) {
    fail(ErrorKind::data, "non_finite", "dataset contains non-finite values");
  }
}

Dataset Dataset::subset(const std::vector<Index>& indices) const {
  Dataset out;
  out.features.resize(static_cast<Index>(indices.size()), features.cols());
  out.responses.resize(static_cast<Index>(indices.size()));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const Index i = indices[r];
    if (i < 0 || i >= features.rows()) {
      fail(ErrorKind::usage, "out_of_range", "sample index " + std::to_string(i) + " out of range");
    }
    out.features.row(static_cast<Index>(r)) = features.row(i);
    out.responses[static_cast<Index>(r)] = responses[i];
  }
  return out;
}

}  // namespace nsim
