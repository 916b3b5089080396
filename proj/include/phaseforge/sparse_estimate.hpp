#pragma once

#include <vector>

#include "phaseforge/types.hpp"

namespace phaseforge {

/// A signal estimate that vanishes exactly off `support` (sorted ascending).
template <Scalar S>
struct SparseEstimate {
  Vector<S> values;
  std::vector<Index> support;
};

}  // namespace phaseforge
