#pragma once

#include <cstddef>
#include <vector>

namespace uavmp {

/// Indices of the significant points of a mutually non-dominated front (minimization):
/// every per-objective extreme plus the points lying further on the origin side of the
/// hyperplane through the extremes than the front's mean distance. Objectives are
/// normalized to [0,1] over the front first; constant objectives are ignored.
/// Never empty for a non-empty front; result is sorted ascending.
std::vector<std::size_t> knee_filter(const std::vector<std::vector<double>>& front);

/// Signed distance of each normalized point to the extreme hyperplane, positive on the
/// origin side. Exposed for tests.
std::vector<double> knee_distances(const std::vector<std::vector<double>>& front);

} // namespace uavmp
