#pragma once

#include <cstddef>
#include <vector>

namespace ossrisk::detail {

// Tarjan's algorithm, iterative. Returns the component id of every node;
// ids are assigned in completion order.
std::vector<std::size_t> strongly_connected_components(const std::vector<std::vector<std::size_t>>& adjacency);

} // namespace ossrisk::detail
