#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace extlab {

/// Maximum bipartite matching by augmenting paths (Kuhn). Left vertices are processed in
/// index order; each one takes its first free neighbour if any, and only otherwise
/// augments, so sorted adjacency keeps earlier choices at low indices. Returns, per left
/// vertex, its matched right vertex.
std::vector<std::optional<std::size_t>> max_bipartite_matching(
    const std::vector<std::vector<std::size_t>>& adjacency, std::size_t right_count);

/// True when every left vertex is matched.
bool is_left_perfect(const std::vector<std::optional<std::size_t>>& matching);

}  // namespace extlab
