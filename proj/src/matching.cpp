#include "extlab/matching.hpp"

#include <stdexcept>

namespace extlab {

namespace {

struct Kuhn {
    const std::vector<std::vector<std::size_t>>& adj;
    std::vector<std::optional<std::size_t>> owner;  // right -> left
    std::vector<char> seen;

    bool augment(std::size_t left) {
        for (std::size_t r : adj[left])
            if (!owner[r]) {
                owner[r] = left;
                return true;
            }
        for (std::size_t r : adj[left]) {
            if (seen[r]) continue;
            seen[r] = 1;
            if (!owner[r] || augment(*owner[r])) {
                owner[r] = left;
                return true;
            }
        }
        return false;
    }
};

}  // namespace

std::vector<std::optional<std::size_t>> max_bipartite_matching(
    const std::vector<std::vector<std::size_t>>& adjacency, std::size_t right_count) {
    for (const auto& nbrs : adjacency)
        for (auto r : nbrs)
            if (r >= right_count) throw std::out_of_range("matching: right vertex out of range");

    Kuhn k{adjacency, std::vector<std::optional<std::size_t>>(right_count), {}};
    for (std::size_t l = 0; l < adjacency.size(); ++l) {
        k.seen.assign(right_count, 0);
        k.augment(l);
    }
    std::vector<std::optional<std::size_t>> result(adjacency.size());
    for (std::size_t r = 0; r < right_count; ++r)
        if (k.owner[r]) result[*k.owner[r]] = r;
    return result;
}

bool is_left_perfect(const std::vector<std::optional<std::size_t>>& matching) {
    for (const auto& m : matching)
        if (!m) return false;
    return true;
}

}  // namespace extlab
