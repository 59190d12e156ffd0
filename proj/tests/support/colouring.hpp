#pragma once

#include <vector>

#include <asl/benchgen.hpp>

namespace colouring_detail {

// Extends colour (1-based, entries 1..3, vertices <= next fixed) to a proper
// 3-colouring of all n vertices. Edge conflicts are only tested at the end;
// the graphs involved are tiny.
inline bool extension_exists(const asl::UndirectedGraph& g, std::vector<int>& colour,
                             size_t next) {
    if (next > g.n) {
        for (auto [i, j] : g.edges)
            if (colour[i] == colour[j]) return false;
        return true;
    }
    for (int c = 1; c <= 3; ++c) {
        colour[next] = c;
        if (extension_exists(g, colour, next + 1)) return true;
    }
    return false;
}

} // namespace colouring_detail

// The 2-round game: the opponent colours the k leaves arbitrarily, then the
// player must complete a proper 3-colouring. Winning means every one of the
// 3^k leaf colourings extends.
inline bool colouring_game_winnable(const asl::UndirectedGraph& g) {
    std::vector<int> colour(g.n + 1, 0);
    size_t total = 1;
    for (size_t i = 0; i < g.k; ++i) total *= 3;
    for (size_t code = 0; code < total; ++code) {
        size_t rest = code;
        for (size_t i = 1; i <= g.k; ++i) {
            colour[i] = 1 + static_cast<int>(rest % 3);
            rest /= 3;
        }
        if (!colouring_detail::extension_exists(g, colour, g.k + 1)) return false;
    }
    return true;
}
