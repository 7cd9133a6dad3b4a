#include "graph_util.hpp"

#include <algorithm>
#include <limits>

namespace ossrisk::detail {

std::vector<std::size_t> strongly_connected_components(const std::vector<std::vector<std::size_t>>& adjacency) {
    constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
    const std::size_t n = adjacency.size();
    std::vector<std::size_t> index(n, unvisited), lowlink(n, 0), component(n, unvisited);
    std::vector<char> on_stack(n, 0);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next edge position)
    std::size_t counter = 0, components = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        call.emplace_back(root, 0);
        while (!call.empty()) {
            auto& [v, pos] = call.back();
            if (pos == 0 && index[v] == unvisited) {
                index[v] = lowlink[v] = counter++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            if (pos < adjacency[v].size()) {
                std::size_t w = adjacency[v][pos++];
                if (index[w] == unvisited) {
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    lowlink[v] = std::min(lowlink[v], index[w]);
                }
                continue;
            }
            if (lowlink[v] == index[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    component[w] = components;
                } while (w != v);
                ++components;
            }
            std::size_t finished = v;
            call.pop_back();
            if (!call.empty()) {
                std::size_t parent = call.back().first;
                lowlink[parent] = std::min(lowlink[parent], lowlink[finished]);
            }
        }
    }
    return component;
}

} // namespace ossrisk::detail
