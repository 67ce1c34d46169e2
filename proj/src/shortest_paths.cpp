#include "mbt/shortest_paths.hpp"

#include <queue>
#include <string>
#include <utility>

namespace mbt {

namespace {

void check_cost_mode(const weighted_graph& g, const char* op) {
    if (g.mode() != weight_mode::cost)
        throw wrong_mode(std::string(op) + ": graph must be cost-valued; convert proximities first");
}

using heap_item = std::pair<double, vertex_id>;
using min_heap = std::priority_queue<heap_item, std::vector<heap_item>, std::greater<>>;

}  // namespace

shortest_path_tree dijkstra(const weighted_graph& g, vertex_id root) {
    check_cost_mode(g, "dijkstra");
    const std::size_t n = g.num_vertices();
    if (root >= n) throw domain_error("dijkstra: root out of range");

    shortest_path_tree t;
    t.root = root;
    t.dist.assign(n, inf_cost);
    t.parent_edge.assign(n, no_parent);
    std::vector<std::uint8_t> settled(n, 0);

    min_heap heap;
    t.dist[root] = 0.0;
    heap.push({0.0, root});
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (settled[u]) continue;
        settled[u] = 1;
        for (const neighbor& nb : g.neighbors(u)) {
            const double nd = d + nb.weight;
            if (nd < t.dist[nb.to]) {
                t.dist[nb.to] = nd;
                t.parent_edge[nb.to] = nb.edge_index;
                heap.push({nd, nb.to});
            }
        }
    }
    return t;
}

double shortest_path_cost(const weighted_graph& g, vertex_id s, vertex_id t) {
    check_cost_mode(g, "shortest_path_cost");
    const std::size_t n = g.num_vertices();
    if (s >= n || t >= n) throw domain_error("shortest_path_cost: vertex out of range");
    if (s == t) return 0.0;

    // Bidirectional Dijkstra. `best` tracks the cheapest meeting path seen;
    // once the two frontier minima sum past it no shorter path exists.
    std::vector<double> dist[2];
    dist[0].assign(n, inf_cost);
    dist[1].assign(n, inf_cost);
    std::vector<std::uint8_t> settled[2];
    settled[0].assign(n, 0);
    settled[1].assign(n, 0);
    min_heap heap[2];
    dist[0][s] = 0.0;
    dist[1][t] = 0.0;
    heap[0].push({0.0, s});
    heap[1].push({0.0, t});

    double best = inf_cost;
    while (!heap[0].empty() && !heap[1].empty()) {
        if (heap[0].top().first + heap[1].top().first >= best) break;
        const int side = heap[0].top().first <= heap[1].top().first ? 0 : 1;
        auto [d, u] = heap[side].top();
        heap[side].pop();
        if (settled[side][u]) continue;
        settled[side][u] = 1;
        for (const neighbor& nb : g.neighbors(u)) {
            const double nd = d + nb.weight;
            if (nd < dist[side][nb.to]) {
                dist[side][nb.to] = nd;
                heap[side].push({nd, nb.to});
            }
            const double through = dist[side][nb.to] + dist[1 - side][nb.to];
            if (through < best) best = through;
        }
    }
    return best;
}

}  // namespace mbt
