#include "mbt/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mbt/rng.hpp"

namespace mbt {

namespace {

void check_cost_mode(const weighted_graph& g, const char* op) {
    if (g.mode() != weight_mode::cost)
        throw wrong_mode(std::string(op) + ": graph must be cost-valued; convert proximities first");
}

struct heap_item {
    double key;
    vertex_id v;
    bool operator>(const heap_item& o) const { return key > o.key; }
};

class edge_heap {
public:
    void clear() { items_.clear(); }
    bool empty() const { return items_.empty(); }
    double top_key() const { return items_.front().key; }
    void push(double key, vertex_id v) {
        items_.push_back({key, v});
        std::push_heap(items_.begin(), items_.end(), std::greater<>{});
    }
    heap_item pop() {
        std::pop_heap(items_.begin(), items_.end(), std::greater<>{});
        heap_item it = items_.back();
        items_.pop_back();
        return it;
    }

private:
    std::vector<heap_item> items_;
};

struct arc {
    vertex_id to;
    double weight;
};

/// Bidirectional bounded search deciding whether a path cheaper than cap
/// exists between s and t in the accepted subgraph. Epoch stamps avoid
/// clearing the O(n) scratch arrays between queries.
class pair_tester {
public:
    explicit pair_tester(std::size_t n) {
        for (int side = 0; side < 2; ++side) {
            dist_[side].assign(n, 0.0);
            stamp_[side].assign(n, 0);
            done_[side].assign(n, 0);
        }
    }

    bool has_shorter_path(const std::vector<std::vector<arc>>& adj, vertex_id s, vertex_id t,
                          double cap) {
        ++epoch_;
        heap_[0].clear();
        heap_[1].clear();
        set_dist(0, s, 0.0);
        set_dist(1, t, 0.0);
        heap_[0].push(0.0, s);
        heap_[1].push(0.0, t);

        double best = inf_cost;
        while (!heap_[0].empty() && !heap_[1].empty()) {
            if (heap_[0].top_key() + heap_[1].top_key() >= cap) break;
            const int side = heap_[0].top_key() <= heap_[1].top_key() ? 0 : 1;
            const heap_item it = heap_[side].pop();
            if (settled(side, it.v)) continue;
            settle(side, it.v);
            for (const arc& a : adj[it.v]) {
                const double nd = it.key + a.weight;
                if (nd >= cap) continue;
                if (nd < get_dist(side, a.to)) {
                    set_dist(side, a.to, nd);
                    heap_[side].push(nd, a.to);
                }
                const double through = get_dist(side, a.to) + get_dist(1 - side, a.to);
                if (through < best) best = through;
            }
            if (best < cap) return true;
        }
        return best < cap;
    }

private:
    double get_dist(int side, vertex_id v) const {
        return stamp_[side][v] == epoch_ ? dist_[side][v] : inf_cost;
    }
    void set_dist(int side, vertex_id v, double d) {
        dist_[side][v] = d;
        if (stamp_[side][v] != epoch_) {
            stamp_[side][v] = epoch_;
            done_[side][v] = 0;
        }
    }
    bool settled(int side, vertex_id v) const {
        return stamp_[side][v] == epoch_ && done_[side][v];
    }
    void settle(int side, vertex_id v) { done_[side][v] = 1; }

    std::vector<double> dist_[2];
    std::vector<std::uint32_t> stamp_[2];
    std::vector<std::uint8_t> done_[2];
    edge_heap heap_[2];
    std::uint32_t epoch_ = 0;
};

}  // namespace

backbone_result metric_backbone(const weighted_graph& g) {
    check_cost_mode(g, "metric_backbone");
    const std::size_t n = g.num_vertices();
    const std::vector<edge>& edges = g.edges();

    std::vector<std::uint32_t> order(edges.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (edges[a].weight != edges[b].weight) return edges[a].weight < edges[b].weight;
        if (edges[a].u != edges[b].u) return edges[a].u < edges[b].u;
        return edges[a].v < edges[b].v;
    });

    backbone_result out;
    out.kept.assign(edges.size(), 0);
    std::vector<std::vector<arc>> accepted(n);
    pair_tester tester(n);
    for (std::uint32_t idx : order) {
        const edge& e = edges[idx];
        const double cap = e.weight * (1.0 - backbone_eps_rel);
        if (!tester.has_shorter_path(accepted, e.u, e.v, cap)) {
            out.kept[idx] = 1;
            accepted[e.u].push_back({e.v, e.weight});
            accepted[e.v].push_back({e.u, e.weight});
        }
    }

    out.backbone = g.edge_subgraph(out.kept);
    out.roots_used.resize(n);
    std::iota(out.roots_used.begin(), out.roots_used.end(), 0);
    return out;
}

backbone_result approximate_backbone(const weighted_graph& g, std::size_t num_roots,
                                     std::uint64_t seed) {
    check_cost_mode(g, "approximate_backbone");
    const std::size_t n = g.num_vertices();
    if (num_roots < 1 || num_roots > n)
        throw domain_error("approximate_backbone: num_roots must be in [1, n]");

    // Fisher-Yates prefix: the first r sampled roots for a given seed are a
    // prefix of the roots sampled for any r' > r, which makes the edge set
    // monotone in num_roots.
    rng gen(seed);
    std::vector<vertex_id> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = 0; i < num_roots; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(gen.uniform_int(n - i));
        std::swap(perm[i], perm[j]);
    }

    backbone_result out;
    out.kept.assign(g.num_edges(), 0);
    out.roots_used.assign(perm.begin(), perm.begin() + num_roots);
    for (vertex_id root : out.roots_used) {
        const shortest_path_tree t = dijkstra(g, root);
        for (std::size_t v = 0; v < n; ++v)
            if (t.parent_edge[v] != no_parent) out.kept[t.parent_edge[v]] = 1;
    }
    out.backbone = g.edge_subgraph(out.kept);
    return out;
}

double max_shortest_path_cost(const weighted_graph& g) {
    check_cost_mode(g, "max_shortest_path_cost");
    const std::size_t n = g.num_vertices();
    if (n <= 1) return 0.0;

    // The backbone preserves every pairwise distance, so the diameter can be
    // computed on it; at desk scale this is much cheaper than APSP on g.
    const weighted_graph bb = metric_backbone(g).backbone;
    double best = 0.0;
    for (vertex_id s = 0; s < n; ++s) {
        const shortest_path_tree t = dijkstra(bb, s);
        for (std::size_t v = 0; v < n; ++v) {
            if (t.dist[v] == inf_cost)
                throw disconnected("max_shortest_path_cost: graph is disconnected");
            if (t.dist[v] > best) best = t.dist[v];
        }
    }
    return best;
}

std::size_t default_num_roots(std::size_t n) {
    if (n <= 1) return 1;
    const std::size_t r = static_cast<std::size_t>(std::ceil(2.0 * std::log(static_cast<double>(n))));
    return std::min(std::max<std::size_t>(r, 1), n);
}

}  // namespace mbt
