#include "mbt/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mbt {

weighted_graph weighted_graph::from_edge_list(const std::vector<edge>& rows, weight_mode mode,
                                              std::optional<std::size_t> n) {
    weighted_graph g;
    g.mode_ = mode;
    g.edges_.reserve(rows.size());

    std::size_t max_id = 0;
    for (const edge& r : rows) {
        if (r.u == r.v)
            throw self_loop("self loop at vertex " + std::to_string(r.u));
        if (!(r.weight > 0.0) || !std::isfinite(r.weight))
            throw non_positive_weight("edge (" + std::to_string(r.u) + "," + std::to_string(r.v) +
                                      ") has non-positive weight " + std::to_string(r.weight));
        edge e = r;
        if (e.u > e.v) std::swap(e.u, e.v);
        max_id = std::max<std::size_t>(max_id, e.v);
        g.edges_.push_back(e);
    }

    g.n_ = rows.empty() ? 0 : max_id + 1;
    if (n) {
        if (*n < g.n_)
            throw domain_error("vertex id " + std::to_string(max_id) + " out of range for n=" +
                               std::to_string(*n));
        g.n_ = *n;
    }

    std::sort(g.edges_.begin(), g.edges_.end(), [](const edge& a, const edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    std::size_t out = 0;
    for (std::size_t i = 0; i < g.edges_.size(); ++i) {
        if (out > 0 && g.edges_[out - 1].u == g.edges_[i].u && g.edges_[out - 1].v == g.edges_[i].v) {
            if (g.edges_[out - 1].weight != g.edges_[i].weight)
                throw conflicting_duplicate_edge("edge (" + std::to_string(g.edges_[i].u) + "," +
                                                 std::to_string(g.edges_[i].v) +
                                                 ") repeated with different weights");
            continue;
        }
        g.edges_[out++] = g.edges_[i];
    }
    g.edges_.resize(out);

    g.build_adjacency();
    return g;
}

void weighted_graph::build_adjacency() {
    offsets_.assign(n_ + 1, 0);
    for (const edge& e : edges_) {
        ++offsets_[e.u + 1];
        ++offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];

    adj_.resize(2 * edges_.size());
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const edge& e = edges_[i];
        adj_[cursor[e.u]++] = {e.v, e.weight, static_cast<std::uint32_t>(i)};
        adj_[cursor[e.v]++] = {e.u, e.weight, static_cast<std::uint32_t>(i)};
    }
    for (std::size_t u = 0; u < n_; ++u) {
        std::sort(adj_.begin() + offsets_[u], adj_.begin() + offsets_[u + 1],
                  [](const neighbor& a, const neighbor& b) { return a.to < b.to; });
    }
}

weighted_graph weighted_graph::edge_subgraph(const std::vector<std::uint8_t>& keep) const {
    if (keep.size() != edges_.size())
        throw domain_error("edge_subgraph: keep mask size mismatch");
    weighted_graph g;
    g.n_ = n_;
    g.mode_ = mode_;
    for (std::size_t i = 0; i < edges_.size(); ++i)
        if (keep[i]) g.edges_.push_back(edges_[i]);
    g.build_adjacency();
    return g;
}

weighted_graph weighted_graph::reweighted(const std::vector<double>& weights, weight_mode mode) const {
    if (weights.size() != edges_.size())
        throw domain_error("reweighted: weight vector size mismatch");
    weighted_graph g;
    g.n_ = n_;
    g.mode_ = mode;
    g.edges_ = edges_;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
            throw non_positive_weight("reweighted: non-positive weight at edge " + std::to_string(i));
        g.edges_[i].weight = weights[i];
    }
    g.build_adjacency();
    return g;
}

partition partition::from_labels(std::vector<std::uint32_t> labels, std::uint32_t k) {
    if (k < 1) throw domain_error("partition: k must be >= 1");
    for (std::uint32_t l : labels)
        if (l >= k)
            throw domain_error("partition: label " + std::to_string(l) + " outside [0," +
                               std::to_string(k) + ")");
    partition p;
    p.labels = std::move(labels);
    p.k = k;
    return p;
}

std::vector<std::size_t> partition::block_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (std::uint32_t l : labels) ++sizes[l];
    return sizes;
}

std::vector<std::vector<vertex_id>> connected_components(const weighted_graph& g) {
    const std::size_t n = g.num_vertices();
    std::vector<std::vector<vertex_id>> comps;
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<vertex_id> stack;
    for (vertex_id s = 0; s < n; ++s) {
        if (seen[s]) continue;
        std::vector<vertex_id> comp;
        seen[s] = 1;
        stack.push_back(s);
        while (!stack.empty()) {
            vertex_id u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            for (const neighbor& nb : g.neighbors(u)) {
                if (!seen[nb.to]) {
                    seen[nb.to] = 1;
                    stack.push_back(nb.to);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    std::stable_sort(comps.begin(), comps.end(),
                     [](const std::vector<vertex_id>& a, const std::vector<vertex_id>& b) {
                         return a.size() != b.size() ? a.size() > b.size() : a.front() < b.front();
                     });
    return comps;
}

filtered_graph filter_small_components(const weighted_graph& g, std::size_t min_size) {
    if (min_size < 1) throw domain_error("filter_small_components: min_size must be >= 1");
    const std::size_t n = g.num_vertices();
    std::vector<std::uint8_t> keep_vertex(n, 0);
    for (const auto& comp : connected_components(g))
        if (comp.size() >= min_size)
            for (vertex_id v : comp) keep_vertex[v] = 1;

    filtered_graph out;
    std::vector<vertex_id> new_id(n, 0);
    for (vertex_id v = 0; v < n; ++v) {
        if (keep_vertex[v]) {
            new_id[v] = static_cast<vertex_id>(out.old_ids.size());
            out.old_ids.push_back(v);
        }
    }
    if (out.old_ids.empty())
        throw empty_result("filter_small_components: every component smaller than " +
                           std::to_string(min_size));

    std::vector<edge> rows;
    for (const edge& e : g.edges())
        if (keep_vertex[e.u] && keep_vertex[e.v])
            rows.push_back({new_id[e.u], new_id[e.v], e.weight});
    out.graph = weighted_graph::from_edge_list(rows, g.mode(), out.old_ids.size());
    return out;
}

}  // namespace mbt
