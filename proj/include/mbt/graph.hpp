#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mbt/errors.hpp"

namespace mbt {

using vertex_id = std::uint32_t;

enum class weight_mode { cost, proximity };

/// Undirected edge stored once with u < v.
struct edge {
    vertex_id u;
    vertex_id v;
    double weight;
};

struct neighbor {
    vertex_id to;
    double weight;
    std::uint32_t edge_index;
};

/// Immutable undirected graph with strictly positive edge weights.
///
/// Edges are canonicalized to u < v and kept sorted by (u, v), so the edge
/// list order is deterministic and symmetric by construction. Adjacency is
/// CSR with neighbor lists sorted by vertex id. Instances never change after
/// construction, which makes concurrent reads safe.
class weighted_graph {
public:
    weighted_graph() = default;

    /// Builds a graph from raw rows. Vertex count is max id + 1 unless a
    /// larger n is given explicitly (allowing trailing isolated vertices).
    /// Duplicate rows with equal weight collapse to one edge; duplicates with
    /// different weights are rejected.
    static weighted_graph from_edge_list(const std::vector<edge>& rows, weight_mode mode,
                                         std::optional<std::size_t> n = std::nullopt);

    std::size_t num_vertices() const { return n_; }
    std::size_t num_edges() const { return edges_.size(); }
    weight_mode mode() const { return mode_; }

    /// Canonical edge list, sorted by (u, v) with u < v.
    const std::vector<edge>& edges() const { return edges_; }

    std::span<const neighbor> neighbors(vertex_id u) const {
        return {adj_.data() + offsets_[u], adj_.data() + offsets_[u + 1]};
    }

    std::size_t degree(vertex_id u) const { return offsets_[u + 1] - offsets_[u]; }

    /// Subgraph on the same vertex set keeping edges with keep[i] != 0,
    /// indexed in edges() order. Weights and mode are preserved.
    weighted_graph edge_subgraph(const std::vector<std::uint8_t>& keep) const;

    /// Same edge set with new weights (parallel to edges() order).
    weighted_graph reweighted(const std::vector<double>& weights, weight_mode mode) const;

private:
    void build_adjacency();

    std::size_t n_ = 0;
    weight_mode mode_ = weight_mode::cost;
    std::vector<edge> edges_;
    std::vector<std::uint32_t> offsets_ = {0};
    std::vector<neighbor> adj_;
};

/// Community assignment: labels[v] in [0, k).
struct partition {
    std::vector<std::uint32_t> labels;
    std::uint32_t k = 1;

    static partition from_labels(std::vector<std::uint32_t> labels, std::uint32_t k);

    std::size_t size() const { return labels.size(); }
    std::vector<std::size_t> block_sizes() const;
};

/// Maximal connected vertex sets, ordered by decreasing size and then by
/// smallest contained vertex id; each set is sorted ascending.
std::vector<std::vector<vertex_id>> connected_components(const weighted_graph& g);

struct filtered_graph {
    weighted_graph graph;
    std::vector<vertex_id> old_ids;  // new id -> original id
};

/// Induced subgraph on the union of components of size >= min_size, with a
/// remap back to original ids. Surviving vertices keep their relative order.
filtered_graph filter_small_components(const weighted_graph& g, std::size_t min_size);

}  // namespace mbt
