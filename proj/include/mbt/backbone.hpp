#pragma once

#include <cstdint>
#include <vector>

#include "mbt/graph.hpp"
#include "mbt/shortest_paths.hpp"

namespace mbt {

/// Relative tolerance of the semi-metric test: edge (u,v) is kept iff
/// dist(u,v) >= c(u,v) * (1 - backbone_eps_rel). Exact ties are kept.
constexpr double backbone_eps_rel = 1e-9;

struct backbone_result {
    weighted_graph backbone;            // same vertex set, original weights on kept edges
    std::vector<std::uint8_t> kept;     // parallel to the input edge list
    std::vector<vertex_id> roots_used;  // all n vertices for the exact backbone
};

/// Exact metric backbone: the subgraph of edges whose cost equals the
/// shortest-path distance between their endpoints.
///
/// Edges are scanned in increasing cost order; each edge is tested with a
/// bounded bidirectional Dijkstra over the already-accepted edges. Any path
/// shorter than an edge consists of strictly cheaper edges whose own shortest
/// paths are already accepted, so the restricted search decides the same
/// per-edge equality test as a full all-pairs computation.
backbone_result metric_backbone(const weighted_graph& g);

/// Union of shortest-path trees rooted at num_roots vertices sampled
/// uniformly without replacement. For a fixed seed the sampled root list is a
/// prefix-monotone sequence: fewer roots always yields a subset of the roots
/// (and hence of the edges) of a larger request.
backbone_result approximate_backbone(const weighted_graph& g, std::size_t num_roots,
                                     std::uint64_t seed);

/// Weighted diameter: the maximum over all vertex pairs of the
/// shortest-path cost. Throws disconnected when any pair is unreachable.
double max_shortest_path_cost(const weighted_graph& g);

/// Default root count for the approximate backbone: ceil(2 ln n), clamped to [1, n].
std::size_t default_num_roots(std::size_t n);

}  // namespace mbt
