#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "mbt/graph.hpp"

namespace mbt {

constexpr double inf_cost = std::numeric_limits<double>::infinity();
constexpr std::int64_t no_parent = -1;

struct shortest_path_tree {
    vertex_id root = 0;
    std::vector<double> dist;                // inf_cost for unreachable vertices
    std::vector<std::int64_t> parent_edge;   // index into g.edges(), no_parent at root/unreachable
};

/// Single-source shortest paths on a cost-valued graph.
shortest_path_tree dijkstra(const weighted_graph& g, vertex_id root);

/// Shortest-path cost between one pair, by bidirectional search.
/// Returns inf_cost when t is unreachable from s.
double shortest_path_cost(const weighted_graph& g, vertex_id s, vertex_id t);

}  // namespace mbt
