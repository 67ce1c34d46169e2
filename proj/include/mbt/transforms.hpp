#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "mbt/graph.hpp"

namespace mbt {

struct point_cloud {
    Eigen::MatrixXd points;  // n x d, finite entries
    std::optional<partition> labels;
};

enum class similarity_kernel { gaussian_local, angular };

/// Proximities at or above 1 are clamped to this value before inversion so
/// converted costs stay strictly positive.
constexpr double max_proximity = 1.0 - 1e-9;

/// Weighted Jaccard proximity of every edge: the ratio of summed minima to
/// summed maxima of the two endpoints' similarity profiles.
///
/// Profiles use closed neighborhoods: each vertex belongs to its own
/// neighborhood with self-similarity max over its incident weights. This
/// keeps bridge edges (no common neighbor) at positive proximity instead of
/// silently deleting them. Edge weights of g are read as similarities.
weighted_graph weighted_jaccard(const weighted_graph& g);

/// Cost graph with c = 1/p - 1 per edge; proximities are clamped to
/// max_proximity first so every cost is positive.
weighted_graph proximity_to_distance(const weighted_graph& g);

/// Inverse conversion, p = 1/(1 + c); used when a cost-valued graph enters a
/// similarity-based pipeline.
weighted_graph distance_to_proximity(const weighted_graph& g);

/// Union q-nearest-neighbor graph over a point cloud: (u, v) is an edge when
/// either endpoint nominates the other, with weight (s_uv + s_vu)/2 where the
/// non-nominating side contributes 0.
///
/// gaussian_local: s_uv = exp(-|x_u - x_v|^2 / d_q(x_u)^2), with d_q(x_u) the
/// Euclidean distance from x_u to its q-th nearest neighbor. angular:
/// s_uv = exp(-2 acos(|<x_u, x_v>|)) on unit-normalized rows. Neighbor ties
/// are broken toward the smaller vertex id.
weighted_graph knn_graph(const point_cloud& cloud, std::size_t q, similarity_kernel kernel);

}  // namespace mbt
