#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mbt/graph.hpp"

namespace mbt {

struct spectral_embedding {
    Eigen::MatrixXd U;      // n x k, orthonormal columns
    Eigen::VectorXd sigma;  // eigenvalues, nonincreasing in absolute value
};

constexpr std::uint64_t default_cluster_seed = 0x5ca1ab1eULL;

/// Top-k eigenpairs of the weighted adjacency matrix by absolute eigenvalue.
///
/// Small problems use a dense solver; larger ones run Lanczos with full
/// reorthogonalization, locking one converged extreme eigenpair at a time and
/// deflating it, which resolves repeated eigenvalues. Each pair satisfies
/// |W u - sigma u| <= 1e-6 |W|. Eigenvector signs are normalized so the
/// entry of largest magnitude is positive.
spectral_embedding compute_spectral_embedding(const weighted_graph& g, std::size_t k,
                                              std::uint64_t seed = default_cluster_seed);

struct clustering_result {
    partition labels;
    double inertia = 0.0;
    int restarts_used = 0;
    std::vector<double> eigenvalues;  // filled by spectral_clustering
};

/// Best-of-restarts Lloyd iterations from k-means++ seeds. Empty clusters are
/// re-seeded at the point farthest from its assigned centroid.
clustering_result kmeans(const Eigen::MatrixXd& rows, std::size_t k, int restarts,
                         std::uint64_t seed);

/// Spectral clustering: k-means on the rows of the top-k adjacency
/// eigenvector matrix.
clustering_result spectral_clustering(const weighted_graph& g, std::size_t k,
                                      std::uint64_t seed = default_cluster_seed,
                                      int restarts = 10);

/// Fraction of misclassified vertices minimized over permutations of the
/// predicted labels, computed exactly by optimal assignment on the confusion
/// matrix. zhat may not use more labels than z.
double clustering_loss(const partition& z, const partition& zhat);

/// Pair-counting adjusted Rand index with the expected-index correction.
/// Degenerate comparisons where the correction removes all variation
/// (identical trivial partitions) evaluate to 1.
double adjusted_rand_index(const partition& z, const partition& zhat);

}  // namespace mbt
