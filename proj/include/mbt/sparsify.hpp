#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mbt/graph.hpp"

namespace mbt {

enum class sparsify_method { backbone, threshold, spectral };

struct block_pair_stat {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::size_t n_pairs = 0;     // vertex pairs with labels {a, b}
    std::size_t m_original = 0;  // edges of the input graph in this class
    std::size_t m_kept = 0;      // edges surviving sparsification
    double ratio = 0.0;          // m_kept / m_original, 0 when empty
};

struct sparsify_report {
    sparsify_method method = sparsify_method::backbone;
    std::size_t m_original = 0;
    std::size_t m_target = 0;
    std::size_t m_achieved = 0;
    std::vector<block_pair_stat> per_block;  // filled when labels are supplied
};

/// Keeps exactly the m_target edges of highest weight; ties are broken by
/// lexicographic (u, v). Surviving edges keep their weights.
std::pair<weighted_graph, sparsify_report> threshold_sparsify(const weighted_graph& g,
                                                              std::size_t m_target);

enum class resistance_method { automatic, dense, iterative };

/// Effective resistance of every edge, with edge weights as conductances,
/// in edges() order. The dense path inverts the regularized Laplacian; the
/// iterative path solves one grounded-Laplacian system per edge by
/// conjugate gradients. `automatic` picks dense for n <= 3000.
std::vector<double> effective_resistances(const weighted_graph& g,
                                          resistance_method method = resistance_method::automatic);

/// Spectral sparsifier: edges are sampled with replacement with probability
/// proportional to weight x resistance, each draw adding w_e/(Q p_e) to the
/// sampled edge's output weight. Draws stop as soon as the number of distinct
/// edges reaches m_target, so the count matches exactly; Q is the stopping
/// time. Output weights generally differ from input weights.
std::pair<weighted_graph, sparsify_report> spectral_sparsify(const weighted_graph& g,
                                                             std::size_t m_target,
                                                             std::uint64_t seed);

/// Per-block-pair edge counts of `sparse` relative to `g` under labels z.
sparsify_report block_retention(const weighted_graph& g, const partition& z,
                                const weighted_graph& sparse, sparsify_method method);

}  // namespace mbt
