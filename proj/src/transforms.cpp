#include "mbt/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace mbt {

namespace {

struct profile_entry {
    vertex_id id;
    double sim;
};

}  // namespace

weighted_graph weighted_jaccard(const weighted_graph& g) {
    if (g.num_edges() == 0) throw empty_result("weighted_jaccard: graph has no edges");
    const std::size_t n = g.num_vertices();

    // Closed similarity profile of each vertex, sorted by id: the neighbor
    // list plus a self entry weighted by the largest incident similarity.
    std::vector<std::vector<profile_entry>> profile(n);
    for (vertex_id u = 0; u < n; ++u) {
        const auto nbs = g.neighbors(u);
        if (nbs.empty()) continue;
        double self = 0.0;
        for (const neighbor& nb : nbs) self = std::max(self, nb.weight);
        auto& prof = profile[u];
        prof.reserve(nbs.size() + 1);
        bool placed = false;
        for (const neighbor& nb : nbs) {
            if (!placed && u < nb.to) {
                prof.push_back({u, self});
                placed = true;
            }
            prof.push_back({nb.to, nb.weight});
        }
        if (!placed) prof.push_back({u, self});
    }

    std::vector<edge> rows;
    rows.reserve(g.num_edges());
    for (const edge& e : g.edges()) {
        const auto& pu = profile[e.u];
        const auto& pv = profile[e.v];
        double num = 0.0, den = 0.0;
        std::size_t i = 0, j = 0;
        while (i < pu.size() || j < pv.size()) {
            if (j == pv.size() || (i < pu.size() && pu[i].id < pv[j].id)) {
                den += pu[i++].sim;
            } else if (i == pu.size() || pv[j].id < pu[i].id) {
                den += pv[j++].sim;
            } else {
                num += std::min(pu[i].sim, pv[j].sim);
                den += std::max(pu[i].sim, pv[j].sim);
                ++i;
                ++j;
            }
        }
        const double p = num / den;
        if (p > 0.0) rows.push_back({e.u, e.v, p});
    }
    return weighted_graph::from_edge_list(rows, weight_mode::proximity, n);
}

weighted_graph proximity_to_distance(const weighted_graph& g) {
    if (g.mode() != weight_mode::proximity)
        throw wrong_mode("proximity_to_distance: graph must be proximity-valued");
    std::vector<double> costs;
    costs.reserve(g.num_edges());
    for (const edge& e : g.edges()) {
        if (!(e.weight > 0.0))
            throw non_positive_proximity("proximity_to_distance: proximity must be positive");
        const double p = std::min(e.weight, max_proximity);
        costs.push_back(1.0 / p - 1.0);
    }
    return g.reweighted(costs, weight_mode::cost);
}

weighted_graph distance_to_proximity(const weighted_graph& g) {
    if (g.mode() != weight_mode::cost)
        throw wrong_mode("distance_to_proximity: graph must be cost-valued");
    std::vector<double> prox;
    prox.reserve(g.num_edges());
    for (const edge& e : g.edges()) prox.push_back(1.0 / (1.0 + e.weight));
    return g.reweighted(prox, weight_mode::proximity);
}

namespace {

struct nomination {
    vertex_id u, v;
    double half_sim;
};

weighted_graph combine_nominations(std::vector<nomination>& noms, std::size_t n) {
    for (nomination& nm : noms)
        if (nm.u > nm.v) std::swap(nm.u, nm.v);
    std::sort(noms.begin(), noms.end(), [](const nomination& a, const nomination& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    std::vector<edge> rows;
    rows.reserve(noms.size());
    for (const nomination& nm : noms) {
        if (!rows.empty() && rows.back().u == nm.u && rows.back().v == nm.v)
            rows.back().weight += nm.half_sim;
        else
            rows.push_back({nm.u, nm.v, nm.half_sim});
    }
    return weighted_graph::from_edge_list(rows, weight_mode::proximity, n);
}

}  // namespace

weighted_graph knn_graph(const point_cloud& cloud, std::size_t q, similarity_kernel kernel) {
    const std::size_t n = static_cast<std::size_t>(cloud.points.rows());
    if (n < 2) throw domain_error("knn_graph: need at least two points");
    if (q < 1 || q >= n) throw domain_error("knn_graph: q must satisfy 1 <= q < n");

    std::vector<nomination> noms;
    noms.reserve(n * q);
    std::vector<vertex_id> cand(n - 1);

    if (kernel == similarity_kernel::gaussian_local) {
        Eigen::VectorXd d2(n);
        for (std::size_t u = 0; u < n; ++u) {
            d2 = (cloud.points.rowwise() - cloud.points.row(u)).rowwise().squaredNorm();
            std::size_t c = 0;
            for (std::size_t v = 0; v < n; ++v)
                if (v != u) cand[c++] = static_cast<vertex_id>(v);
            auto closer = [&](vertex_id a, vertex_id b) {
                return d2(a) != d2(b) ? d2(a) < d2(b) : a < b;
            };
            std::nth_element(cand.begin(), cand.begin() + (q - 1), cand.end(), closer);
            std::sort(cand.begin(), cand.begin() + q, closer);
            const double dk2 = d2(cand[q - 1]);
            if (dk2 <= 0.0)
                throw duplicate_points("knn_graph: q-th nearest neighbor of point " +
                                       std::to_string(u) + " is at distance 0");
            for (std::size_t t = 0; t < q; ++t) {
                const double s = std::exp(-d2(cand[t]) / dk2);
                noms.push_back({static_cast<vertex_id>(u), cand[t], 0.5 * s});
            }
        }
    } else {
        Eigen::MatrixXd unit = cloud.points;
        for (std::size_t v = 0; v < n; ++v) {
            const double norm = unit.row(v).norm();
            if (!(norm > 0.0))
                throw domain_error("knn_graph: angular kernel needs nonzero points (row " +
                                   std::to_string(v) + ")");
            unit.row(v) /= norm;
        }
        Eigen::VectorXd dots(n);
        for (std::size_t u = 0; u < n; ++u) {
            dots = (unit * unit.row(u).transpose()).cwiseAbs().cwiseMin(1.0);
            std::size_t c = 0;
            for (std::size_t v = 0; v < n; ++v)
                if (v != u) cand[c++] = static_cast<vertex_id>(v);
            auto more_similar = [&](vertex_id a, vertex_id b) {
                return dots(a) != dots(b) ? dots(a) > dots(b) : a < b;
            };
            std::nth_element(cand.begin(), cand.begin() + (q - 1), cand.end(), more_similar);
            std::sort(cand.begin(), cand.begin() + q, more_similar);
            for (std::size_t t = 0; t < q; ++t) {
                const double s = std::exp(-2.0 * std::acos(dots(cand[t])));
                noms.push_back({static_cast<vertex_id>(u), cand[t], 0.5 * s});
            }
        }
    }
    return combine_nominations(noms, n);
}

}  // namespace mbt
