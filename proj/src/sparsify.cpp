#include "mbt/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "mbt/rng.hpp"

namespace mbt {

namespace {

void check_proximity_mode(const weighted_graph& g, const char* op) {
    if (g.mode() != weight_mode::proximity)
        throw wrong_mode(std::string(op) + ": graph must be proximity-valued");
}

void check_connected(const weighted_graph& g, const char* op) {
    if (g.num_vertices() == 0 || connected_components(g).size() != 1)
        throw disconnected(std::string(op) + ": graph must be connected");
}

std::vector<double> dense_resistances(const weighted_graph& g) {
    const Eigen::Index n = static_cast<Eigen::Index>(g.num_vertices());
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    for (const edge& e : g.edges()) {
        m(e.u, e.u) += e.weight;
        m(e.v, e.v) += e.weight;
        m(e.u, e.v) -= e.weight;
        m(e.v, e.u) -= e.weight;
    }
    // (L + J/n) is positive definite on connected graphs and its inverse
    // differs from the pseudoinverse of L by J/n, which cancels in the
    // resistance quadratic form.
    const Eigen::MatrixXd inv = Eigen::LLT<Eigen::MatrixXd>(m).solve(
        Eigen::MatrixXd::Identity(n, n));
    std::vector<double> r;
    r.reserve(g.num_edges());
    for (const edge& e : g.edges())
        r.push_back(inv(e.u, e.u) + inv(e.v, e.v) - 2.0 * inv(e.u, e.v));
    return r;
}

/// One conjugate-gradient solve of the grounded Laplacian per edge. The last
/// vertex is grounded; the right-hand side e_u - e_v has the grounded row
/// dropped, and the resistance is the resulting potential difference.
class grounded_solver {
public:
    explicit grounded_solver(const weighted_graph& g)
        : g_(g), n_(g.num_vertices()), ground_(static_cast<vertex_id>(n_ - 1)) {
        diag_.assign(n_, 0.0);
        for (const edge& e : g.edges()) {
            diag_[e.u] += e.weight;
            diag_[e.v] += e.weight;
        }
    }

    double resistance(vertex_id u, vertex_id v) {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n_);
        if (u != ground_) b(u) = 1.0;
        if (v != ground_) b(v) = -1.0;
        const Eigen::VectorXd x = solve(b);
        const double xu = u == ground_ ? 0.0 : x(u);
        const double xv = v == ground_ ? 0.0 : x(v);
        return xu - xv;
    }

private:
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
        for (std::size_t u = 0; u + 1 < n_; ++u) {
            double acc = diag_[u] * x(u);
            for (const neighbor& nb : g_.neighbors(static_cast<vertex_id>(u)))
                if (nb.to != ground_) acc -= nb.weight * x(nb.to);
            y(u) = acc;
        }
        return y;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
        Eigen::VectorXd r = b;
        Eigen::VectorXd z(n_);
        for (std::size_t i = 0; i + 1 < n_; ++i) z(i) = r(i) / diag_[i];
        z(n_ - 1) = 0.0;
        Eigen::VectorXd p = z;
        double rz = r.head(n_ - 1).dot(z.head(n_ - 1));
        const double b_norm = std::max(b.norm(), 1e-300);
        const std::size_t cap = 40 * n_ + 100;
        for (std::size_t it = 0; it < cap; ++it) {
            if (r.head(n_ - 1).norm() <= 1e-11 * b_norm) break;
            const Eigen::VectorXd ap = apply(p);
            const double alpha = rz / p.head(n_ - 1).dot(ap.head(n_ - 1));
            x += alpha * p;
            r -= alpha * ap;
            for (std::size_t i = 0; i + 1 < n_; ++i) z(i) = r(i) / diag_[i];
            const double rz_next = r.head(n_ - 1).dot(z.head(n_ - 1));
            p = z + (rz_next / rz) * p;
            rz = rz_next;
        }
        return x;
    }

    const weighted_graph& g_;
    std::size_t n_;
    vertex_id ground_;
    std::vector<double> diag_;
};

std::vector<double> iterative_resistances(const weighted_graph& g) {
    grounded_solver solver(g);
    std::vector<double> r;
    r.reserve(g.num_edges());
    for (const edge& e : g.edges()) r.push_back(solver.resistance(e.u, e.v));
    return r;
}

}  // namespace

std::pair<weighted_graph, sparsify_report> threshold_sparsify(const weighted_graph& g,
                                                              std::size_t m_target) {
    check_proximity_mode(g, "threshold_sparsify");
    const std::vector<edge>& edges = g.edges();
    if (m_target > edges.size())
        throw budget_unreachable("threshold_sparsify: m_target " + std::to_string(m_target) +
                                 " exceeds edge count " + std::to_string(edges.size()));

    std::vector<std::uint32_t> order(edges.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (edges[a].weight != edges[b].weight) return edges[a].weight > edges[b].weight;
        if (edges[a].u != edges[b].u) return edges[a].u < edges[b].u;
        return edges[a].v < edges[b].v;
    });

    std::vector<std::uint8_t> keep(edges.size(), 0);
    for (std::size_t i = 0; i < m_target; ++i) keep[order[i]] = 1;

    sparsify_report rep;
    rep.method = sparsify_method::threshold;
    rep.m_original = edges.size();
    rep.m_target = m_target;
    rep.m_achieved = m_target;
    return {g.edge_subgraph(keep), rep};
}

std::vector<double> effective_resistances(const weighted_graph& g, resistance_method method) {
    check_proximity_mode(g, "effective_resistances");
    check_connected(g, "effective_resistances");
    const bool dense = method == resistance_method::dense ||
                       (method == resistance_method::automatic && g.num_vertices() <= 3000);
    return dense ? dense_resistances(g) : iterative_resistances(g);
}

std::pair<weighted_graph, sparsify_report> spectral_sparsify(const weighted_graph& g,
                                                             std::size_t m_target,
                                                             std::uint64_t seed) {
    check_proximity_mode(g, "spectral_sparsify");
    check_connected(g, "spectral_sparsify");
    const std::vector<edge>& edges = g.edges();
    const std::size_t m = edges.size();
    if (m_target > m)
        throw budget_unreachable("spectral_sparsify: m_target " + std::to_string(m_target) +
                                 " exceeds edge count " + std::to_string(m));

    sparsify_report rep;
    rep.method = sparsify_method::spectral;
    rep.m_original = m;
    rep.m_target = m_target;

    if (m_target == 0) {
        rep.m_achieved = 0;
        return {g.edge_subgraph(std::vector<std::uint8_t>(m, 0)), rep};
    }

    const std::vector<double> r = effective_resistances(g);
    std::vector<double> cum(m);
    double total = 0.0;
    for (std::size_t e = 0; e < m; ++e) {
        total += edges[e].weight * r[e];
        cum[e] = total;
    }

    // Sequential draws from one stream: taking more draws only extends the
    // prefix, so the distinct-edge count rises by unit steps and the stopping
    // time Q lands exactly on m_target distinct edges.
    rng gen(seed);
    std::vector<std::uint64_t> counts(m, 0);
    std::size_t distinct = 0;
    std::uint64_t q = 0;
    while (distinct < m_target) {
        if (++q > (1ULL << 34))
            throw convergence_failure("spectral_sparsify: sampling budget exhausted");
        const double u = gen.uniform01() * total;
        std::size_t e = static_cast<std::size_t>(
            std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        if (e >= m) e = m - 1;
        if (counts[e]++ == 0) ++distinct;
    }
    rep.m_achieved = distinct;

    std::vector<edge> rows;
    rows.reserve(distinct);
    for (std::size_t e = 0; e < m; ++e) {
        if (counts[e] == 0) continue;
        const double p_e = edges[e].weight * r[e] / total;
        const double w = static_cast<double>(counts[e]) * edges[e].weight /
                         (static_cast<double>(q) * p_e);
        rows.push_back({edges[e].u, edges[e].v, w});
    }
    return {weighted_graph::from_edge_list(rows, g.mode(), g.num_vertices()), rep};
}

sparsify_report block_retention(const weighted_graph& g, const partition& z,
                                const weighted_graph& sparse, sparsify_method method) {
    if (z.size() != g.num_vertices())
        throw domain_error("block_retention: label count does not match vertex count");
    const std::size_t k = z.k;

    std::vector<std::size_t> original(k * k, 0), kept(k * k, 0);
    auto slot = [&](vertex_id u, vertex_id v) {
        const std::uint32_t a = std::min(z.labels[u], z.labels[v]);
        const std::uint32_t b = std::max(z.labels[u], z.labels[v]);
        return a * k + b;
    };
    for (const edge& e : g.edges()) ++original[slot(e.u, e.v)];
    for (const edge& e : sparse.edges()) ++kept[slot(e.u, e.v)];

    const std::vector<std::size_t> sizes = z.block_sizes();
    sparsify_report rep;
    rep.method = method;
    rep.m_original = g.num_edges();
    rep.m_target = sparse.num_edges();
    rep.m_achieved = sparse.num_edges();
    for (std::uint32_t a = 0; a < k; ++a) {
        for (std::uint32_t b = a; b < k; ++b) {
            block_pair_stat st;
            st.a = a;
            st.b = b;
            st.n_pairs = a == b ? sizes[a] * (sizes[a] - 1) / 2 : sizes[a] * sizes[b];
            st.m_original = original[a * k + b];
            st.m_kept = kept[a * k + b];
            st.ratio = st.m_original == 0
                           ? 0.0
                           : static_cast<double>(st.m_kept) / static_cast<double>(st.m_original);
            rep.per_block.push_back(st);
        }
    }
    return rep;
}

}  // namespace mbt
