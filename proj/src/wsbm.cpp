#include "mbt/wsbm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mbt {

cost_distribution::cost_distribution(family kind, double lambda, std::function<double(double)> inv)
    : kind_(kind), lambda_(lambda), inv_(std::move(inv)) {
    if (!(lambda_ > 0.0) || !std::isfinite(lambda_))
        throw domain_error("cost_distribution: lambda must be positive and finite");
}

cost_distribution cost_distribution::exponential(double lambda) {
    return {family::exponential, lambda, {}};
}

cost_distribution cost_distribution::uniform(double lambda) {
    return {family::uniform, lambda, {}};
}

cost_distribution cost_distribution::custom_inverse_cdf(std::function<double(double)> inverse_cdf,
                                                        double lambda) {
    if (!inverse_cdf) throw domain_error("cost_distribution: missing inverse CDF");
    return {family::custom_inverse_cdf, lambda, std::move(inverse_cdf)};
}

double cost_distribution::sample(rng& gen) const {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        double x = 0.0;
        switch (kind_) {
            case family::exponential:
                x = gen.exponential(lambda_);
                break;
            case family::uniform:
                x = gen.uniform01() / lambda_;
                break;
            case family::custom_inverse_cdf:
                x = inv_(gen.uniform01());
                break;
        }
        if (x > 0.0 && std::isfinite(x)) return x;
    }
    throw domain_error("cost_distribution: sampler failed to produce a positive value");
}

double cost_distribution::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    switch (kind_) {
        case family::exponential:
            return -std::expm1(-lambda_ * x);
        case family::uniform:
            return std::min(lambda_ * x, 1.0);
        case family::custom_inverse_cdf: {
            if (inv_(0.0) > x) return 0.0;
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 64; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (inv_(mid) <= x)
                    lo = mid;
                else
                    hi = mid;
            }
            return lo;
        }
    }
    return 0.0;
}

void wsbm_params::validate() const {
    const std::size_t kk = k();
    if (n < 1) throw domain_error("wsbm_params: n must be >= 1");
    if (kk < 1) throw domain_error("wsbm_params: pi must be nonempty");
    double sum = 0.0;
    for (double p : pi) {
        if (!(p > 0.0)) throw domain_error("wsbm_params: pi entries must be positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw domain_error("wsbm_params: pi must sum to 1");
    if (B.rows() != static_cast<Eigen::Index>(kk) || B.cols() != static_cast<Eigen::Index>(kk))
        throw domain_error("wsbm_params: B must be k x k");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw domain_error("wsbm_params: rho must be positive");
    for (std::size_t a = 0; a < kk; ++a) {
        for (std::size_t b = 0; b < kk; ++b) {
            if (!(B(a, b) > 0.0)) throw domain_error("wsbm_params: B entries must be positive");
            if (std::abs(B(a, b) - B(b, a)) > 1e-12 * std::max(1.0, std::abs(B(a, b))))
                throw domain_error("wsbm_params: B must be symmetric");
            if (B(a, b) * rho > 1.0)
                throw probability_overflow("wsbm_params: B(" + std::to_string(a) + "," +
                                           std::to_string(b) + ") * rho = " +
                                           std::to_string(B(a, b) * rho) + " exceeds 1");
        }
    }
    if (F.size() != kk) throw domain_error("wsbm_params: F must be k x k");
    for (std::size_t a = 0; a < kk; ++a) {
        if (F[a].size() != kk) throw domain_error("wsbm_params: F must be k x k");
        for (std::size_t b = 0; b < kk; ++b) {
            if (F[a][b].kind() != F[b][a].kind() || F[a][b].lambda0() != F[b][a].lambda0())
                throw domain_error("wsbm_params: F must be symmetric");
        }
    }
}

wsbm_params planted_partition(std::size_t n, std::size_t k, double p0, double q0, double rho,
                              const cost_distribution& costs) {
    wsbm_params params;
    params.n = n;
    params.pi.assign(k, 1.0 / static_cast<double>(k));
    params.B = Eigen::MatrixXd::Constant(k, k, q0);
    for (std::size_t a = 0; a < k; ++a) params.B(a, a) = p0;
    params.rho = rho;
    params.F.assign(k, std::vector<cost_distribution>(k, costs));
    return params;
}

double default_rho(std::size_t n) {
    if (n < 2) throw domain_error("default_rho: n must be >= 2");
    const double ln = std::log(static_cast<double>(n));
    return ln * ln / static_cast<double>(n);
}

operator_summary compute_operator_summary(const wsbm_params& params) {
    params.validate();
    const Eigen::Index k = static_cast<Eigen::Index>(params.k());

    Eigen::MatrixXd lambda(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b) lambda(a, b) = params.F[a][b].lambda0();

    operator_summary s;
    const Eigen::MatrixXd M = lambda.cwiseProduct(params.B);
    Eigen::VectorXd pi(k);
    for (Eigen::Index a = 0; a < k; ++a) pi(a) = params.pi[a];
    s.T = M * pi.asDiagonal();
    s.tau = s.T.rowwise().sum();
    s.tau_min = s.tau.minCoeff();
    s.tau_max = s.tau.maxCoeff();

    // T = M diag(pi) is similar to the symmetric diag(sqrt(pi)) M diag(sqrt(pi)),
    // so its spectrum is real and a self-adjoint solver applies.
    const Eigen::VectorXd sqrt_pi = pi.cwiseSqrt();
    const Eigen::MatrixXd sym = sqrt_pi.asDiagonal() * M * sqrt_pi.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    s.mu = es.eigenvalues().cwiseAbs().minCoeff();
    return s;
}

retention_prediction predicted_retention(const wsbm_params& params) {
    const operator_summary s = compute_operator_summary(params);
    const Eigen::Index k = static_cast<Eigen::Index>(params.k());
    const double scale =
        std::log(static_cast<double>(params.n)) / (static_cast<double>(params.n) * params.rho);

    retention_prediction pred;
    pred.lo.resize(k, k);
    pred.hi.resize(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) {
            const double l = params.F[a][b].lambda0();
            pred.lo(a, b) = l / s.tau_max * scale;
            pred.hi(a, b) = l / s.tau_min * scale;
        }
    }
    return pred;
}

namespace {

/// Geometric skip: failures before the next success at probability p.
std::size_t geometric_skip(rng& gen, double p) {
    const double u = 1.0 - gen.uniform01();  // in (0, 1]
    const double s = std::floor(std::log(u) / std::log1p(-p));
    if (s > 1e18) return static_cast<std::size_t>(1) << 62;
    return static_cast<std::size_t>(s);
}

/// Ordered pairs (i, j), i < j, over a block of size s; advances in O(1)
/// amortized per row transition.
struct triangular_cursor {
    std::size_t s, i, j;
    explicit triangular_cursor(std::size_t size) : s(size), i(0), j(1) {}
    bool valid() const { return s >= 2 && i < s - 1; }
    void advance(std::size_t d) {
        while (d > 0 && valid()) {
            const std::size_t row_left = s - j;
            if (d < row_left) {
                j += d;
                return;
            }
            d -= row_left;
            ++i;
            j = i + 1;
        }
    }
};

struct cross_cursor {
    std::size_t sa, sb, i, j;
    cross_cursor(std::size_t a, std::size_t b) : sa(a), sb(b), i(0), j(0) {}
    bool valid() const { return sb > 0 && i < sa; }
    void advance(std::size_t d) {
        if (!valid()) return;
        j += d;
        i += j / sb;
        j %= sb;
    }
};

}  // namespace

std::pair<partition, weighted_graph> sample_wsbm(const wsbm_params& params, std::uint64_t seed) {
    params.validate();
    const std::size_t n = params.n;
    const std::size_t k = params.k();
    const rng base(seed);

    rng label_stream = base.substream(0);
    std::vector<std::uint32_t> labels(n);
    std::vector<std::vector<vertex_id>> blocks(k);
    for (std::size_t v = 0; v < n; ++v) {
        labels[v] = static_cast<std::uint32_t>(label_stream.discrete(params.pi));
        blocks[labels[v]].push_back(static_cast<vertex_id>(v));
    }

    std::vector<edge> rows;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            const double p = params.B(a, b) * params.rho;
            rng stream = base.substream(1 + a * k + b);
            const cost_distribution& costs = params.F[a][b];
            if (a == b) {
                triangular_cursor cur(blocks[a].size());
                if (p >= 1.0) {
                    while (cur.valid()) {
                        rows.push_back({blocks[a][cur.i], blocks[a][cur.j], costs.sample(stream)});
                        cur.advance(1);
                    }
                } else {
                    cur.advance(geometric_skip(stream, p));
                    while (cur.valid()) {
                        rows.push_back({blocks[a][cur.i], blocks[a][cur.j], costs.sample(stream)});
                        cur.advance(1 + geometric_skip(stream, p));
                    }
                }
            } else {
                cross_cursor cur(blocks[a].size(), blocks[b].size());
                if (p >= 1.0) {
                    while (cur.valid()) {
                        rows.push_back({blocks[a][cur.i], blocks[b][cur.j], costs.sample(stream)});
                        cur.advance(1);
                    }
                } else {
                    cur.advance(geometric_skip(stream, p));
                    while (cur.valid()) {
                        rows.push_back({blocks[a][cur.i], blocks[b][cur.j], costs.sample(stream)});
                        cur.advance(1 + geometric_skip(stream, p));
                    }
                }
            }
        }
    }

    partition z = partition::from_labels(std::move(labels), static_cast<std::uint32_t>(k));
    weighted_graph g = weighted_graph::from_edge_list(rows, weight_mode::cost, n);
    return {std::move(z), std::move(g)};
}

double backbone_probability_quadrature(const std::vector<double>& cost_samples, double p_ab,
                                       const cost_distribution& F_ab) {
    if (!(p_ab > 0.0) || !(p_ab < 1.0))
        throw domain_error("backbone_probability_quadrature: p_ab must lie in (0, 1)");
    if (cost_samples.empty())
        throw domain_error("backbone_probability_quadrature: need at least one cost sample");
    double acc = 0.0;
    for (double c : cost_samples) {
        const double q = p_ab * F_ab.cdf(c);
        if (q >= 1.0)
            throw domain_error("backbone_probability_quadrature: p_ab * F(c) reached 1");
        acc += -std::log1p(-q);
    }
    return acc / static_cast<double>(cost_samples.size());
}

sparsify_report empirical_retention(const weighted_graph& g, const partition& z,
                                    const weighted_graph& backbone) {
    const std::vector<edge>& full = g.edges();
    const std::vector<edge>& kept = backbone.edges();
    std::size_t i = 0;
    for (const edge& e : kept) {
        while (i < full.size() && (full[i].u < e.u || (full[i].u == e.u && full[i].v < e.v))) ++i;
        if (i == full.size() || full[i].u != e.u || full[i].v != e.v || full[i].weight != e.weight)
            throw domain_error("empirical_retention: backbone edge set is not a subset of g");
    }
    return block_retention(g, z, backbone, sparsify_method::backbone);
}

}  // namespace mbt
