#include "mbt/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mbt/rng.hpp"

namespace mbt {

namespace {

Eigen::VectorXd adjacency_apply(const weighted_graph& g, const Eigen::VectorXd& x) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
    for (const edge& e : g.edges()) {
        y(e.u) += e.weight * x(e.v);
        y(e.v) += e.weight * x(e.u);
    }
    return y;
}

double adjacency_inf_norm(const weighted_graph& g) {
    std::vector<double> row(g.num_vertices(), 0.0);
    for (const edge& e : g.edges()) {
        row[e.u] += std::abs(e.weight);
        row[e.v] += std::abs(e.weight);
    }
    double m = 0.0;
    for (double r : row) m = std::max(m, r);
    return m;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index arg = 0;
    double best = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > best) {
            best = std::abs(v(i));
            arg = i;
        }
    }
    if (v(arg) < 0.0) v = -v;
}

void sort_pairs_by_magnitude(Eigen::MatrixXd& u, Eigen::VectorXd& sigma) {
    std::vector<Eigen::Index> order(sigma.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double ma = std::abs(sigma(a)), mb = std::abs(sigma(b));
        return ma != mb ? ma > mb : sigma(a) > sigma(b);
    });
    Eigen::MatrixXd u2(u.rows(), u.cols());
    Eigen::VectorXd s2(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        u2.col(i) = u.col(order[i]);
        s2(i) = sigma(order[i]);
    }
    u = std::move(u2);
    sigma = std::move(s2);
}

spectral_embedding dense_embedding(const weighted_graph& g, std::size_t k) {
    const Eigen::Index n = static_cast<Eigen::Index>(g.num_vertices());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (const edge& e : g.edges()) {
        w(e.u, e.v) = e.weight;
        w(e.v, e.u) = e.weight;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
    Eigen::MatrixXd u = es.eigenvectors();
    Eigen::VectorXd sigma = es.eigenvalues();
    sort_pairs_by_magnitude(u, sigma);

    spectral_embedding out;
    out.U = u.leftCols(k);
    out.sigma = sigma.head(k);
    for (Eigen::Index c = 0; c < out.U.cols(); ++c) fix_sign(out.U.col(c));
    return out;
}

/// One deflated Lanczos run: returns the extreme eigenpair of W restricted to
/// the orthogonal complement of `locked`, or false when it cannot be resolved.
bool lanczos_extreme_pair(const weighted_graph& g, const Eigen::MatrixXd& locked,
                          std::size_t locked_count, double tol, rng& gen, Eigen::VectorXd& vec_out,
                          double& val_out) {
    const Eigen::Index n = static_cast<Eigen::Index>(g.num_vertices());
    const Eigen::Index dim = n - static_cast<Eigen::Index>(locked_count);
    const Eigen::Index j_max = std::min<Eigen::Index>(dim, 300);

    auto project_out = [&](Eigen::VectorXd& x, const Eigen::MatrixXd& basis, Eigen::Index cols) {
        if (cols > 0) x -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * x);
    };

    Eigen::MatrixXd v(n, j_max);
    Eigen::VectorXd alpha(j_max), beta(j_max);

    Eigen::VectorXd start(n);
    for (Eigen::Index i = 0; i < n; ++i) start(i) = gen.normal();
    project_out(start, locked, static_cast<Eigen::Index>(locked_count));
    project_out(start, locked, static_cast<Eigen::Index>(locked_count));
    if (start.norm() < 1e-12) return false;
    v.col(0) = start / start.norm();

    Eigen::Index j = 0;
    bool exhausted = false;
    while (true) {
        Eigen::VectorXd w = adjacency_apply(g, v.col(j));
        alpha(j) = v.col(j).dot(w);
        w -= alpha(j) * v.col(j);
        if (j > 0) w -= beta(j - 1) * v.col(j - 1);
        project_out(w, locked, static_cast<Eigen::Index>(locked_count));
        project_out(w, v, j + 1);
        project_out(w, v, j + 1);
        beta(j) = w.norm();

        const bool at_cap = j + 1 >= j_max;
        if (beta(j) <= tol * 1e-3 || at_cap) {
            exhausted = beta(j) <= tol * 1e-3;
            ++j;
            break;
        }
        v.col(j + 1) = w / beta(j);
        ++j;

        // Check extreme Ritz convergence every few steps.
        if (j % 8 != 0) continue;
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(j, j);
        for (Eigen::Index i = 0; i < j; ++i) {
            t(i, i) = alpha(i);
            if (i + 1 < j) t(i, i + 1) = t(i + 1, i) = beta(i);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        Eigen::Index arg = 0;
        es.eigenvalues().cwiseAbs().maxCoeff(&arg);
        const double resid = std::abs(beta(j - 1) * es.eigenvectors()(j - 1, arg));
        if (resid <= 0.5 * tol) break;
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(j, j);
    for (Eigen::Index i = 0; i < j; ++i) {
        t(i, i) = alpha(i);
        if (i + 1 < j) t(i, i + 1) = t(i + 1, i) = beta(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    Eigen::Index arg = 0;
    es.eigenvalues().cwiseAbs().maxCoeff(&arg);

    Eigen::VectorXd u = v.leftCols(j) * es.eigenvectors().col(arg);
    project_out(u, locked, static_cast<Eigen::Index>(locked_count));
    const double norm = u.norm();
    if (norm < 1e-12) return false;
    u /= norm;
    const double theta = u.dot(adjacency_apply(g, u));
    const double resid = (adjacency_apply(g, u) - theta * u).norm();
    if (resid > tol && !exhausted) return false;

    vec_out = u;
    val_out = theta;
    return true;
}

spectral_embedding lanczos_embedding(const weighted_graph& g, std::size_t k, std::uint64_t seed) {
    const Eigen::Index n = static_cast<Eigen::Index>(g.num_vertices());
    const double tol = std::max(1e-6 * adjacency_inf_norm(g), 1e-12);

    Eigen::MatrixXd locked(n, k);
    Eigen::VectorXd values(k);
    rng gen(seed);
    std::size_t found = 0;
    int attempts = 0;
    while (found < k) {
        if (++attempts > static_cast<int>(8 * k + 24))
            throw convergence_failure("spectral_embedding: eigenpair " + std::to_string(found) +
                                      " did not converge");
        Eigen::VectorXd u;
        double theta = 0.0;
        if (!lanczos_extreme_pair(g, locked, found, tol, gen, u, theta)) continue;
        locked.col(found) = u;
        values(found) = theta;
        ++found;
    }

    Eigen::MatrixXd u = locked;
    Eigen::VectorXd sigma = values;
    sort_pairs_by_magnitude(u, sigma);
    spectral_embedding out;
    out.U = std::move(u);
    out.sigma = std::move(sigma);
    for (Eigen::Index c = 0; c < out.U.cols(); ++c) fix_sign(out.U.col(c));
    return out;
}

}  // namespace

spectral_embedding compute_spectral_embedding(const weighted_graph& g, std::size_t k,
                                              std::uint64_t seed) {
    const std::size_t n = g.num_vertices();
    if (n == 0) throw domain_error("spectral_embedding: graph must be nonempty");
    if (k < 1 || k > n)
        throw domain_error("spectral_embedding: k must lie in [1, n]");

    if (g.num_edges() == 0) {
        spectral_embedding out;
        out.U = Eigen::MatrixXd::Identity(n, k);
        out.sigma = Eigen::VectorXd::Zero(k);
        return out;
    }
    if (n <= 128 || 2 * k >= n) return dense_embedding(g, k);
    return lanczos_embedding(g, k, seed);
}

namespace {

double lloyd_run(const Eigen::MatrixXd& rows, std::size_t k, rng& gen,
                 std::vector<std::uint32_t>& labels) {
    const Eigen::Index n = rows.rows();
    const Eigen::Index kk = static_cast<Eigen::Index>(k);

    // k-means++ seeding.
    Eigen::MatrixXd centers(kk, rows.cols());
    centers.row(0) = rows.row(static_cast<Eigen::Index>(gen.uniform_int(n)));
    Eigen::VectorXd d2 = (rows.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (Eigen::Index c = 1; c < kk; ++c) {
        const double total = d2.sum();
        Eigen::Index pick;
        if (total > 0.0) {
            const double target = gen.uniform01() * total;
            double acc = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += d2(i);
                if (target < acc) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(gen.uniform_int(n));
        }
        centers.row(c) = rows.row(pick);
        d2 = d2.cwiseMin((rows.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    labels.assign(n, 0);
    std::vector<Eigen::Index> count(k, 0);
    double prev = -1.0;
    double inertia = 0.0;
    for (int iter = 0; iter < 300; ++iter) {
        inertia = 0.0;
        for (Eigen::Index c = 0; c < kk; ++c) count[c] = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            double best_d = (rows.row(i) - centers.row(0)).squaredNorm();
            for (Eigen::Index c = 1; c < kk; ++c) {
                const double d = (rows.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            labels[i] = static_cast<std::uint32_t>(best);
            ++count[best];
            inertia += best_d;
        }

        for (Eigen::Index c = 0; c < kk; ++c) {
            if (count[c] > 0) continue;
            // Re-seed an empty cluster at the point farthest from its centroid.
            Eigen::Index far = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = (rows.row(i) - centers.row(labels[i])).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            centers.row(c) = rows.row(far);
            --count[labels[far]];
            labels[far] = static_cast<std::uint32_t>(c);
            count[c] = 1;
        }

        centers.setZero();
        for (Eigen::Index i = 0; i < n; ++i) centers.row(labels[i]) += rows.row(i);
        for (Eigen::Index c = 0; c < kk; ++c)
            if (count[c] > 0) centers.row(c) /= static_cast<double>(count[c]);

        if (prev >= 0.0 && std::abs(prev - inertia) <= 1e-7 * std::max(prev, 1e-300)) break;
        prev = inertia;
    }

    // Final assignment pass so labels and inertia match the last centers.
    inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best = 0;
        double best_d = (rows.row(i) - centers.row(0)).squaredNorm();
        for (Eigen::Index c = 1; c < kk; ++c) {
            const double d = (rows.row(i) - centers.row(c)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        labels[i] = static_cast<std::uint32_t>(best);
        inertia += best_d;
    }
    return inertia;
}

}  // namespace

clustering_result kmeans(const Eigen::MatrixXd& rows, std::size_t k, int restarts,
                         std::uint64_t seed) {
    const std::size_t n = static_cast<std::size_t>(rows.rows());
    if (k < 1) throw domain_error("kmeans: k must be >= 1");
    if (k > n) throw domain_error("kmeans: k exceeds the number of points");
    if (restarts < 1) throw domain_error("kmeans: restarts must be >= 1");

    const rng base(seed);
    clustering_result best;
    best.inertia = -1.0;
    for (int r = 0; r < restarts; ++r) {
        rng gen = base.substream(static_cast<std::uint64_t>(r));
        std::vector<std::uint32_t> labels;
        const double inertia = lloyd_run(rows, k, gen, labels);
        if (best.inertia < 0.0 || inertia < best.inertia) {
            best.inertia = inertia;
            best.labels = partition::from_labels(std::move(labels), static_cast<std::uint32_t>(k));
        }
    }
    best.restarts_used = restarts;
    return best;
}

clustering_result spectral_clustering(const weighted_graph& g, std::size_t k, std::uint64_t seed,
                                      int restarts) {
    const rng base(seed);
    const spectral_embedding emb =
        compute_spectral_embedding(g, k, base.substream(1).seed());
    clustering_result res = kmeans(emb.U, k, restarts, base.substream(2).seed());
    res.eigenvalues.assign(emb.sigma.data(), emb.sigma.data() + emb.sigma.size());
    return res;
}

namespace {

/// Exact max-agreement assignment on a square nonnegative matrix (Jonker-
/// style Hungarian with potentials, O(k^3)), returning the best total.
std::int64_t max_assignment(const std::vector<std::vector<std::int64_t>>& a) {
    const std::size_t k = a.size();
    std::int64_t big = 0;
    for (const auto& row : a)
        for (std::int64_t x : row) big = std::max(big, x);

    const std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(k + 1, 0), v(k + 1, 0);
    std::vector<std::size_t> match(k + 1, 0), way(k + 1, 0);
    for (std::size_t i = 1; i <= k; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<std::int64_t> minv(k + 1, inf);
        std::vector<std::uint8_t> used(k + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            std::int64_t delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= k; ++j) {
                if (used[j]) continue;
                const std::int64_t cur = (big - a[i0 - 1][j - 1]) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= k; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    std::int64_t total = 0;
    for (std::size_t j = 1; j <= k; ++j)
        if (match[j] != 0) total += a[match[j] - 1][j - 1];
    return total;
}

double comb2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

double clustering_loss(const partition& z, const partition& zhat) {
    if (z.size() != zhat.size()) throw domain_error("clustering_loss: partitions differ in size");
    if (z.size() == 0) throw domain_error("clustering_loss: empty partitions");
    if (zhat.k > z.k)
        throw label_count_mismatch("clustering_loss: prediction uses " + std::to_string(zhat.k) +
                                   " labels but ground truth has " + std::to_string(z.k));
    const std::size_t k = z.k;
    std::vector<std::vector<std::int64_t>> confusion(k, std::vector<std::int64_t>(k, 0));
    for (std::size_t i = 0; i < z.size(); ++i) ++confusion[z.labels[i]][zhat.labels[i]];

    const std::int64_t agree = max_assignment(confusion);
    return 1.0 - static_cast<double>(agree) / static_cast<double>(z.size());
}

double adjusted_rand_index(const partition& z, const partition& zhat) {
    if (z.size() != zhat.size())
        throw domain_error("adjusted_rand_index: partitions differ in size");
    const std::size_t n = z.size();
    if (n <= 1) return 1.0;

    std::vector<double> row(z.k, 0.0), col(zhat.k, 0.0);
    std::vector<std::vector<double>> cont(z.k, std::vector<double>(zhat.k, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        cont[z.labels[i]][zhat.labels[i]] += 1.0;
        row[z.labels[i]] += 1.0;
        col[zhat.labels[i]] += 1.0;
    }

    double index = 0.0, row_sum = 0.0, col_sum = 0.0;
    for (std::size_t a = 0; a < z.k; ++a)
        for (std::size_t b = 0; b < zhat.k; ++b) index += comb2(cont[a][b]);
    for (double r : row) row_sum += comb2(r);
    for (double c : col) col_sum += comb2(c);

    const double expected = row_sum * col_sum / comb2(static_cast<double>(n));
    const double max_index = 0.5 * (row_sum + col_sum);
    const double denom = max_index - expected;
    if (std::abs(denom) < 1e-12) return 1.0;
    return (index - expected) / denom;
}

}  // namespace mbt
