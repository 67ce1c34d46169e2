// Acceptance gate: twelve end-to-end checks with pinned tolerances, one
// PASS/FAIL line each. Exit status is the number of failed criteria.
//
// The checks run at "desk scale": large enough for the asymptotic behavior
// to show through, small enough to finish in minutes on one core.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "mbt/backbone.hpp"
#include "mbt/cluster.hpp"
#include "mbt/errors.hpp"
#include "mbt/experiments.hpp"
#include "mbt/rng.hpp"
#include "mbt/shortest_paths.hpp"
#include "mbt/sparsify.hpp"
#include "mbt/transforms.hpp"
#include "mbt/wsbm.hpp"
#include "../oracles.hpp"

using namespace mbt;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct gate {
    int failures = 0;

    void report(int id, const char* name, bool pass, const std::string& detail) {
        std::printf("[%s] %02d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }

    template <typename Fn>
    void run(int id, const char* name, Fn&& fn) {
        try {
            auto [pass, detail] = fn();
            report(id, name, pass, detail);
        } catch (const std::exception& e) {
            report(id, name, false, std::string("exception: ") + e.what());
        }
    }
};

std::string fmt(const char* format, ...) {
    va_list args;
    va_start(args, format);
    char buf[512];
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

double mean_of(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

std::vector<double> metric_values(const sweep_record& rec, const std::string& metric) {
    std::vector<double> out;
    for (const sweep_row& r : rec.rows)
        if (r.metric == metric) out.push_back(r.value);
    return out;
}

wsbm_params band_instance() {
    // Two equal blocks, intra affinity 6, inter affinity 2, unit-rate
    // exponential costs, rho = log(n)^2/n at n = 4000. Every row of the
    // model operator sums to 4, so scaled shortest-path costs concentrate
    // near 1/4.
    return planted_partition(4000, 2, 6.0, 2.0, default_rho(4000),
                             cost_distribution::exponential(1.0));
}

experiment_config band_config() {
    experiment_config cfg;
    cfg.experiment = "cost-band";
    cfg.seeds = {1, 2, 3, 4, 5};
    cfg.n = 4000;
    cfg.k = 2;
    cfg.p0 = 6.0;
    cfg.q0 = 2.0;
    cfg.num_pairs = 200;
    return cfg;
}

// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion_backbone_oracle() {
    const auto t0 = clock_type::now();
    rng gen(101);
    int matched = 0;
    const int total = 200;
    for (int trial = 0; trial < total; ++trial) {
        const std::size_t n = 2 + gen.uniform_int(59);
        const double prob = 0.05 + 0.5 * gen.uniform01();
        const weighted_graph g = oracles::random_graph(gen, n, prob);
        const backbone_result bb = metric_backbone(g);
        if (bb.kept == oracles::brute_backbone_kept(g)) ++matched;
    }
    const double secs = seconds_since(t0);
    const bool pass = matched == total && secs < 10.0;
    return {pass, fmt("%d/%d kept sets equal the dense oracle in %.2f s (limit 10 s)",
                      matched, total, secs)};
}

std::pair<bool, std::string> criterion_distance_preservation() {
    rng gen(102);
    int ok = 0;
    const int total = 50;
    for (int trial = 0; trial < total; ++trial) {
        const std::size_t n = 20 + gen.uniform_int(181);  // up to 200
        const weighted_graph g = oracles::random_connected_graph(gen, n, 4.0 / n);
        const backbone_result bb = metric_backbone(g);

        const auto before = oracles::floyd_warshall(g);
        const auto after = oracles::floyd_warshall(bb.backbone);
        bool preserved = true;
        for (std::size_t i = 0; i < n && preserved; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double a = before[i][j], b = after[i][j];
                if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a))) {
                    preserved = false;
                    break;
                }
            }
        const bool connected = connected_components(bb.backbone).size() == 1;
        const backbone_result again = metric_backbone(bb.backbone);
        const bool idempotent =
            std::count(again.kept.begin(), again.kept.end(), 1) ==
            static_cast<std::ptrdiff_t>(bb.backbone.num_edges());
        if (preserved && connected && idempotent) ++ok;
    }
    return {ok == total,
            fmt("%d/%d backbones preserve distances (1e-9 rel), stay connected, idempotent",
                ok, total)};
}

std::pair<bool, std::string> criterion_approx_containment() {
    rng gen(103);
    int ok = 0;
    const int total = 50;
    for (int trial = 0; trial < total; ++trial) {
        const std::size_t n = 10 + gen.uniform_int(80);
        const weighted_graph g = oracles::random_connected_graph(gen, n, 0.1);
        const backbone_result exact = metric_backbone(g);

        bool contained = true;
        for (std::size_t roots : {std::size_t{1}, 1 + gen.uniform_int(n), n}) {
            const backbone_result approx = approximate_backbone(g, roots, 900 + trial);
            for (std::size_t i = 0; i < g.num_edges(); ++i)
                if (approx.kept[i] && !exact.kept[i]) contained = false;
        }
        // Continuous weights are pairwise distinct, so the union of all n
        // shortest-path trees is the whole backbone.
        const backbone_result all = approximate_backbone(g, n, 900 + trial);
        const bool equal = all.kept == exact.kept;
        if (contained && equal) ++ok;
    }
    return {ok == total,
            fmt("%d/%d instances: tree unions contained for all root counts, equal at n roots",
                ok, total)};
}

std::pair<bool, std::string> criterion_cost_band() {
    const double lo = 0.1875, hi = 0.3125;
    const sweep_record rec = run_cost_band_validation(band_config());
    const std::vector<double> means = metric_values(rec, "mean_scaled_cost");
    std::vector<double> times;
    for (const sweep_row& r : rec.rows)
        if (r.metric == "mean_scaled_cost") times.push_back(r.wall_time_ms / 1000.0);
    bool pass = means.size() == 5;
    for (double m : means) pass = pass && m >= lo && m <= hi;
    double max_secs = 0.0;
    for (double s : times) max_secs = std::max(max_secs, s);
    pass = pass && max_secs < 60.0;
    return {pass, fmt("per-seed mean scaled cost in [%.4f, %.4f]: %.4f %.4f %.4f %.4f %.4f; "
                      "slowest seed %.1f s (limit 60 s)",
                      lo, hi, means[0], means[1], means[2], means[3], means[4], max_secs)};
}

sweep_record retention_record() {
    experiment_config cfg = band_config();
    cfg.experiment = "retention";
    static sweep_record cached = run_retention_validation(cfg);  // shared by criteria 5 and 6
    return cached;
}

std::pair<bool, std::string> criterion_retention_ratios() {
    const sweep_record rec = retention_record();
    const double mean_ror = mean_of(metric_values(rec, "ratio_of_ratios"));
    const double mean_pq = mean_of(metric_values(rec, "pmb_over_qmb"));
    const bool pass = std::abs(mean_ror - 1.0) <= 0.20 && std::abs(mean_pq / 3.0 - 1.0) <= 0.20;
    return {pass, fmt("mean intra/inter retention ratio %.4f (target 1 +-20%%), "
                      "mean backbone intra/inter probability ratio %.4f (target 3 +-20%%)",
                      mean_ror, mean_pq)};
}

std::pair<bool, std::string> criterion_absolute_density() {
    const sweep_record rec = retention_record();
    const double mean_density = mean_of(metric_values(rec, "pmb_density_scaled"));
    const bool pass = std::abs(mean_density / 1.5 - 1.0) <= 0.30;
    return {pass, fmt("mean intra backbone density x n/log n = %.4f (target 1.5 +-30%%)",
                      mean_density)};
}

std::pair<bool, std::string> criterion_backbone_clustering() {
    // Clustering runs on similarity weights (p = 1/(1+c) per edge); shortest
    // paths and the backbone itself are computed on the sampled costs.
    const wsbm_params params = planted_partition(2000, 2, 8.0, 1.0, default_rho(2000),
                                                 cost_distribution::exponential(1.0));
    std::vector<double> losses;
    double worst_original = 0.0;
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        auto [z, g] = sample_wsbm(params, seed);
        const backbone_result bb = metric_backbone(g);
        const clustering_result cr = spectral_clustering(
            distance_to_proximity(bb.backbone), 2, derive_seed(seed, 7));
        losses.push_back(clustering_loss(z, cr.labels));

        const clustering_result base =
            spectral_clustering(distance_to_proximity(g), 2, derive_seed(seed, 13));
        worst_original = std::max(worst_original, clustering_loss(z, base.labels));
    }
    bool pass = worst_original <= 0.05;
    for (double l : losses) pass = pass && l <= 0.05;
    return {pass, fmt("clustering loss on the exact backbone per seed: "
                      "%.4f %.4f %.4f %.4f %.4f (ceiling 0.05); "
                      "worst loss on the original graph %.4f (ceiling 0.05)",
                      losses[0], losses[1], losses[2], losses[3], losses[4],
                      worst_original)};
}

std::pair<bool, std::string> criterion_quadrature() {
    const wsbm_params params = band_instance();
    auto [z, g] = sample_wsbm(params, 1);
    const backbone_result bb = metric_backbone(g);
    const sparsify_report rep = empirical_retention(g, z, bb.backbone);
    std::size_t intra_kept = 0, intra_pairs = 0;
    for (const block_pair_stat& st : rep.per_block)
        if (st.a == st.b) {
            intra_kept += st.m_kept;
            intra_pairs += st.n_pairs;
        }
    const double counted = static_cast<double>(intra_kept) / static_cast<double>(intra_pairs);

    // 500 shortest-path costs between same-block vertex pairs.
    rng pair_gen = rng(1).substream(4242);
    std::vector<vertex_id> block0;
    for (vertex_id v = 0; v < params.n; ++v)
        if (z.labels[v] == 0) block0.push_back(v);
    std::vector<double> costs;
    while (costs.size() < 500) {
        const vertex_id u = block0[pair_gen.uniform_int(block0.size())];
        const vertex_id v = block0[pair_gen.uniform_int(block0.size())];
        if (u == v) continue;
        const double c = shortest_path_cost(g, u, v);
        if (c < inf_cost) costs.push_back(c);
    }
    const double p_intra = params.B(0, 0) * params.rho;
    const double estimated =
        backbone_probability_quadrature(costs, p_intra, params.F[0][0]);
    const double rel = std::abs(estimated / counted - 1.0);
    return {rel <= 0.15, fmt("quadrature %.3e vs counted intra retention %.3e, "
                             "relative gap %.1f%% (limit 15%%)",
                             estimated, counted, 100.0 * rel)};
}

std::pair<bool, std::string> criterion_metric_oracles() {
    rng gen(109);
    int loss_ok = 0, ari_ok = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::uint32_t k = 1 + static_cast<std::uint32_t>(gen.uniform_int(8));
        const std::size_t n = k + gen.uniform_int(12);
        const std::uint32_t khat = 1 + static_cast<std::uint32_t>(gen.uniform_int(k));
        const partition z = oracles::random_partition(gen, n, k);
        const partition zhat = oracles::random_partition(gen, n, khat);
        if (std::abs(clustering_loss(z, zhat) - oracles::exhaustive_loss(z, zhat)) < 1e-12)
            ++loss_ok;
    }
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + gen.uniform_int(39);
        const partition z =
            oracles::random_partition(gen, n, 1 + static_cast<std::uint32_t>(gen.uniform_int(5)));
        const partition zhat =
            oracles::random_partition(gen, n, 1 + static_cast<std::uint32_t>(gen.uniform_int(5)));
        if (std::abs(adjusted_rand_index(z, zhat) - oracles::pair_counting_ari(z, zhat)) < 1e-10)
            ++ari_ok;
    }
    std::vector<double> aris;
    for (int draw = 0; draw < 100; ++draw) {
        const partition z = oracles::random_partition(gen, 1000, 4);
        const partition zhat = oracles::random_partition(gen, 1000, 4);
        aris.push_back(adjusted_rand_index(z, zhat));
    }
    const double mean_ari = mean_of(aris);
    const bool pass = loss_ok == 1000 && ari_ok == 1000 && std::abs(mean_ari) <= 0.02;
    return {pass, fmt("loss oracle %d/1000, pair-count oracle %d/1000, "
                      "mean random-label index %.4f (limit |0.02|)",
                      loss_ok, ari_ok, mean_ari)};
}

std::pair<bool, std::string> criterion_budget_parity() {
    rng gen(110);
    bool threshold_exact = true;
    double worst_spectral_rel = 0.0;
    double worst_leverage_rel = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 20 + gen.uniform_int(181);  // up to 200
        weighted_graph cost = oracles::random_connected_graph(gen, n, 0.08);
        std::vector<double> w;
        for (const edge& e : cost.edges()) w.push_back(1.0 / (1.0 + e.weight));
        const weighted_graph g = cost.reweighted(w, weight_mode::proximity);

        const std::size_t target = 1 + gen.uniform_int(g.num_edges());
        if (threshold_sparsify(g, target).second.m_achieved != target) threshold_exact = false;
        const auto spectral = spectral_sparsify(g, target, 500 + trial).second;
        worst_spectral_rel =
            std::max(worst_spectral_rel,
                     std::abs(static_cast<double>(spectral.m_achieved) -
                              static_cast<double>(target)) /
                         static_cast<double>(target));

        const auto method =
            trial % 4 == 0 ? resistance_method::iterative : resistance_method::automatic;
        const auto resistances = effective_resistances(g, method);
        double lev = 0.0;
        for (std::size_t i = 0; i < g.num_edges(); ++i)
            lev += g.edges()[i].weight * resistances[i];
        worst_leverage_rel = std::max(
            worst_leverage_rel, std::abs(lev / static_cast<double>(n - 1) - 1.0));
    }
    const bool pass =
        threshold_exact && worst_spectral_rel <= 0.005 && worst_leverage_rel <= 1e-6;
    return {pass, fmt("threshold budgets exact: %s; spectral budget max rel dev %.2e "
                      "(limit 5e-3); leverage-sum max rel dev %.2e (limit 1e-6)",
                      threshold_exact ? "yes" : "no", worst_spectral_rel, worst_leverage_rel)};
}

std::pair<bool, std::string> criterion_connectivity_contrast() {
    bool all_one = true;
    std::size_t worst_threshold_components = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const wsbm_params params = planted_partition(600, 2, 6.0, 2.0, default_rho(600),
                                                     cost_distribution::exponential(1.0));
        auto [z, g] = sample_wsbm(params, seed);
        const weighted_graph jac = weighted_jaccard(distance_to_proximity(g));
        const weighted_graph dist = proximity_to_distance(jac);
        const backbone_result bb = metric_backbone(dist);
        const std::size_t bb_comps = connected_components(bb.backbone).size();
        if (bb_comps != 1) all_one = false;

        const auto th = threshold_sparsify(jac, bb.backbone.num_edges()).first;
        worst_threshold_components =
            std::max(worst_threshold_components, connected_components(th).size());
    }
    return {all_one, fmt("backbone components = 1 on 10/10 instances (asserted); "
                         "budget-matched threshold graph peaks at %zu components (reported)",
                         worst_threshold_components)};
}

std::pair<bool, std::string> criterion_knn_robustness() {
    experiment_config cfg;
    cfg.experiment = "knn";
    cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    cfg.blob_n = 1500;
    cfg.blob_k = 3;
    cfg.q_grid = {10, 20, 40};
    const sweep_record rec = run_knn_sweep(cfg);
    const std::vector<double> spread_orig = metric_values(rec, "ari_spread_original");
    const std::vector<double> spread_mb = metric_values(rec, "ari_spread_backbone");
    const double med_orig = median_of(spread_orig);
    const double med_mb = median_of(spread_mb);
    const bool pass = spread_orig.size() == 10 && med_mb <= med_orig + 0.05;
    return {pass, fmt("median ARI spread over q in {10,20,40}: backbone %.4f vs "
                      "original %.4f + 0.05 slack",
                      med_mb, med_orig)};
}

}  // namespace

int main() {
    gate g;
    const auto t0 = clock_type::now();
    g.run(1, "backbone-oracle-equivalence", criterion_backbone_oracle);
    g.run(2, "distance-preservation", criterion_distance_preservation);
    g.run(3, "tree-union-containment", criterion_approx_containment);
    g.run(4, "shortest-path-cost-band", criterion_cost_band);
    g.run(5, "retention-ratios", criterion_retention_ratios);
    g.run(6, "absolute-backbone-density", criterion_absolute_density);
    g.run(7, "backbone-clustering-loss", criterion_backbone_clustering);
    g.run(8, "retention-quadrature", criterion_quadrature);
    g.run(9, "metric-oracles", criterion_metric_oracles);
    g.run(10, "sparsifier-budget-parity", criterion_budget_parity);
    g.run(11, "connectivity-contrast", criterion_connectivity_contrast);
    g.run(12, "knn-ari-robustness", criterion_knn_robustness);
    std::printf("acceptance: %d/12 passed in %.1f s\n", 12 - g.failures, seconds_since(t0));
    return g.failures;
}
