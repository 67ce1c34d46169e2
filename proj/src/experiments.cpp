#include "mbt/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "mbt/io.hpp"
#include "mbt/shortest_paths.hpp"

namespace mbt {

namespace {

using json = nlohmann::json;
using clock_type = std::chrono::steady_clock;

double elapsed_ms(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

cost_distribution make_costs(const std::string& kind, double lambda) {
    if (kind == "exp" || kind == "exponential") return cost_distribution::exponential(lambda);
    if (kind == "uniform") return cost_distribution::uniform(lambda);
    throw domain_error("unknown cost kind `" + kind + "` (expected exp or uniform)");
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw domain_error("median of empty set");
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 == 1 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

std::string wsbm_param_string(const experiment_config& cfg, double rho) {
    std::ostringstream ss;
    ss << "n=" << cfg.n << ";k=" << cfg.k << ";p0=" << format_double(cfg.p0)
       << ";q0=" << format_double(cfg.q0) << ";rho=" << format_double(rho)
       << ";costs=" << cfg.cost_kind << ":" << format_double(cfg.cost_lambda);
    return ss.str();
}

}  // namespace

wsbm_params experiment_config::make_wsbm_params() const {
    const double r = rho ? *rho : default_rho(n);
    return planted_partition(n, k, p0, q0, r, make_costs(cost_kind, cost_lambda));
}

experiment_config load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw parse_error("config " + path + ": " + e.what());
    }

    experiment_config cfg;
    cfg.experiment = j.at("experiment").get<std::string>();
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (cfg.seeds.empty()) throw domain_error("config: seeds must be nonempty");

    if (j.contains("wsbm")) {
        const json& w = j["wsbm"];
        if (w.contains("n")) cfg.n = w["n"].get<std::size_t>();
        if (w.contains("k")) cfg.k = w["k"].get<std::size_t>();
        if (w.contains("p0")) cfg.p0 = w["p0"].get<double>();
        if (w.contains("q0")) cfg.q0 = w["q0"].get<double>();
        if (w.contains("rho") && !w["rho"].is_null()) cfg.rho = w["rho"].get<double>();
        if (w.contains("cost_kind")) cfg.cost_kind = w["cost_kind"].get<std::string>();
        if (w.contains("cost_lambda")) cfg.cost_lambda = w["cost_lambda"].get<double>();
    }
    if (j.contains("pairs")) {
        const json& p = j["pairs"];
        if (p.contains("count")) cfg.num_pairs = p["count"].get<std::size_t>();
        if (p.contains("block_a")) cfg.block_a = p["block_a"].get<int>();
        if (p.contains("block_b")) cfg.block_b = p["block_b"].get<int>();
    }
    if (j.contains("sparsifier")) {
        const json& s = j["sparsifier"];
        if (s.contains("edges")) cfg.input_edges = s["edges"].get<std::string>();
        if (s.contains("labels")) cfg.input_labels = s["labels"].get<std::string>();
        if (s.contains("min_component_size"))
            cfg.min_component_size = s["min_component_size"].get<std::size_t>();
        if (s.contains("lambda2_threshold") && !s["lambda2_threshold"].is_null())
            cfg.lambda2_threshold = s["lambda2_threshold"].get<double>();
    }
    if (j.contains("knn")) {
        const json& k = j["knn"];
        if (k.contains("points")) cfg.points_file = k["points"].get<std::string>();
        if (k.contains("label_col") && !k["label_col"].is_null())
            cfg.label_col = k["label_col"].get<int>();
        if (k.contains("q_grid")) cfg.q_grid = k["q_grid"].get<std::vector<std::size_t>>();
        if (k.contains("kernel")) cfg.kernel = k["kernel"].get<std::string>();
        if (k.contains("approx")) cfg.approx_backbone = k["approx"].get<bool>();
        if (k.contains("blob_n")) cfg.blob_n = k["blob_n"].get<std::size_t>();
        if (k.contains("blob_k")) cfg.blob_k = k["blob_k"].get<std::size_t>();
        if (k.contains("blob_dim")) cfg.blob_dim = k["blob_dim"].get<std::size_t>();
        if (k.contains("blob_separation")) cfg.blob_separation = k["blob_separation"].get<double>();
        if (k.contains("blob_spread")) cfg.blob_spread = k["blob_spread"].get<double>();
    }
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        auto opt = [&](const char* name) -> std::optional<double> {
            if (t.contains(name) && !t[name].is_null()) return t[name].get<double>();
            return std::nullopt;
        };
        cfg.band_lo = opt("band_lo");
        cfg.band_hi = opt("band_hi");
        cfg.ratio_tol = opt("ratio_tol");
        cfg.density_tol = opt("density_tol");
        cfg.ari_gap = opt("ari_gap");
        cfg.spread_slack = opt("spread_slack");
    }
    return cfg;
}

void write_config_echo(const std::string& path, const experiment_config& cfg) {
    json j;
    j["experiment"] = cfg.experiment;
    j["seeds"] = cfg.seeds;
    j["wsbm"] = {{"n", cfg.n},
                 {"k", cfg.k},
                 {"p0", cfg.p0},
                 {"q0", cfg.q0},
                 {"rho", cfg.rho ? json(*cfg.rho) : json(nullptr)},
                 {"cost_kind", cfg.cost_kind},
                 {"cost_lambda", cfg.cost_lambda}};
    j["pairs"] = {{"count", cfg.num_pairs}, {"block_a", cfg.block_a}, {"block_b", cfg.block_b}};
    j["sparsifier"] = {{"edges", cfg.input_edges},
                       {"labels", cfg.input_labels},
                       {"min_component_size", cfg.min_component_size},
                       {"lambda2_threshold",
                        cfg.lambda2_threshold ? json(*cfg.lambda2_threshold) : json(nullptr)}};
    j["knn"] = {{"points", cfg.points_file},
                {"label_col", cfg.label_col ? json(*cfg.label_col) : json(nullptr)},
                {"q_grid", cfg.q_grid},
                {"kernel", cfg.kernel},
                {"approx", cfg.approx_backbone},
                {"blob_n", cfg.blob_n},
                {"blob_k", cfg.blob_k},
                {"blob_dim", cfg.blob_dim},
                {"blob_separation", cfg.blob_separation},
                {"blob_spread", cfg.blob_spread}};
    json t;
    auto put = [&](const char* name, const std::optional<double>& v) {
        t[name] = v ? json(*v) : json(nullptr);
    };
    put("band_lo", cfg.band_lo);
    put("band_hi", cfg.band_hi);
    put("ratio_tol", cfg.ratio_tol);
    put("density_tol", cfg.density_tol);
    put("ari_gap", cfg.ari_gap);
    put("spread_slack", cfg.spread_slack);
    j["tolerances"] = t;

    std::ofstream out(path);
    if (!out) throw parse_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

sweep_record run_cost_band_validation(const experiment_config& cfg) {
    const wsbm_params params = cfg.make_wsbm_params();
    const double logn = std::log(static_cast<double>(params.n));
    if (params.n * params.rho / logn <= 1.0)
        throw domain_error("run_cost_band_validation: need n rho / log n > 1");
    const operator_summary summary = compute_operator_summary(params);
    const std::string pstr = wsbm_param_string(cfg, params.rho);
    const double scale = params.n * params.rho / logn;

    sweep_record rec;
    rec.rows.push_back({"cost-band", pstr, cfg.seeds.front(), "band_lo", 1.0 / summary.tau_max, 0.0});
    rec.rows.push_back({"cost-band", pstr, cfg.seeds.front(), "band_hi", 1.0 / summary.tau_min, 0.0});

    for (std::uint64_t seed : cfg.seeds) {
        const auto t0 = clock_type::now();
        auto [z, g] = sample_wsbm(params, seed);
        rng pair_gen = rng(seed).substream(777);

        std::vector<vertex_id> pool_a, pool_b;
        if (cfg.block_a >= 0 && cfg.block_b >= 0) {
            for (vertex_id v = 0; v < params.n; ++v) {
                if (z.labels[v] == static_cast<std::uint32_t>(cfg.block_a)) pool_a.push_back(v);
                if (z.labels[v] == static_cast<std::uint32_t>(cfg.block_b)) pool_b.push_back(v);
            }
            if (pool_a.empty() || pool_b.empty())
                throw domain_error("run_cost_band_validation: requested blocks are empty");
        }

        double sum = 0.0;
        std::size_t got = 0;
        std::size_t attempts = 0;
        while (got < cfg.num_pairs) {
            if (++attempts > 50 * cfg.num_pairs + 100)
                throw disconnected("run_cost_band_validation: too many unreachable pairs");
            vertex_id u, v;
            if (pool_a.empty()) {
                u = static_cast<vertex_id>(pair_gen.uniform_int(params.n));
                v = static_cast<vertex_id>(pair_gen.uniform_int(params.n));
            } else {
                u = pool_a[pair_gen.uniform_int(pool_a.size())];
                v = pool_b[pair_gen.uniform_int(pool_b.size())];
            }
            if (u == v) continue;
            const double c = shortest_path_cost(g, u, v);
            if (c == inf_cost) continue;
            const double scaled = scale * c;
            rec.rows.push_back({"cost-band", pstr, seed, "scaled_cost", scaled, 0.0});
            sum += scaled;
            ++got;
        }
        const double mean = sum / static_cast<double>(cfg.num_pairs);
        rec.rows.push_back({"cost-band", pstr, seed, "mean_scaled_cost", mean, elapsed_ms(t0)});

        if (cfg.band_lo && mean < *cfg.band_lo) {
            rec.tolerances_ok = false;
            rec.violations.push_back("seed " + std::to_string(seed) + ": mean_scaled_cost " +
                                     format_double(mean) + " below " + format_double(*cfg.band_lo));
        }
        if (cfg.band_hi && mean > *cfg.band_hi) {
            rec.tolerances_ok = false;
            rec.violations.push_back("seed " + std::to_string(seed) + ": mean_scaled_cost " +
                                     format_double(mean) + " above " + format_double(*cfg.band_hi));
        }
    }
    return rec;
}

sweep_record run_retention_validation(const experiment_config& cfg) {
    const wsbm_params params = cfg.make_wsbm_params();
    const double logn = std::log(static_cast<double>(params.n));
    const std::string pstr = wsbm_param_string(cfg, params.rho);
    const retention_prediction pred = predicted_retention(params);

    sweep_record rec;
    for (std::size_t a = 0; a < params.k(); ++a) {
        for (std::size_t b = a; b < params.k(); ++b) {
            const std::string suffix = "_" + std::to_string(a) + "_" + std::to_string(b);
            rec.rows.push_back({"retention", pstr, cfg.seeds.front(), "predicted_retention_lo" + suffix,
                                pred.lo(a, b), 0.0});
            rec.rows.push_back({"retention", pstr, cfg.seeds.front(), "predicted_retention_hi" + suffix,
                                pred.hi(a, b), 0.0});
        }
    }

    double sum_ratio_of_ratios = 0.0, sum_pmb_over_qmb = 0.0, sum_density = 0.0;
    for (std::uint64_t seed : cfg.seeds) {
        auto t0 = clock_type::now();
        auto [z, g] = sample_wsbm(params, seed);
        const double sample_ms = elapsed_ms(t0);

        t0 = clock_type::now();
        const backbone_result bb = metric_backbone(g);
        const double backbone_ms = elapsed_ms(t0);
        rec.rows.push_back({"retention", pstr, seed, "m_original",
                            static_cast<double>(g.num_edges()), sample_ms});
        rec.rows.push_back({"retention", pstr, seed, "m_backbone",
                            static_cast<double>(bb.backbone.num_edges()), backbone_ms});

        const sparsify_report rep = empirical_retention(g, z, bb.backbone);
        std::size_t intra_orig = 0, intra_kept = 0, intra_pairs = 0;
        std::size_t inter_orig = 0, inter_kept = 0, inter_pairs = 0;
        for (const block_pair_stat& st : rep.per_block) {
            const std::string suffix = "_" + std::to_string(st.a) + "_" + std::to_string(st.b);
            rec.rows.push_back({"retention", pstr, seed, "retention" + suffix, st.ratio, 0.0});
            if (st.a == st.b) {
                intra_orig += st.m_original;
                intra_kept += st.m_kept;
                intra_pairs += st.n_pairs;
            } else {
                inter_orig += st.m_original;
                inter_kept += st.m_kept;
                inter_pairs += st.n_pairs;
            }
        }

        const double intra_rate = static_cast<double>(intra_kept) / static_cast<double>(intra_orig);
        const double inter_rate = static_cast<double>(inter_kept) / static_cast<double>(inter_orig);
        const double ratio_of_ratios = intra_rate / inter_rate;
        const double pmb = static_cast<double>(intra_kept) / static_cast<double>(intra_pairs);
        const double qmb = static_cast<double>(inter_kept) / static_cast<double>(inter_pairs);
        const double density = pmb * static_cast<double>(params.n) / logn;
        rec.rows.push_back({"retention", pstr, seed, "retention_intra", intra_rate, 0.0});
        rec.rows.push_back({"retention", pstr, seed, "retention_inter", inter_rate, 0.0});
        rec.rows.push_back({"retention", pstr, seed, "ratio_of_ratios", ratio_of_ratios, 0.0});
        rec.rows.push_back({"retention", pstr, seed, "pmb_over_qmb", pmb / qmb, 0.0});
        rec.rows.push_back({"retention", pstr, seed, "pmb_density_scaled", density, 0.0});
        sum_ratio_of_ratios += ratio_of_ratios;
        sum_pmb_over_qmb += pmb / qmb;
        sum_density += density;
    }

    const double nseeds = static_cast<double>(cfg.seeds.size());
    const double mean_ror = sum_ratio_of_ratios / nseeds;
    const double mean_pq = sum_pmb_over_qmb / nseeds;
    const double mean_density = sum_density / nseeds;
    const double target_pq = cfg.p0 / cfg.q0;
    // The cost-rate factor cancels between the retention prediction and the
    // density normalization, so the target depends only on the affinities.
    const double target_density = static_cast<double>(cfg.k) * cfg.p0 /
                                  (cfg.p0 + (static_cast<double>(cfg.k) - 1.0) * cfg.q0);
    if (cfg.ratio_tol) {
        if (std::abs(mean_ror - 1.0) > *cfg.ratio_tol) {
            rec.tolerances_ok = false;
            rec.violations.push_back("mean ratio_of_ratios " + format_double(mean_ror) +
                                     " outside 1 +- " + format_double(*cfg.ratio_tol));
        }
        if (std::abs(mean_pq / target_pq - 1.0) > *cfg.ratio_tol) {
            rec.tolerances_ok = false;
            rec.violations.push_back("mean pmb_over_qmb " + format_double(mean_pq) + " outside " +
                                     format_double(target_pq) + " +- " +
                                     format_double(*cfg.ratio_tol * 100) + "%");
        }
    }
    if (cfg.density_tol && std::abs(mean_density / target_density - 1.0) > *cfg.density_tol) {
        rec.tolerances_ok = false;
        rec.violations.push_back("mean pmb_density_scaled " + format_double(mean_density) +
                                 " outside " + format_double(target_density) + " +- " +
                                 format_double(*cfg.density_tol * 100) + "%");
    }
    return rec;
}

namespace {

struct labeled_proximity_graph {
    weighted_graph graph;  // proximity mode
    partition labels;
};

labeled_proximity_graph sparsifier_input(const experiment_config& cfg, std::uint64_t seed) {
    if (!cfg.input_edges.empty()) {
        loaded_graph lg = load_edge_list(cfg.input_edges, weight_mode::proximity);
        if (cfg.input_labels.empty())
            throw domain_error("run_sparsifier_comparison: labels file required with input edges");
        partition z = load_labels(cfg.input_labels, lg.vertex_names);
        weighted_graph g = lg.graph;
        if (cfg.lambda2_threshold || cfg.min_component_size > 1) {
            filtered_graph fg = cfg.lambda2_threshold
                                    ? filter_weak_components(g, *cfg.lambda2_threshold)
                                    : filter_small_components(g, cfg.min_component_size);
            if (cfg.lambda2_threshold && cfg.min_component_size > 1) {
                filtered_graph fg2 = filter_small_components(fg.graph, cfg.min_component_size);
                for (vertex_id& v : fg2.old_ids) v = fg.old_ids[v];
                fg = std::move(fg2);
            }
            std::vector<std::uint32_t> labels;
            labels.reserve(fg.old_ids.size());
            for (vertex_id v : fg.old_ids) labels.push_back(z.labels[v]);
            z = partition::from_labels(std::move(labels), z.k);
            g = std::move(fg.graph);
        }
        return {std::move(g), std::move(z)};
    }
    auto [z, g] = sample_wsbm(cfg.make_wsbm_params(), seed);
    return {distance_to_proximity(g), std::move(z)};
}

}  // namespace

sweep_record run_sparsifier_comparison(const experiment_config& cfg) {
    sweep_record rec;
    const std::string pstr = cfg.input_edges.empty()
                                 ? wsbm_param_string(cfg, cfg.rho ? *cfg.rho : default_rho(cfg.n))
                                 : "input=" + cfg.input_edges;

    double sum_ari_orig = 0.0, sum_ari_bb = 0.0;
    for (std::uint64_t seed : cfg.seeds) {
        labeled_proximity_graph input = sparsifier_input(cfg, seed);
        const std::size_t k = input.labels.k;

        const weighted_graph jac = weighted_jaccard(input.graph);
        const weighted_graph dist = proximity_to_distance(jac);

        auto t0 = clock_type::now();
        const backbone_result bb = metric_backbone(dist);
        const double backbone_ms = elapsed_ms(t0);
        const std::size_t m_mb = bb.backbone.num_edges();
        const weighted_graph bb_prox = jac.edge_subgraph(bb.kept);

        const weighted_graph th_graph = threshold_sparsify(jac, m_mb).first;
        const weighted_graph sp_graph = spectral_sparsify(jac, m_mb, derive_seed(seed, 11)).first;

        struct method_case {
            const char* name;
            const weighted_graph* graph;
        };
        const method_case cases[] = {{"original", &jac},
                                     {"backbone", &bb_prox},
                                     {"threshold", &th_graph},
                                     {"spectral", &sp_graph}};
        double ari_orig = 0.0, ari_bb = 0.0;
        for (const method_case& mc : cases) {
            t0 = clock_type::now();
            const clustering_result cr =
                spectral_clustering(*mc.graph, k, derive_seed(seed, 23));
            const double cluster_ms = elapsed_ms(t0);
            const double ari = adjusted_rand_index(input.labels, cr.labels);
            const double loss = clustering_loss(input.labels, cr.labels);
            const double comps = static_cast<double>(connected_components(*mc.graph).size());
            const std::string name = mc.name;
            rec.rows.push_back({"sparsifier", pstr, seed, "ari_" + name, ari, cluster_ms});
            rec.rows.push_back({"sparsifier", pstr, seed, "loss_" + name, loss, 0.0});
            rec.rows.push_back({"sparsifier", pstr, seed, "components_" + name, comps, 0.0});
            rec.rows.push_back({"sparsifier", pstr, seed, "m_" + name,
                                static_cast<double>(mc.graph->num_edges()), 0.0});
            if (name == "original") ari_orig = ari;
            if (name == "backbone") ari_bb = ari;
        }
        rec.rows.push_back({"sparsifier", pstr, seed, "backbone_ms", backbone_ms, backbone_ms});
        rec.rows.push_back({"sparsifier", pstr, seed, "retention_ratio",
                            static_cast<double>(m_mb) /
                                static_cast<double>(jac.num_edges()),
                            0.0});
        sum_ari_orig += ari_orig;
        sum_ari_bb += ari_bb;
    }

    if (cfg.ari_gap) {
        const double nseeds = static_cast<double>(cfg.seeds.size());
        const double mean_orig = sum_ari_orig / nseeds;
        const double mean_bb = sum_ari_bb / nseeds;
        if (mean_bb < mean_orig - *cfg.ari_gap) {
            rec.tolerances_ok = false;
            rec.violations.push_back("mean ari_backbone " + format_double(mean_bb) +
                                     " below ari_original " + format_double(mean_orig) + " - " +
                                     format_double(*cfg.ari_gap));
        }
    }
    return rec;
}

point_cloud gaussian_blobs(std::size_t n, std::size_t k, std::size_t dim, double separation,
                           double spread, std::uint64_t seed) {
    if (n < 1 || k < 1 || dim < 1) throw domain_error("gaussian_blobs: bad shape");
    if (k > n) throw domain_error("gaussian_blobs: more blobs than points");

    Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(k, dim);
    for (std::size_t c = 0; c < k; ++c) {
        const double angle = 2.0 * 3.14159265358979323846 * static_cast<double>(c) /
                             static_cast<double>(k);
        centers(c, 0) = separation * std::cos(angle);
        if (dim > 1) centers(c, 1) = separation * std::sin(angle);
    }

    rng gen(seed);
    point_cloud cloud;
    cloud.points.resize(n, dim);
    std::vector<std::uint32_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % k;
        labels[i] = static_cast<std::uint32_t>(c);
        for (std::size_t d = 0; d < dim; ++d)
            cloud.points(i, d) = centers(c, d) + spread * gen.normal();
    }
    cloud.labels = partition::from_labels(std::move(labels), static_cast<std::uint32_t>(k));
    return cloud;
}

sweep_record run_knn_sweep(const experiment_config& cfg) {
    sweep_record rec;
    const similarity_kernel kernel = cfg.kernel == "angular" ? similarity_kernel::angular
                                                             : similarity_kernel::gaussian_local;
    std::optional<point_cloud> file_cloud;
    if (!cfg.points_file.empty()) {
        file_cloud = load_points_csv(cfg.points_file, cfg.label_col);
        if (!file_cloud->labels)
            throw domain_error("run_knn_sweep: points file needs a label column");
    }

    std::vector<double> spreads_orig, spreads_mb;
    for (std::uint64_t seed : cfg.seeds) {
        const point_cloud cloud =
            file_cloud ? *file_cloud
                       : gaussian_blobs(cfg.blob_n, cfg.blob_k, cfg.blob_dim, cfg.blob_separation,
                                        cfg.blob_spread, seed);
        const partition& truth = *cloud.labels;
        const std::size_t k = truth.k;
        const std::size_t n = static_cast<std::size_t>(cloud.points.rows());

        double min_orig = 2.0, max_orig = -2.0, min_mb = 2.0, max_mb = -2.0;
        for (std::size_t q : cfg.q_grid) {
            std::ostringstream ps;
            ps << "n=" << n << ";kernel=" << cfg.kernel << ";q=" << q
               << ";approx=" << (cfg.approx_backbone ? 1 : 0);
            const std::string pstr = ps.str();

            const weighted_graph knn = knn_graph(cloud, q, kernel);
            const weighted_graph dist = proximity_to_distance(knn);
            auto t0 = clock_type::now();
            const backbone_result bb =
                cfg.approx_backbone
                    ? approximate_backbone(dist, default_num_roots(n), derive_seed(seed, 5))
                    : metric_backbone(dist);
            const double backbone_ms = elapsed_ms(t0);
            const weighted_graph bb_prox = knn.edge_subgraph(bb.kept);

            t0 = clock_type::now();
            const clustering_result orig_cr =
                spectral_clustering(knn, k, derive_seed(seed, 29));
            const clustering_result mb_cr =
                spectral_clustering(bb_prox, k, derive_seed(seed, 31));
            const double cluster_ms = elapsed_ms(t0);

            const double ari_orig = adjusted_rand_index(truth, orig_cr.labels);
            const double ari_mb = adjusted_rand_index(truth, mb_cr.labels);
            rec.rows.push_back({"knn", pstr, seed, "ari_original", ari_orig, cluster_ms});
            rec.rows.push_back({"knn", pstr, seed, "ari_backbone", ari_mb, 0.0});
            rec.rows.push_back({"knn", pstr, seed, "m_original",
                                static_cast<double>(knn.num_edges()), 0.0});
            rec.rows.push_back({"knn", pstr, seed, "m_backbone",
                                static_cast<double>(bb.backbone.num_edges()), backbone_ms});
            rec.rows.push_back({"knn", pstr, seed, "retention_ratio",
                                static_cast<double>(bb.backbone.num_edges()) /
                                    static_cast<double>(knn.num_edges()),
                                0.0});
            min_orig = std::min(min_orig, ari_orig);
            max_orig = std::max(max_orig, ari_orig);
            min_mb = std::min(min_mb, ari_mb);
            max_mb = std::max(max_mb, ari_mb);
        }

        std::ostringstream ps;
        ps << "n=" << n << ";kernel=" << cfg.kernel << ";grid";
        rec.rows.push_back({"knn", ps.str(), seed, "ari_spread_original", max_orig - min_orig, 0.0});
        rec.rows.push_back({"knn", ps.str(), seed, "ari_spread_backbone", max_mb - min_mb, 0.0});
        spreads_orig.push_back(max_orig - min_orig);
        spreads_mb.push_back(max_mb - min_mb);
    }

    if (cfg.spread_slack) {
        const double med_orig = median(spreads_orig);
        const double med_mb = median(spreads_mb);
        if (med_mb > med_orig + *cfg.spread_slack) {
            rec.tolerances_ok = false;
            rec.violations.push_back("median ari spread on backbone " + format_double(med_mb) +
                                     " exceeds original " + format_double(med_orig) + " + " +
                                     format_double(*cfg.spread_slack));
        }
    }
    return rec;
}

sweep_record run_experiment(const experiment_config& cfg) {
    if (cfg.experiment == "cost-band") return run_cost_band_validation(cfg);
    if (cfg.experiment == "retention") return run_retention_validation(cfg);
    if (cfg.experiment == "sparsifier") return run_sparsifier_comparison(cfg);
    if (cfg.experiment == "knn") return run_knn_sweep(cfg);
    throw domain_error("unknown experiment `" + cfg.experiment + "`");
}

void write_sweep_csv(const std::string& path, const sweep_record& rec) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot open for writing: " + path);
    out << "experiment,params,seed,metric,value,wall_time_ms\n";
    for (const sweep_row& r : rec.rows) {
        out << r.experiment << ',' << r.params << ',' << r.seed << ',' << r.metric << ','
            << format_double(r.value) << ',' << format_double(r.wall_time_ms) << '\n';
    }
}

void write_summary_csv(const std::string& path, const sweep_record& rec) {
    // Aggregate over seeds per (experiment, params, metric), keeping first-
    // appearance order for reproducible output.
    std::vector<std::string> order;
    std::map<std::string, std::vector<double>> groups;
    for (const sweep_row& r : rec.rows) {
        const std::string key = r.experiment + ',' + r.params + ',' + r.metric;
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(r.value);
    }

    std::ofstream out(path);
    if (!out) throw parse_error("cannot open for writing: " + path);
    out << "experiment,params,metric,mean,stderr,count\n";
    for (const std::string& key : order) {
        const std::vector<double>& xs = groups[key];
        const double n = static_cast<double>(xs.size());
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= n;
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        const double se = xs.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
        out << key << ',' << format_double(mean) << ',' << format_double(se) << ','
            << xs.size() << '\n';
    }
}

filtered_graph filter_weak_components(const weighted_graph& g, double lambda2_threshold) {
    const std::size_t n = g.num_vertices();
    std::vector<std::uint8_t> keep_vertex(n, 0);
    for (const auto& comp : connected_components(g)) {
        if (comp.size() < 2) continue;
        const Eigen::Index s = static_cast<Eigen::Index>(comp.size());
        std::vector<std::uint32_t> local(n, 0);
        for (std::size_t i = 0; i < comp.size(); ++i) local[comp[i]] = static_cast<std::uint32_t>(i);

        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(s, s);
        Eigen::VectorXd deg = Eigen::VectorXd::Zero(s);
        for (vertex_id v : comp) {
            for (const neighbor& nb : g.neighbors(v)) {
                w(local[v], local[nb.to]) = nb.weight;
                deg(local[v]) += nb.weight;
            }
        }
        Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(s, s);
        for (Eigen::Index i = 0; i < s; ++i)
            for (Eigen::Index j = 0; j < s; ++j)
                if (w(i, j) != 0.0) lap(i, j) -= w(i, j) / std::sqrt(deg(i) * deg(j));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
        if (es.eigenvalues()(1) > lambda2_threshold)
            for (vertex_id v : comp) keep_vertex[v] = 1;
    }

    filtered_graph out;
    std::vector<vertex_id> new_id(n, 0);
    for (vertex_id v = 0; v < n; ++v) {
        if (keep_vertex[v]) {
            new_id[v] = static_cast<vertex_id>(out.old_ids.size());
            out.old_ids.push_back(v);
        }
    }
    if (out.old_ids.empty())
        throw empty_result("filter_weak_components: no component passes the threshold");
    std::vector<edge> rows;
    for (const edge& e : g.edges())
        if (keep_vertex[e.u] && keep_vertex[e.v]) rows.push_back({new_id[e.u], new_id[e.v], e.weight});
    out.graph = weighted_graph::from_edge_list(rows, g.mode(), out.old_ids.size());
    return out;
}

}  // namespace mbt
