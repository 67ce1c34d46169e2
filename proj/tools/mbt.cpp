// mbt: metric-backbone toolkit CLI.
//
// Subcommands: backbone, wsbm sample, knn, sparsify, cluster, experiment run.
// All file formats are plain text: whitespace-separated edge lists, `vertex
// label` files, CSV point clouds, and JSON reports/configs.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mbt/backbone.hpp"
#include "mbt/cluster.hpp"
#include "mbt/errors.hpp"
#include "mbt/experiments.hpp"
#include "mbt/io.hpp"
#include "mbt/sparsify.hpp"
#include "mbt/transforms.hpp"
#include "mbt/wsbm.hpp"

namespace {

using json = nlohmann::json;
using clock_type = std::chrono::steady_clock;

double elapsed_ms(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw mbt::parse_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

// Parses `kind:lambda`, e.g. `exp:1` or `uniform:2.5`.
mbt::cost_distribution parse_cost_token(const std::string& token) {
    const auto colon = token.find(':');
    if (colon == std::string::npos)
        throw mbt::domain_error("cost descriptor `" + token + "` must look like exp:1.0");
    const std::string kind = token.substr(0, colon);
    const double lambda = std::stod(token.substr(colon + 1));
    if (kind == "exp" || kind == "exponential") return mbt::cost_distribution::exponential(lambda);
    if (kind == "uniform") return mbt::cost_distribution::uniform(lambda);
    throw mbt::domain_error("unknown cost family `" + kind + "` (expected exp or uniform)");
}

// One token shared by all block pairs, or k(k+1)/2 comma-separated tokens
// filling the upper triangle row by row.
std::vector<std::vector<mbt::cost_distribution>> parse_costs(const std::string& descriptor,
                                                             std::size_t k) {
    std::vector<std::string> tokens;
    std::stringstream ss(descriptor);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) tokens.push_back(tok);
    if (tokens.empty()) throw mbt::domain_error("empty cost descriptor");

    std::vector<std::vector<mbt::cost_distribution>> F;
    if (tokens.size() == 1) {
        const mbt::cost_distribution shared = parse_cost_token(tokens[0]);
        F.assign(k, std::vector<mbt::cost_distribution>(k, shared));
        return F;
    }
    if (tokens.size() != k * (k + 1) / 2)
        throw mbt::domain_error("cost descriptor needs 1 or k(k+1)/2 entries");
    std::vector<mbt::cost_distribution> flat;
    flat.reserve(tokens.size());
    for (const std::string& t : tokens) flat.push_back(parse_cost_token(t));
    std::size_t idx = 0;
    F.assign(k, std::vector<mbt::cost_distribution>(k, flat[0]));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b) {
            F[a][b] = flat[idx];
            F[b][a] = flat[idx];
            ++idx;
        }
    return F;
}

struct backbone_args {
    std::string input, output, report;
    std::size_t approx_roots = 0;  // 0 = exact backbone
    std::uint64_t seed = 1;
};

int run_backbone(const backbone_args& a) {
    const mbt::loaded_graph lg = mbt::load_edge_list(a.input, mbt::weight_mode::cost);
    const auto t0 = clock_type::now();
    const mbt::backbone_result bb =
        a.approx_roots == 0 ? mbt::metric_backbone(lg.graph)
                            : mbt::approximate_backbone(lg.graph, a.approx_roots, a.seed);
    const double ms = elapsed_ms(t0);

    if (!a.output.empty()) mbt::save_edge_list(a.output, bb.backbone, lg.vertex_names);
    if (!a.report.empty()) {
        const std::size_t m0 = lg.graph.num_edges();
        json j;
        j["n"] = lg.graph.num_vertices();
        j["m_original"] = m0;
        j["m_backbone"] = bb.backbone.num_edges();
        j["retention_ratio"] =
            m0 == 0 ? 0.0 : static_cast<double>(bb.backbone.num_edges()) / static_cast<double>(m0);
        j["wall_time_ms"] = ms;
        write_json_file(a.report, j);
    }
    std::cout << "backbone: kept " << bb.backbone.num_edges() << " of " << lg.graph.num_edges()
              << " edges\n";
    return 0;
}

struct wsbm_args {
    std::string config;
    std::size_t n = 0;
    std::vector<double> pi;
    std::vector<double> B;  // row-major k x k
    double rho_exponent = 0.0;
    bool has_rho_exponent = false;
    std::string costs = "exp:1";
    std::uint64_t seed = 1;
    std::string out_edges, out_labels;
};

int run_wsbm_sample(const wsbm_args& a, bool cli_n, bool cli_pi, bool cli_B, bool cli_costs,
                    bool cli_seed) {
    std::size_t n = a.n;
    std::vector<double> pi = a.pi;
    std::vector<double> Bflat = a.B;
    std::optional<double> rho;
    std::string costs = a.costs;
    std::uint64_t seed = a.seed;

    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) throw mbt::parse_error("cannot open config: " + a.config);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw mbt::parse_error("config " + a.config + ": " + e.what());
        }
        if (!cli_n && j.contains("n")) n = j["n"].get<std::size_t>();
        if (!cli_pi && j.contains("pi")) pi = j["pi"].get<std::vector<double>>();
        if (!cli_B && j.contains("B")) {
            Bflat.clear();
            for (const json& row : j["B"])
                if (row.is_array())
                    for (const json& x : row) Bflat.push_back(x.get<double>());
                else
                    Bflat.push_back(row.get<double>());
        }
        if (j.contains("rho") && !j["rho"].is_null()) rho = j["rho"].get<double>();
        if (j.contains("rho_exponent") && !j["rho_exponent"].is_null())
            rho = std::pow(static_cast<double>(n), -j["rho_exponent"].get<double>());
        if (!cli_costs && j.contains("costs")) costs = j["costs"].get<std::string>();
        if (!cli_seed && j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
    }
    if (a.has_rho_exponent) rho = std::pow(static_cast<double>(n), -a.rho_exponent);

    if (n == 0) throw mbt::domain_error("wsbm sample: --n is required");
    if (pi.empty()) throw mbt::domain_error("wsbm sample: --pi is required");
    const std::size_t k = pi.size();
    if (Bflat.size() != k * k)
        throw mbt::domain_error("wsbm sample: --B needs k*k row-major entries");

    mbt::wsbm_params params;
    params.n = n;
    params.pi = pi;
    params.B.resize(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j2 = 0; j2 < k; ++j2)
            params.B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j2)) =
                Bflat[i * k + j2];
    params.rho = rho ? *rho : mbt::default_rho(n);
    params.F = parse_costs(costs, k);
    params.validate();

    auto [z, g] = mbt::sample_wsbm(params, seed);
    if (!a.out_edges.empty()) mbt::save_edge_list(a.out_edges, g);
    if (!a.out_labels.empty()) mbt::save_labels(a.out_labels, z);
    std::cout << "wsbm: n=" << n << " k=" << k << " rho=" << mbt::format_double(params.rho)
              << " edges=" << g.num_edges() << '\n';
    return 0;
}

struct knn_args {
    std::string input, out;
    std::size_t q = 10;
    std::string kernel = "gaussian";
    int label_col = -1;
};

int run_knn(const knn_args& a) {
    std::optional<int> label_col;
    if (a.label_col >= 0) label_col = a.label_col;
    const mbt::point_cloud cloud = mbt::load_points_csv(a.input, label_col);
    const mbt::similarity_kernel kernel = a.kernel == "angular"
                                              ? mbt::similarity_kernel::angular
                                              : mbt::similarity_kernel::gaussian_local;
    const mbt::weighted_graph g = mbt::knn_graph(cloud, a.q, kernel);
    mbt::save_edge_list(a.out, g);
    std::cout << "knn: " << cloud.points.rows() << " points, q=" << a.q << ", " << g.num_edges()
              << " edges\n";
    return 0;
}

struct sparsify_args {
    std::string input, out, report;
    std::string method = "threshold";
    std::size_t m_target = 0;
    bool match_backbone = false;
    std::uint64_t seed = 1;
};

int run_sparsify(const sparsify_args& a) {
    const mbt::loaded_graph lg = mbt::load_edge_list(a.input, mbt::weight_mode::proximity);
    const auto t0 = clock_type::now();

    std::size_t m_target = a.m_target;
    if (a.match_backbone) {
        const mbt::weighted_graph dist = mbt::proximity_to_distance(lg.graph);
        m_target = mbt::metric_backbone(dist).backbone.num_edges();
    }

    std::pair<mbt::weighted_graph, mbt::sparsify_report> result =
        a.method == "spectral" ? mbt::spectral_sparsify(lg.graph, m_target, a.seed)
                               : mbt::threshold_sparsify(lg.graph, m_target);
    const double ms = elapsed_ms(t0);

    if (!a.out.empty()) mbt::save_edge_list(a.out, result.first, lg.vertex_names);
    if (!a.report.empty()) {
        json j;
        j["n"] = lg.graph.num_vertices();
        j["method"] = a.method;
        j["m_original"] = result.second.m_original;
        j["m_target"] = result.second.m_target;
        j["m_achieved"] = result.second.m_achieved;
        j["retention_ratio"] = result.second.m_original == 0
                                   ? 0.0
                                   : static_cast<double>(result.second.m_achieved) /
                                         static_cast<double>(result.second.m_original);
        j["wall_time_ms"] = ms;
        write_json_file(a.report, j);
    }
    std::cout << "sparsify(" << a.method << "): kept " << result.second.m_achieved << " of "
              << result.second.m_original << " edges\n";
    return 0;
}

struct cluster_args {
    std::string input, labels, out, report;
    std::size_t k = 2;
    std::uint64_t seed = mbt::default_cluster_seed;
    int restarts = 10;
};

int run_cluster(const cluster_args& a) {
    const mbt::loaded_graph lg = mbt::load_edge_list(a.input, mbt::weight_mode::proximity);
    const mbt::clustering_result cr =
        mbt::spectral_clustering(lg.graph, a.k, a.seed, a.restarts);

    std::optional<double> loss, ari;
    if (!a.labels.empty()) {
        const mbt::partition truth = mbt::load_labels(a.labels, lg.vertex_names);
        loss = mbt::clustering_loss(truth, cr.labels);
        ari = mbt::adjusted_rand_index(truth, cr.labels);
    }

    if (!a.out.empty()) mbt::save_labels(a.out, cr.labels, lg.vertex_names);
    if (!a.report.empty()) {
        json j;
        j["loss"] = loss ? json(*loss) : json(nullptr);
        j["ari"] = ari ? json(*ari) : json(nullptr);
        j["eigenvalues"] = cr.eigenvalues;
        j["inertia"] = cr.inertia;
        write_json_file(a.report, j);
    }
    std::cout << "cluster: k=" << a.k << " inertia=" << mbt::format_double(cr.inertia);
    if (loss) std::cout << " loss=" << mbt::format_double(*loss);
    if (ari) std::cout << " ari=" << mbt::format_double(*ari);
    std::cout << '\n';
    return 0;
}

struct experiment_args {
    std::string config, out_dir;
};

int run_experiment_cmd(const experiment_args& a) {
    const mbt::experiment_config cfg = mbt::load_experiment_config(a.config);
    std::filesystem::create_directories(a.out_dir);
    const mbt::sweep_record rec = mbt::run_experiment(cfg);

    const std::filesystem::path dir(a.out_dir);
    mbt::write_sweep_csv((dir / "raw.csv").string(), rec);
    mbt::write_summary_csv((dir / "summary.csv").string(), rec);
    mbt::write_config_echo((dir / "config_echo.json").string(), cfg);

    std::cout << "experiment " << cfg.experiment << ": " << rec.rows.size() << " rows -> "
              << a.out_dir << '\n';
    if (!rec.tolerances_ok) {
        for (const std::string& v : rec.violations) std::cerr << "tolerance violated: " << v << '\n';
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"metric-backbone toolkit"};
    app.require_subcommand(1);

    backbone_args ba;
    CLI::App* backbone = app.add_subcommand("backbone", "compute the metric backbone");
    backbone->add_option("--input", ba.input, "cost edge list (u v cost)")->required();
    backbone->add_option("--output", ba.output, "backbone edge list output");
    backbone->add_option("--report", ba.report, "JSON report output");
    backbone->add_option("--approx-roots", ba.approx_roots,
                         "union of this many shortest-path trees instead of the exact backbone "
                         "(0 = exact)");
    backbone->add_option("--seed", ba.seed, "root sampling seed for --approx-roots");

    wsbm_args wa;
    CLI::App* wsbm = app.add_subcommand("wsbm", "weighted stochastic block models");
    wsbm->require_subcommand(1);
    CLI::App* sample = wsbm->add_subcommand("sample", "draw one instance");
    sample->add_option("--config", wa.config, "JSON file with n/pi/B/rho/costs/seed");
    CLI::Option* on = sample->add_option("--n", wa.n, "number of vertices");
    CLI::Option* opi = sample->add_option("--pi", wa.pi, "block probabilities (k values)");
    CLI::Option* oB =
        sample->add_option("--B", wa.B, "affinity matrix, row-major k*k values; p_ab = B_ab rho");
    CLI::Option* orho = sample->add_option("--rho-exponent", wa.rho_exponent,
                                           "rho = n^-alpha (default rho = log(n)^2/n)");
    CLI::Option* ocosts = sample->add_option(
        "--costs", wa.costs, "edge cost law `exp:l` / `uniform:l`, one entry or k(k+1)/2");
    CLI::Option* oseed = sample->add_option("--seed", wa.seed, "sampling seed");
    sample->add_option("--out-edges", wa.out_edges, "edge list output");
    sample->add_option("--out-labels", wa.out_labels, "community label output");

    knn_args ka;
    CLI::App* knn = app.add_subcommand("knn", "q-nearest-neighbour similarity graph");
    knn->add_option("--input", ka.input, "points CSV, one row per point")->required();
    knn->add_option("--q", ka.q, "neighbours per point")->required();
    knn->add_option("--kernel", ka.kernel, "gaussian | angular")
        ->check(CLI::IsMember({"gaussian", "angular"}));
    knn->add_option("--label-col", ka.label_col, "0-based label column to skip");
    knn->add_option("--out", ka.out, "edge list output")->required();

    sparsify_args sa;
    CLI::App* sparsify = app.add_subcommand("sparsify", "budgeted graph sparsifiers");
    sparsify->add_option("--input", sa.input, "proximity edge list")->required();
    sparsify->add_option("--method", sa.method, "threshold | spectral")
        ->check(CLI::IsMember({"threshold", "spectral"}));
    CLI::Option* omt = sparsify->add_option("--m-target", sa.m_target, "edge budget");
    CLI::Option* omb = sparsify->add_flag("--match-backbone", sa.match_backbone,
                                          "use the metric backbone size as the budget");
    omt->excludes(omb);
    sparsify->add_option("--out", sa.out, "sparsified edge list output");
    sparsify->add_option("--report", sa.report, "JSON report output");
    sparsify->add_option("--seed", sa.seed, "sampling seed (spectral)");

    cluster_args ca;
    CLI::App* cluster = app.add_subcommand("cluster", "spectral clustering");
    cluster->add_option("--input", ca.input, "proximity edge list")->required();
    cluster->add_option("--k", ca.k, "number of clusters")->required();
    cluster->add_option("--seed", ca.seed, "k-means seed");
    cluster->add_option("--restarts", ca.restarts, "k-means restarts");
    cluster->add_option("--labels", ca.labels, "ground-truth labels for loss/ARI");
    cluster->add_option("--out", ca.out, "predicted label output");
    cluster->add_option("--report", ca.report, "JSON report output");

    experiment_args ea;
    CLI::App* experiment = app.add_subcommand("experiment", "experiment drivers");
    experiment->require_subcommand(1);
    CLI::App* run = experiment->add_subcommand("run", "run a config and emit CSV");
    run->add_option("--config", ea.config, "experiment JSON config")->required();
    run->add_option("--out-dir", ea.out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (backbone->parsed()) return run_backbone(ba);
        if (wsbm->parsed() && sample->parsed()) {
            wa.has_rho_exponent = orho->count() > 0;
            return run_wsbm_sample(wa, on->count() > 0, opi->count() > 0, oB->count() > 0,
                                   ocosts->count() > 0, oseed->count() > 0);
        }
        if (knn->parsed()) return run_knn(ka);
        if (sparsify->parsed()) {
            if (!sa.match_backbone && omt->count() == 0)
                throw mbt::domain_error("sparsify: need --m-target or --match-backbone");
            return run_sparsify(sa);
        }
        if (cluster->parsed()) return run_cluster(ca);
        if (experiment->parsed() && run->parsed()) return run_experiment_cmd(ea);
    } catch (const mbt::mbt_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
