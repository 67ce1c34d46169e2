#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mbt/backbone.hpp"
#include "mbt/cluster.hpp"
#include "mbt/sparsify.hpp"
#include "mbt/transforms.hpp"
#include "mbt/wsbm.hpp"

namespace mbt {

struct sweep_row {
    std::string experiment;
    std::string params;  // semicolon-separated name=value pairs
    std::uint64_t seed = 0;
    std::string metric;
    double value = 0.0;
    double wall_time_ms = 0.0;
};

struct sweep_record {
    std::vector<sweep_row> rows;
    bool tolerances_ok = true;
    std::vector<std::string> violations;
};

struct experiment_config {
    std::string experiment;  // cost-band | retention | sparsifier | knn
    std::vector<std::uint64_t> seeds = {1};

    // wSBM instance shared by cost-band, retention and the synthetic sparsifier run.
    std::size_t n = 2000;
    std::size_t k = 2;
    double p0 = 6.0;
    double q0 = 2.0;
    std::optional<double> rho;  // default: log(n)^2 / n
    std::string cost_kind = "exp";
    double cost_lambda = 1.0;

    // cost-band pair sampling; block_a/block_b = -1 samples unrestricted pairs.
    std::size_t num_pairs = 200;
    int block_a = -1;
    int block_b = -1;

    // sparsifier comparison inputs; empty paths fall back to the synthetic wSBM.
    std::string input_edges;
    std::string input_labels;
    std::size_t min_component_size = 1;
    std::optional<double> lambda2_threshold;  // normalized-Laplacian component filter

    // knn sweep; empty points path generates Gaussian blobs per seed.
    std::string points_file;
    std::optional<int> label_col;
    std::vector<std::size_t> q_grid = {10, 20, 40};
    std::string kernel = "gaussian";
    bool approx_backbone = false;
    std::size_t blob_n = 1500;
    std::size_t blob_k = 3;
    std::size_t blob_dim = 2;
    double blob_separation = 8.0;
    double blob_spread = 1.0;

    // Optional tolerance gates; violations flip sweep_record::tolerances_ok.
    std::optional<double> band_lo;       // cost-band: per-seed mean scaled cost
    std::optional<double> band_hi;
    std::optional<double> ratio_tol;     // retention: relative tolerance on retention ratios
    std::optional<double> density_tol;   // retention: relative tolerance on scaled density
    std::optional<double> ari_gap;       // sparsifier: ari(backbone) >= ari(original) - gap
    std::optional<double> spread_slack;  // knn: spread(mb) <= spread(orig) + slack

    wsbm_params make_wsbm_params() const;
};

experiment_config load_experiment_config(const std::string& path);
void write_config_echo(const std::string& path, const experiment_config& cfg);

/// Scaled shortest-path costs of random vertex pairs against the
/// [1/tau_max, 1/tau_min] band. Rejects configs with n rho / log n <= 1.
sweep_record run_cost_band_validation(const experiment_config& cfg);

/// Exact backbone retention per block pair against the predicted band,
/// with ratio-of-ratios and scaled-density summaries.
sweep_record run_retention_validation(const experiment_config& cfg);

/// Jaccard -> distance -> {backbone, threshold, spectral} pipeline with
/// spectral clustering, ARI and component counts per method.
sweep_record run_sparsifier_comparison(const experiment_config& cfg);

/// q-NN graphs over a point cloud: clustering ARI on each graph and its
/// backbone across the q grid, plus per-seed ARI spreads.
sweep_record run_knn_sweep(const experiment_config& cfg);

/// Dispatch on cfg.experiment.
sweep_record run_experiment(const experiment_config& cfg);

void write_sweep_csv(const std::string& path, const sweep_record& rec);
void write_summary_csv(const std::string& path, const sweep_record& rec);

/// k Gaussian blobs in dim dimensions with centers on a circle of radius
/// separation (first two coordinates); labels cycle through blobs.
point_cloud gaussian_blobs(std::size_t n, std::size_t k, std::size_t dim, double separation,
                           double spread, std::uint64_t seed);

/// Drops components whose normalized-Laplacian second-smallest eigenvalue is
/// at or below the threshold, then remaps ids densely.
filtered_graph filter_weak_components(const weighted_graph& g, double lambda2_threshold);

}  // namespace mbt
