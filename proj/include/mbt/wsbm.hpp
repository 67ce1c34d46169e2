#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mbt/graph.hpp"
#include "mbt/rng.hpp"
#include "mbt/sparsify.hpp"

namespace mbt {

/// Edge-cost law with positive density at 0: F(0) = 0 and F'(0) = lambda.
class cost_distribution {
public:
    enum class family { exponential, uniform, custom_inverse_cdf };

    /// Exponential with rate lambda.
    static cost_distribution exponential(double lambda);
    /// Uniform on (0, 1/lambda).
    static cost_distribution uniform(double lambda);
    /// Arbitrary law given by its inverse CDF on [0, 1); lambda = F'(0) must
    /// be supplied by the caller.
    static cost_distribution custom_inverse_cdf(std::function<double(double)> inverse_cdf,
                                                double lambda);

    family kind() const { return kind_; }
    double lambda0() const { return lambda_; }

    /// Strictly positive draw.
    double sample(rng& gen) const;

    /// F(x). For the custom family the CDF is recovered from the inverse CDF
    /// by bisection, assuming the inverse CDF is nondecreasing.
    double cdf(double x) const;

private:
    cost_distribution(family kind, double lambda, std::function<double(double)> inv);

    family kind_;
    double lambda_;
    std::function<double(double)> inv_;
};

struct wsbm_params {
    std::size_t n = 0;
    std::vector<double> pi;                          // length k, positive, sums to 1
    Eigen::MatrixXd B;                               // k x k symmetric, entries > 0
    double rho = 0.0;                                // sparsity scale; p_ab = B_ab * rho
    std::vector<std::vector<cost_distribution>> F;   // k x k, symmetric in (kind, lambda)

    std::size_t k() const { return pi.size(); }

    /// Throws domain_error on structural violations and probability_overflow
    /// when any B_ab * rho exceeds 1.
    void validate() const;
};

/// Planted partition: k equal blocks, B = q0 + (p0 - q0) I, shared cost law.
wsbm_params planted_partition(std::size_t n, std::size_t k, double p0, double q0, double rho,
                              const cost_distribution& costs);

/// Convenience default for experiments: rho = log(n)^2 / n.
double default_rho(std::size_t n);

struct operator_summary {
    Eigen::MatrixXd T;      // (Lambda .* B) * diag(pi)
    Eigen::VectorXd tau;    // T * 1
    double tau_min = 0.0;
    double tau_max = 0.0;
    double mu = 0.0;        // smallest absolute eigenvalue of T
};

operator_summary compute_operator_summary(const wsbm_params& params);

struct retention_prediction {
    Eigen::MatrixXd lo;  // lower band for p_ab^mb / p_ab
    Eigen::MatrixXd hi;  // upper band
};

/// Predicted backbone retention ratio band per block pair:
/// [lambda_ab/tau_max, lambda_ab/tau_min] * log(n)/(n rho).
retention_prediction predicted_retention(const wsbm_params& params);

/// Samples labels iid from pi and each pair {u,v} independently with
/// probability B_{z_u z_v} * rho, with costs from F_{z_u z_v}. Deterministic
/// given (params, seed); per-block-pair generation uses derived substreams.
std::pair<partition, weighted_graph> sample_wsbm(const wsbm_params& params, std::uint64_t seed);

/// Monte-Carlo estimate of the backbone edge probability from shortest-path
/// cost samples: mean of -log(1 - p_ab * F_ab(C_i)).
double backbone_probability_quadrature(const std::vector<double>& cost_samples, double p_ab,
                                       const cost_distribution& F_ab);

/// Per-block-pair retention of `backbone` relative to g. The backbone edge
/// set must be a subset of g's edge set.
sparsify_report empirical_retention(const weighted_graph& g, const partition& z,
                                    const weighted_graph& backbone);

}  // namespace mbt
