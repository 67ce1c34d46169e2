#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mbt/errors.hpp"

namespace mbt {

/// splitmix64 step, used to derive independent seeds from a base seed and a key.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t key) {
    return splitmix64(base ^ splitmix64(key + 0x632be59bd9b4e019ULL));
}

/// Deterministic random generator with portable distributions.
///
/// mt19937_64 output is specified bit for bit by the standard, and every
/// distribution here is implemented by explicit inversion or transformation,
/// so streams are reproducible across platforms and standard libraries.
class rng {
public:
    explicit rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Uniform integer in [0, n). Rejection sampling keeps the stream unbiased.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw domain_error("uniform_int: n must be positive");
        if ((n & (n - 1)) == 0) return gen_() & (n - 1);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return x % n;
    }

    /// Exponential with rate lambda via inverse CDF.
    double exponential(double lambda) {
        if (lambda <= 0.0) throw domain_error("exponential: rate must be positive");
        return -std::log1p(-uniform01()) / lambda;
    }

    /// Standard normal via Box-Muller; draws are paired internally.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Index in [0, weights.size()) with probability proportional to weights[i].
    std::size_t discrete(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw domain_error("discrete: negative weight");
            total += w;
        }
        if (total <= 0.0) throw domain_error("discrete: weights sum to zero");
        const double target = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (target < acc) return i;
        }
        return weights.size() - 1;
    }

    /// Independent generator derived from this generator's seed and a key.
    /// The derivation depends only on (seed, key), never on draws already made.
    rng substream(std::uint64_t key) const { return rng(derive_seed(seed_, key)); }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace mbt
