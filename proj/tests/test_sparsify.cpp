#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "mbt/errors.hpp"
#include "mbt/rng.hpp"
#include "mbt/sparsify.hpp"
#include "oracles.hpp"

using namespace mbt;

namespace {

weighted_graph as_proximity(const weighted_graph& g) {
    std::vector<double> w;
    for (const edge& e : g.edges()) w.push_back(1.0 / (1.0 + e.weight));
    return g.reweighted(w, weight_mode::proximity);
}

std::set<std::pair<vertex_id, vertex_id>> edge_set(const weighted_graph& g) {
    std::set<std::pair<vertex_id, vertex_id>> s;
    for (const edge& e : g.edges()) s.insert({e.u, e.v});
    return s;
}

}  // namespace

TEST_CASE("threshold keeps exactly the heaviest edges") {
    const weighted_graph g = weighted_graph::from_edge_list(
        {{0, 1, 0.9}, {1, 2, 0.5}, {2, 3, 0.7}, {0, 3, 0.2}}, weight_mode::proximity);
    auto [sparse, report] = threshold_sparsify(g, 2);
    CHECK(report.m_original == 4);
    CHECK(report.m_target == 2);
    CHECK(report.m_achieved == 2);
    const auto kept = edge_set(sparse);
    CHECK(kept.count({0, 1}) == 1);
    CHECK(kept.count({2, 3}) == 1);
    for (const edge& e : sparse.edges()) {
        const edge* orig = nullptr;
        for (const edge& o : g.edges())
            if (o.u == e.u && o.v == e.v) orig = &o;
        REQUIRE(orig != nullptr);
        CHECK(e.weight == orig->weight);  // weights survive unchanged
    }
}

TEST_CASE("threshold tie-break is lexicographic") {
    const weighted_graph g = weighted_graph::from_edge_list(
        {{0, 1, 0.5}, {0, 2, 0.5}, {1, 2, 0.5}}, weight_mode::proximity);
    auto [sparse, report] = threshold_sparsify(g, 2);
    const auto kept = edge_set(sparse);
    CHECK(kept.count({0, 1}) == 1);
    CHECK(kept.count({0, 2}) == 1);
    CHECK(report.m_achieved == 2);
}

TEST_CASE("threshold budget edge cases") {
    const weighted_graph g = weighted_graph::from_edge_list(
        {{0, 1, 0.9}, {1, 2, 0.5}}, weight_mode::proximity);
    CHECK(threshold_sparsify(g, 2).first.num_edges() == 2);
    CHECK(threshold_sparsify(g, 0).first.num_edges() == 0);
    CHECK(threshold_sparsify(g, 0).first.num_vertices() == 3);
    CHECK_THROWS_AS(threshold_sparsify(g, 3), budget_unreachable);
    const weighted_graph cost = weighted_graph::from_edge_list({{0, 1, 1.0}}, weight_mode::cost);
    CHECK_THROWS_AS(threshold_sparsify(cost, 1), wrong_mode);
}

TEST_CASE("effective resistances on graphs with known values") {
    // Single edge: R = 1/conductance.
    const weighted_graph one =
        weighted_graph::from_edge_list({{0, 1, 0.25}}, weight_mode::proximity);
    CHECK(effective_resistances(one)[0] == doctest::Approx(4.0));

    // Unit 4-cycle: each edge sees 1 in series with 3, R = 3/4.
    std::vector<edge> cyc = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {0, 3, 1.0}};
    for (double r : effective_resistances(
             weighted_graph::from_edge_list(cyc, weight_mode::proximity)))
        CHECK(r == doctest::Approx(0.75));

    // Unit triangle: 2/3. Unit K4: 1/2.
    std::vector<edge> tri = {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}};
    for (double r : effective_resistances(
             weighted_graph::from_edge_list(tri, weight_mode::proximity)))
        CHECK(r == doctest::Approx(2.0 / 3.0));
    std::vector<edge> k4;
    for (std::uint32_t u = 0; u < 4; ++u)
        for (std::uint32_t v = u + 1; v < 4; ++v) k4.push_back({u, v, 1.0});
    for (double r : effective_resistances(
             weighted_graph::from_edge_list(k4, weight_mode::proximity)))
        CHECK(r == doctest::Approx(0.5));
}

TEST_CASE("dense and iterative resistances agree with the pseudoinverse oracle") {
    rng gen(31);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = 10 + gen.uniform_int(50);
        const weighted_graph g = as_proximity(oracles::random_connected_graph(gen, n, 0.1));
        const auto oracle = oracles::pinv_resistances(g);
        const auto dense = effective_resistances(g, resistance_method::dense);
        const auto iter = effective_resistances(g, resistance_method::iterative);
        for (std::size_t i = 0; i < g.num_edges(); ++i) {
            CHECK(dense[i] == doctest::Approx(oracle[i]).epsilon(1e-8));
            CHECK(iter[i] == doctest::Approx(oracle[i]).epsilon(1e-7));
        }
    }
}

TEST_CASE("leverage scores sum to n - 1") {
    rng gen(32);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = 10 + gen.uniform_int(80);
        const weighted_graph g = as_proximity(oracles::random_connected_graph(gen, n, 0.15));
        const auto r = effective_resistances(g);
        double lev = 0.0;
        for (std::size_t i = 0; i < g.num_edges(); ++i) lev += g.edges()[i].weight * r[i];
        CHECK(lev == doctest::Approx(static_cast<double>(n - 1)).epsilon(1e-9));
    }
}

TEST_CASE("effective resistances demand a connected proximity graph") {
    const weighted_graph split = weighted_graph::from_edge_list(
        {{0, 1, 0.5}, {2, 3, 0.5}}, weight_mode::proximity);
    CHECK_THROWS_AS(effective_resistances(split), disconnected);
    const weighted_graph cost = weighted_graph::from_edge_list({{0, 1, 1.0}}, weight_mode::cost);
    CHECK_THROWS_AS(effective_resistances(cost), wrong_mode);
}

TEST_CASE("spectral sparsifier hits the budget exactly") {
    rng gen(33);
    const weighted_graph g = as_proximity(oracles::random_connected_graph(gen, 40, 0.3));
    for (std::size_t target : {std::size_t{1}, std::size_t{10}, std::size_t{40}, g.num_edges()}) {
        auto [sparse, report] = spectral_sparsify(g, target, 99);
        CHECK(sparse.num_edges() == target);
        CHECK(report.m_achieved == target);
        CHECK(report.m_target == target);
        CHECK(sparse.mode() == weight_mode::proximity);
        CHECK(sparse.num_vertices() == g.num_vertices());
    }
    CHECK_THROWS_AS(spectral_sparsify(g, g.num_edges() + 1, 99), budget_unreachable);
    CHECK(spectral_sparsify(g, 0, 99).first.num_edges() == 0);
}

TEST_CASE("spectral sparsifier is deterministic and prefix-monotone in the budget") {
    rng gen(34);
    const weighted_graph g = as_proximity(oracles::random_connected_graph(gen, 30, 0.3));
    auto [a1, r1] = spectral_sparsify(g, 20, 7);
    auto [a2, r2] = spectral_sparsify(g, 20, 7);
    CHECK(edge_set(a1) == edge_set(a2));
    bool same_weights = true;
    for (std::size_t i = 0; i < a1.num_edges(); ++i)
        same_weights = same_weights && a1.edges()[i].weight == a2.edges()[i].weight;
    CHECK(same_weights);

    // The draw sequence for a fixed seed is shared across budgets, so a
    // smaller budget selects a prefix of a larger budget's support.
    auto small = spectral_sparsify(g, 10, 7).first;
    auto large = spectral_sparsify(g, 25, 7).first;
    const auto small_set = edge_set(small);
    const auto large_set = edge_set(large);
    for (const auto& e : small_set) CHECK(large_set.count(e) == 1);
}

TEST_CASE("spectral sparsifier reweights by inverse sampling probability") {
    // On a tree every leverage w_e R_e equals 1, so sampling probabilities
    // are uniform at 1/m. Each output weight is count_e * w_e / (Q p_e) =
    // count_e * w_e * m / Q, and once all m edges are in the support the
    // counts sum to the number of draws Q, forcing sum_e out_e/in_e = m.
    const weighted_graph tree = weighted_graph::from_edge_list(
        {{0, 1, 0.5}, {1, 2, 0.25}, {2, 3, 0.125}}, weight_mode::proximity);
    auto [sparse, report] = spectral_sparsify(tree, 3, 5);
    REQUIRE(report.m_achieved == 3);
    double ratio_sum = 0.0;
    for (std::size_t i = 0; i < sparse.num_edges(); ++i) {
        const edge& out = sparse.edges()[i];
        const edge* in = nullptr;
        for (const edge& e : tree.edges())
            if (e.u == out.u && e.v == out.v) in = &e;
        REQUIRE(in != nullptr);
        CHECK(out.weight > 0.0);
        ratio_sum += out.weight / in->weight;
    }
    CHECK(ratio_sum == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("block retention counts survivors per block pair") {
    const partition z = partition::from_labels({0, 0, 1, 1}, 2);
    const weighted_graph g = weighted_graph::from_edge_list(
        {{0, 1, 0.9}, {2, 3, 0.8}, {0, 2, 0.7}, {1, 3, 0.1}}, weight_mode::proximity, 4);
    auto [sparse, ignore] = threshold_sparsify(g, 2);
    const sparsify_report rep = block_retention(g, z, sparse, sparsify_method::threshold);
    REQUIRE(rep.per_block.size() == 3);
    for (const block_pair_stat& st : rep.per_block) {
        if (st.a == 0 && st.b == 0) {
            CHECK(st.m_original == 1);
            CHECK(st.m_kept == 1);
            CHECK(st.n_pairs == 1);
        } else if (st.a == 1 && st.b == 1) {
            CHECK(st.m_kept == 1);
        } else {
            CHECK(st.a == 0);
            CHECK(st.b == 1);
            CHECK(st.m_original == 2);
            CHECK(st.m_kept == 0);
            CHECK(st.ratio == doctest::Approx(0.0));
            CHECK(st.n_pairs == 4);
        }
    }
    const partition wrong = partition::from_labels({0, 0, 1}, 2);
    CHECK_THROWS_AS(block_retention(g, wrong, sparse, sparsify_method::threshold), domain_error);
}
