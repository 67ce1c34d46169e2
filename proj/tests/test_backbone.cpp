#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "mbt/backbone.hpp"
#include "mbt/errors.hpp"
#include "mbt/rng.hpp"
#include "mbt/shortest_paths.hpp"
#include "oracles.hpp"

using namespace mbt;

TEST_CASE("triangle with one heavy edge loses it") {
    const weighted_graph g = weighted_graph::from_edge_list(
        {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 3.0}}, weight_mode::cost);
    const backbone_result bb = metric_backbone(g);
    // Edges canonicalize to (0,1), (0,2), (1,2); the heavy (0,2) is index 1.
    CHECK(bb.kept == std::vector<std::uint8_t>{1, 0, 1});
    CHECK(bb.backbone.num_edges() == 2);
    CHECK(bb.backbone.num_vertices() == 3);
}

TEST_CASE("exact ties are kept") {
    // 0-2 costs exactly as much as the detour through 1.
    const weighted_graph g = weighted_graph::from_edge_list(
        {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 2.0}}, weight_mode::cost);
    const backbone_result bb = metric_backbone(g);
    CHECK(bb.kept == std::vector<std::uint8_t>{1, 1, 1});
}

TEST_CASE("a tree is its own backbone") {
    rng gen(5);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + gen.uniform_int(50);
        std::vector<edge> rows;
        for (std::uint32_t v = 1; v < n; ++v)
            rows.push_back({static_cast<vertex_id>(gen.uniform_int(v)), v, 0.1 + gen.uniform01()});
        const weighted_graph g = weighted_graph::from_edge_list(rows, weight_mode::cost, n);
        const backbone_result bb = metric_backbone(g);
        CHECK(std::count(bb.kept.begin(), bb.kept.end(), 1) ==
              static_cast<std::ptrdiff_t>(g.num_edges()));
    }
}

TEST_CASE("backbone equals the dense oracle on random graphs") {
    rng gen(6);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + gen.uniform_int(58);
        const bool integer_weights = trial % 3 == 0;  // force plenty of ties
        const weighted_graph g = oracles::random_graph(gen, n, 0.2, integer_weights);
        const backbone_result bb = metric_backbone(g);
        CHECK(bb.kept == oracles::brute_backbone_kept(g));
    }
}

TEST_CASE("backbone preserves all pairwise distances") {
    rng gen(7);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t n = 10 + gen.uniform_int(70);
        const weighted_graph g = oracles::random_connected_graph(gen, n, 0.15);
        const backbone_result bb = metric_backbone(g);
        const auto before = oracles::floyd_warshall(g);
        const auto after = oracles::floyd_warshall(bb.backbone);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                CHECK(after[i][j] == doctest::Approx(before[i][j]).epsilon(1e-9));
    }
}

TEST_CASE("backbone extraction is idempotent") {
    rng gen(8);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 10 + gen.uniform_int(40);
        const weighted_graph g = oracles::random_connected_graph(gen, n, 0.2);
        const backbone_result once = metric_backbone(g);
        const backbone_result twice = metric_backbone(once.backbone);
        CHECK(std::count(twice.kept.begin(), twice.kept.end(), 1) ==
              static_cast<std::ptrdiff_t>(once.backbone.num_edges()));
    }
}

TEST_CASE("backbone requires cost mode") {
    const weighted_graph p =
        weighted_graph::from_edge_list({{0, 1, 0.5}}, weight_mode::proximity);
    CHECK_THROWS_AS(metric_backbone(p), wrong_mode);
    CHECK_THROWS_AS(approximate_backbone(p, 1, 1), wrong_mode);
    CHECK_THROWS_AS(max_shortest_path_cost(p), wrong_mode);
}

TEST_CASE("approximate backbone is contained in the exact backbone") {
    rng gen(9);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5 + gen.uniform_int(60);
        const weighted_graph g = oracles::random_connected_graph(gen, n, 0.15, trial % 2 == 0);
        const backbone_result exact = metric_backbone(g);
        const std::size_t roots = 1 + gen.uniform_int(n);
        const backbone_result approx = approximate_backbone(g, roots, 1000 + trial);
        for (std::size_t i = 0; i < g.num_edges(); ++i)
            if (approx.kept[i]) CHECK(exact.kept[i]);
        CHECK(approx.roots_used.size() == roots);
    }
}

TEST_CASE("approximate backbone grows monotonically with the root prefix") {
    rng gen(10);
    const weighted_graph g = oracles::random_connected_graph(gen, 60, 0.15);
    const std::uint64_t seed = 77;
    std::vector<std::uint8_t> prev(g.num_edges(), 0);
    for (std::size_t roots = 1; roots <= 60; roots += 7) {
        const backbone_result approx = approximate_backbone(g, roots, seed);
        for (std::size_t i = 0; i < g.num_edges(); ++i)
            if (prev[i]) CHECK(approx.kept[i]);
        prev = approx.kept;
    }
}

TEST_CASE("with unique weights, all-roots approximation recovers the backbone") {
    rng gen(11);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 5 + gen.uniform_int(50);
        // Continuous weights are distinct with probability one, so every
        // metric edge is the unique shortest path between its endpoints and
        // appears in the shortest-path tree of its own endpoint.
        const weighted_graph g = oracles::random_connected_graph(gen, n, 0.2);
        const backbone_result exact = metric_backbone(g);
        const backbone_result all = approximate_backbone(g, n, trial);
        CHECK(all.kept == exact.kept);
    }
}

TEST_CASE("approximate backbone rejects bad root counts") {
    const weighted_graph g = weighted_graph::from_edge_list({{0, 1, 1.0}}, weight_mode::cost);
    CHECK_THROWS_AS(approximate_backbone(g, 0, 1), domain_error);
    CHECK_THROWS_AS(approximate_backbone(g, 3, 1), domain_error);
    CHECK(default_num_roots(2) >= 1);
    CHECK(default_num_roots(1000) == static_cast<std::size_t>(std::ceil(2 * std::log(1000.0))));
}

TEST_CASE("max shortest path cost on a line and with disconnection") {
    const weighted_graph line = weighted_graph::from_edge_list(
        {{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 3.0}}, weight_mode::cost);
    CHECK(max_shortest_path_cost(line) == doctest::Approx(6.0));

    const weighted_graph split =
        weighted_graph::from_edge_list({{0, 1, 1.0}, {2, 3, 1.0}}, weight_mode::cost);
    CHECK_THROWS_AS(max_shortest_path_cost(split), disconnected);

    const weighted_graph lonely = weighted_graph::from_edge_list({}, weight_mode::cost, 1);
    CHECK(max_shortest_path_cost(lonely) == 0.0);
}

TEST_CASE("max shortest path cost matches the dense oracle") {
    rng gen(12);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 5 + gen.uniform_int(60);
        const weighted_graph g = oracles::random_connected_graph(gen, n, 0.1);
        const auto fw = oracles::floyd_warshall(g);
        double expect = 0.0;
        for (const auto& row : fw)
            for (double d : row) expect = std::max(expect, d);
        CHECK(max_shortest_path_cost(g) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("exact backbone reports every vertex as a root") {
    const weighted_graph g = weighted_graph::from_edge_list(
        {{0, 1, 1.0}, {1, 2, 1.0}}, weight_mode::cost);
    const backbone_result bb = metric_backbone(g);
    CHECK(bb.roots_used == std::vector<vertex_id>{0, 1, 2});
}
