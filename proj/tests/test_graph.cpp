#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "ovle/graph.hpp"
#include "ovle/rng.hpp"

using namespace ovle;

namespace {

std::string write_temp(const std::string& content) {
    static int counter = 0;
    std::string path = "graph_test_" + std::to_string(counter++) + ".edges";
    std::ofstream out(path);
    out << content;
    return path;
}

// Floyd-Warshall oracle.
DistanceMatrix floyd_warshall(const Graph& g) {
    const int n = g.node_count;
    DistanceMatrix dm;
    dm.n = n;
    dm.d.assign(static_cast<std::size_t>(n) * n, 1e300);
    for (int i = 0; i < n; ++i) dm.at(i, i) = 0.0;
    for (const auto& e : g.edges) {
        dm.at(e.u, e.v) = std::min(dm.at(e.u, e.v), e.w);
        dm.at(e.v, e.u) = dm.at(e.u, e.v);
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                dm.at(i, j) = std::min(dm.at(i, j), dm.at(i, k) + dm.at(k, j));
    return dm;
}

Graph random_connected_graph(Rng& rng, int n, double extra_edge_prob, bool weighted) {
    Graph g;
    g.node_count = n;
    g.weighted = weighted;
    for (int v = 1; v < n; ++v) {
        int u = static_cast<int>(rng.index(v));
        g.edges.push_back({u, v, weighted ? rng.uniform(0.5, 3.0) : 1.0});
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            bool has = false;
            for (const auto& e : g.edges)
                if ((e.u == i && e.v == j) || (e.u == j && e.v == i)) has = true;
            if (!has && rng.uniform() < extra_edge_prob)
                g.edges.push_back({i, j, weighted ? rng.uniform(0.5, 3.0) : 1.0});
        }
    g.build_adjacency();
    return g;
}

}  // namespace

TEST_CASE("load_edge_list basics") {
    auto path = write_temp("0 1\n1 2\n");
    Graph g = load_edge_list(path, false);
    CHECK(g.node_count == 3);
    CHECK(g.edges.size() == 2);
    CHECK_FALSE(g.weighted);
    std::remove(path.c_str());
}

TEST_CASE("load_edge_list re-indexes labels by first appearance") {
    auto path = write_temp("a b 2.5\nb c 1.0\n");
    Graph g = load_edge_list(path, true);
    CHECK(g.node_count == 3);
    CHECK(g.labels[0] == "a");
    CHECK(g.labels[1] == "b");
    CHECK(g.labels[2] == "c");
    CHECK(g.edges[0].w == 2.5);
    CHECK(g.edges[1].w == 1.0);
    std::remove(path.c_str());
}

TEST_CASE("load_edge_list error paths") {
    auto self_loop = write_temp("a a\n");
    CHECK_THROWS_AS(load_edge_list(self_loop, false), DataError);
    std::remove(self_loop.c_str());

    auto dup = write_temp("a b\nb a\n");
    CHECK_THROWS_AS(load_edge_list(dup, false), DataError);
    std::remove(dup.c_str());

    auto bad_weight = write_temp("a b -1\n");
    CHECK_THROWS_AS(load_edge_list(bad_weight, true), DataError);
    std::remove(bad_weight.c_str());

    auto disconnected = write_temp("a b\nc d\n");
    CHECK_THROWS_AS(load_edge_list(disconnected, false), DataError);
    std::remove(disconnected.c_str());

    auto half_line = write_temp("a\n");
    try {
        load_edge_list(half_line, false);
        CHECK(false);
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
    std::remove(half_line.c_str());

    auto comments = write_temp("# header\n0 1\n\n1 2\n");
    CHECK(load_edge_list(comments, false).edges.size() == 2);
    std::remove(comments.c_str());
}

TEST_CASE("shortest_paths on small graphs") {
    auto path = write_temp("0 1\n1 2\n");
    Graph g = load_edge_list(path, false);
    DistanceMatrix dm = shortest_paths(g);
    CHECK(dm.at(0, 2) == 2.0);
    CHECK(dm.at(2, 0) == 2.0);
    CHECK(dm.at(1, 1) == 0.0);
    std::remove(path.c_str());

    // detour shorter than the direct edge
    auto tri = write_temp("0 1 5\n1 2 1\n0 2 1\n");
    Graph t = load_edge_list(tri, true);
    CHECK(shortest_paths(t).at(0, 1) == 2.0);
    std::remove(tri.c_str());
}

TEST_CASE("shortest_paths equals Floyd-Warshall on random graphs") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const bool weighted = trial % 2 == 1;
        Graph g = random_connected_graph(rng, 12, 0.2, weighted);
        DistanceMatrix got = shortest_paths(g);
        DistanceMatrix want = floyd_warshall(g);
        for (int i = 0; i < g.node_count; ++i)
            for (int j = 0; j < g.node_count; ++j)
                CHECK(got.at(i, j) == doctest::Approx(want.at(i, j)).epsilon(1e-12));
    }
}

TEST_CASE("shortest_paths output satisfies metric axioms") {
    Rng rng(123);
    Graph g = random_connected_graph(rng, 30, 0.1, true);
    DistanceMatrix dm = shortest_paths(g);
    for (int i = 0; i < g.node_count; ++i) {
        CHECK(dm.at(i, i) == 0.0);
        for (int j = 0; j < g.node_count; ++j) {
            CHECK(dm.at(i, j) == dm.at(j, i));
            if (i != j) CHECK(dm.at(i, j) > 0.0);
            for (int k = 0; k < g.node_count; ++k)
                CHECK(dm.at(i, j) <= dm.at(i, k) + dm.at(k, j) + 1e-12);
        }
    }
}

TEST_CASE("generate_bipartite is reproducible and bipartite") {
    Graph a = generate_bipartite(20, 700, 0.05, 42);
    Graph b = generate_bipartite(20, 700, 0.05, 42);
    REQUIRE(a.node_count == b.node_count);
    REQUIRE(a.edges.size() == b.edges.size());
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
        CHECK(a.edges[i].u == b.edges[i].u);
        CHECK(a.edges[i].v == b.edges[i].v);
    }
    CHECK(a.connected());

    // nodes from the two parts keep their part prefix in labels
    for (const auto& e : a.edges) {
        const bool u_small = a.labels[e.u][0] == 's';
        const bool v_small = a.labels[e.v][0] == 's';
        CHECK(u_small != v_small);
    }

    Graph c = generate_bipartite(20, 700, 0.05, 43);
    CHECK((c.edges.size() != a.edges.size() || c.node_count != a.node_count));
}

TEST_CASE("generate_bipartite degenerate and error cases") {
    Graph tiny = generate_bipartite(1, 1, 0.999999, 1);
    CHECK(tiny.node_count == 2);
    CHECK(tiny.edges.size() == 1);

    CHECK_THROWS_AS(generate_bipartite(0, 10, 0.5, 1), ConfigError);
    CHECK_THROWS_AS(generate_bipartite(1, 1, 1.5, 1), ConfigError);
}

TEST_CASE("bipartite degree statistics match the generation probabilities") {
    // Monte-Carlo over seeds: expected small-side degree ~ 700 * 0.05 = 35.
    double total_small_degree = 0.0;
    int small_nodes = 0;
    const int trials = 200;
    for (int s = 0; s < trials; ++s) {
        Graph g = generate_bipartite(20, 700, 0.05, 1000 + s);
        for (int v = 0; v < g.node_count; ++v) {
            if (g.labels[v][0] == 's') {
                total_small_degree += g.degree(v);
                ++small_nodes;
            }
        }
    }
    const double mean = total_small_degree / small_nodes;
    // sd of a Binomial(700, 0.05) mean over ~4000 samples is tiny; 3 sigma ~ 0.3
    CHECK(std::abs(mean - 35.0) < 0.5);
}

TEST_CASE("distance cache round trip") {
    Rng rng(7);
    Graph g = random_connected_graph(rng, 15, 0.2, true);
    DistanceMatrix dm = shortest_paths(g);
    save_distance_cache("dm_test.bin", dm);
    DistanceMatrix back = load_distance_cache("dm_test.bin");
    REQUIRE(back.n == dm.n);
    for (std::size_t i = 0; i < dm.d.size(); ++i) CHECK(back.d[i] == dm.d[i]);
    std::remove("dm_test.bin");
}
