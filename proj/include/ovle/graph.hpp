#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ovle/common.hpp"

namespace ovle {

// Undirected graph with dense node indices.  Nodes are re-indexed by first
// appearance when loading from a file; original labels are kept for reports.
struct Graph {
    struct Edge {
        int u;
        int v;
        double w;
    };

    int node_count = 0;
    bool weighted = false;
    std::vector<Edge> edges;
    std::vector<std::string> labels;

    // adjacency[v] = (neighbor, weight), sorted by neighbor index
    std::vector<std::vector<std::pair<int, double>>> adjacency;

    void build_adjacency();
    bool connected() const;
    int degree(int v) const { return static_cast<int>(adjacency[v].size()); }
};

// All-pairs shortest path distances.  Symmetric, zero diagonal.
struct DistanceMatrix {
    int n = 0;
    std::vector<double> d;  // row-major n*n

    double at(int i, int j) const { return d[static_cast<std::size_t>(i) * n + j]; }
    double& at(int i, int j) { return d[static_cast<std::size_t>(i) * n + j]; }
};

// Parses "u v [w]" lines, '#' comments.  Labels may be arbitrary strings.
// Throws DataError on malformed lines, self-loops, duplicate undirected
// edges, nonpositive weights, or a disconnected result.
Graph load_edge_list(const std::string& path, bool weighted);

// BFS per source for unweighted graphs, Dijkstra for weighted ones.
DistanceMatrix shortest_paths(const Graph& g, int threads = 1);

// Target distances taken directly from edge weights of a complete weighted
// graph, bypassing Dijkstra.  Missing pairs are an error.
DistanceMatrix raw_weight_distances(const Graph& g);

// Random bipartite graph: each (small, large) pair is an edge with
// probability p.  Isolated nodes are dropped and the largest connected
// component is kept; the result is deterministic for a fixed seed.
Graph generate_bipartite(int n_small, int n_large, double p, std::uint64_t seed);

// Binary cache: 16-byte header (magic "DGMX", u32 n, 8 reserved bytes),
// then row-major little-endian f64.
void save_distance_cache(const std::string& path, const DistanceMatrix& dm);
DistanceMatrix load_distance_cache(const std::string& path);

}  // namespace ovle
