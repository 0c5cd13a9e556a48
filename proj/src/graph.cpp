#include "ovle/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "ovle/rng.hpp"

namespace ovle {

void Graph::build_adjacency() {
    adjacency.assign(node_count, {});
    for (const Edge& e : edges) {
        adjacency[e.u].emplace_back(e.v, e.w);
        adjacency[e.v].emplace_back(e.u, e.w);
    }
    for (auto& nbrs : adjacency) std::sort(nbrs.begin(), nbrs.end());
}

bool Graph::connected() const {
    if (node_count == 0) return false;
    std::vector<char> seen(node_count, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (const auto& [u, w] : adjacency[v]) {
            if (!seen[u]) {
                seen[u] = 1;
                ++count;
                stack.push_back(u);
            }
        }
    }
    return count == node_count;
}

Graph load_edge_list(const std::string& path, bool weighted) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open edge list: " + path);

    Graph g;
    g.weighted = weighted;
    std::unordered_map<std::string, int> index;
    std::unordered_set<std::uint64_t> seen_edges;
    std::string line;
    int line_no = 0;

    auto node_id = [&](const std::string& label) {
        auto it = index.find(label);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(g.labels.size());
        index.emplace(label, id);
        g.labels.push_back(label);
        return id;
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string a, b, extra;
        if (!(ss >> a)) continue;  // blank line
        if (a[0] == '#') continue;
        if (!(ss >> b))
            throw DataError("parse error at line " + std::to_string(line_no) +
                            ": expected \"u v" + (weighted ? " [w]" : "") + "\"");
        double w = 1.0;
        if (weighted) {
            std::string ws;
            if (ss >> ws) {
                try {
                    std::size_t pos = 0;
                    w = std::stod(ws, &pos);
                    if (pos != ws.size()) throw std::invalid_argument(ws);
                } catch (const std::exception&) {
                    throw DataError("parse error at line " + std::to_string(line_no) +
                                    ": bad weight \"" + ws + "\"");
                }
            }
        }
        if (ss >> extra)
            throw DataError("parse error at line " + std::to_string(line_no) +
                            ": unexpected token \"" + extra + "\"");
        if (w <= 0.0)
            throw DataError("nonpositive weight at line " + std::to_string(line_no));

        int u = node_id(a);
        int v = node_id(b);
        if (u == v) throw DataError("self-loop at line " + std::to_string(line_no));
        std::uint64_t key = (static_cast<std::uint64_t>(std::min(u, v)) << 32) |
                            static_cast<std::uint32_t>(std::max(u, v));
        if (!seen_edges.insert(key).second)
            throw DataError("duplicate edge at line " + std::to_string(line_no));
        g.edges.push_back({u, v, w});
    }

    g.node_count = static_cast<int>(g.labels.size());
    if (g.node_count == 0) throw DataError("empty edge list: " + path);
    g.build_adjacency();
    if (!g.connected()) throw DataError("graph is not connected: " + path);
    return g;
}

namespace {

void bfs_row(const Graph& g, int src, double* row) {
    std::fill(row, row + g.node_count, -1.0);
    std::vector<int> frontier{src}, next;
    row[src] = 0.0;
    double depth = 0.0;
    while (!frontier.empty()) {
        depth += 1.0;
        next.clear();
        for (int v : frontier) {
            for (const auto& [u, w] : g.adjacency[v]) {
                if (row[u] < 0.0) {
                    row[u] = depth;
                    next.push_back(u);
                }
            }
        }
        frontier.swap(next);
    }
}

void dijkstra_row(const Graph& g, int src, double* row) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::fill(row, row + g.node_count, inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    row[src] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
        auto [dist, v] = pq.top();
        pq.pop();
        if (dist > row[v]) continue;
        for (const auto& [u, w] : g.adjacency[v]) {
            double cand = dist + w;
            if (cand < row[u]) {
                row[u] = cand;
                pq.emplace(cand, u);
            }
        }
    }
}

}  // namespace

DistanceMatrix shortest_paths(const Graph& g, int threads) {
    if (!g.connected()) throw DataError("shortest_paths: graph is not connected");
    const int n = g.node_count;
    DistanceMatrix dm;
    dm.n = n;
    dm.d.assign(static_cast<std::size_t>(n) * n, 0.0);

    auto run_range = [&](int begin, int end) {
        for (int src = begin; src < end; ++src) {
            double* row = dm.d.data() + static_cast<std::size_t>(src) * n;
            if (g.weighted)
                dijkstra_row(g, src, row);
            else
                bfs_row(g, src, row);
        }
    };

    threads = std::max(1, threads);
    if (threads == 1 || n < 64) {
        run_range(0, n);
    } else {
        std::vector<std::thread> pool;
        int chunk = (n + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            int b = t * chunk;
            int e = std::min(n, b + chunk);
            if (b < e) pool.emplace_back(run_range, b, e);
        }
        for (auto& th : pool) th.join();
    }
    // Per-source runs can disagree in the last ulp on weighted graphs
    // (opposite summation order along a path); mirror the upper triangle.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) dm.at(j, i) = dm.at(i, j);
    return dm;
}

DistanceMatrix raw_weight_distances(const Graph& g) {
    const int n = g.node_count;
    DistanceMatrix dm;
    dm.n = n;
    dm.d.assign(static_cast<std::size_t>(n) * n, -1.0);
    for (int i = 0; i < n; ++i) dm.at(i, i) = 0.0;
    for (const Graph::Edge& e : g.edges) {
        dm.at(e.u, e.v) = e.w;
        dm.at(e.v, e.u) = e.w;
    }
    for (double v : dm.d)
        if (v < 0.0)
            throw DataError("raw_weight_distances: graph is not complete");
    return dm;
}

Graph generate_bipartite(int n_small, int n_large, double p, std::uint64_t seed) {
    if (n_small <= 0 || n_large <= 0) throw ConfigError("bipartite: part sizes must be positive");
    if (p <= 0.0 || p >= 1.0) throw ConfigError("bipartite: p must be in (0, 1)");

    Rng rng(seed);
    const int n = n_small + n_large;
    std::vector<std::pair<int, int>> raw_edges;
    for (int i = 0; i < n_small; ++i)
        for (int j = 0; j < n_large; ++j)
            if (rng.uniform() < p) raw_edges.emplace_back(i, n_small + j);
    if (raw_edges.empty()) throw DataError("bipartite: no edges generated");

    // Largest connected component over the generated edges (isolated nodes
    // fall out automatically).  Component ids are discovered in node order,
    // so the result is deterministic.
    std::vector<std::vector<int>> adj(n);
    for (const auto& [u, v] : raw_edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<int> comp(n, -1);
    std::vector<int> comp_size;
    for (int v = 0; v < n; ++v) {
        if (comp[v] >= 0 || adj[v].empty()) continue;
        int id = static_cast<int>(comp_size.size());
        int size = 0;
        std::vector<int> stack{v};
        comp[v] = id;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            ++size;
            for (int u : adj[x]) {
                if (comp[u] < 0) {
                    comp[u] = id;
                    stack.push_back(u);
                }
            }
        }
        comp_size.push_back(size);
    }
    int best = static_cast<int>(std::max_element(comp_size.begin(), comp_size.end()) -
                                comp_size.begin());

    Graph g;
    std::vector<int> remap(n, -1);
    for (int v = 0; v < n; ++v) {
        if (comp[v] == best) {
            remap[v] = g.node_count++;
            g.labels.push_back((v < n_small ? "s" : "t") +
                               std::to_string(v < n_small ? v : v - n_small));
        }
    }
    for (const auto& [u, v] : raw_edges)
        if (remap[u] >= 0 && remap[v] >= 0) g.edges.push_back({remap[u], remap[v], 1.0});
    g.build_adjacency();
    return g;
}

void save_distance_cache(const std::string& path, const DistanceMatrix& dm) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    char header[16] = {'D', 'G', 'M', 'X'};
    std::uint32_t n = static_cast<std::uint32_t>(dm.n);
    std::memcpy(header + 4, &n, 4);
    out.write(header, 16);
    out.write(reinterpret_cast<const char*>(dm.d.data()),
              static_cast<std::streamsize>(dm.d.size() * sizeof(double)));
    if (!out) throw DataError("write failed: " + path);
}

DistanceMatrix load_distance_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path);
    char header[16];
    in.read(header, 16);
    if (!in || std::memcmp(header, "DGMX", 4) != 0)
        throw DataError("bad distance cache header: " + path);
    std::uint32_t n;
    std::memcpy(&n, header + 4, 4);
    DistanceMatrix dm;
    dm.n = static_cast<int>(n);
    dm.d.resize(static_cast<std::size_t>(n) * n);
    in.read(reinterpret_cast<char*>(dm.d.data()),
            static_cast<std::streamsize>(dm.d.size() * sizeof(double)));
    if (!in) throw DataError("truncated distance cache: " + path);
    return dm;
}

}  // namespace ovle
