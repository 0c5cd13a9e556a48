#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ovle/common.hpp"
#include "ovle/graph.hpp"
#include "ovle/model.hpp"

namespace ovle {

// Relevant-neighbor sets for mAP.  Unweighted graphs use adjacency; weighted
// graphs use the closest node(s) by graph distance (exact ties included),
// which requires the shortest-path matrix.
std::vector<std::vector<int>> neighbor_sets(const Graph& g, const DistanceMatrix* dists);

// Exact distortion over all unordered pairs.
double distortion_metric(const DistanceModel& model, const ModelParams& params,
                         ConstSpan embedding, const DistanceMatrix& targets,
                         int threads = 1);

// Exact mAP.  The source node is excluded from its own candidate ranking and
// ties count as retrieved together (<= comparison).
double map_metric(const DistanceModel& model, const ModelParams& params,
                  ConstSpan embedding, const Graph& graph,
                  const DistanceMatrix* dists = nullptr, int threads = 1);

// All nodes except v sorted by ascending score from v, ties by node index.
std::vector<std::pair<int, double>> rank_table(const DistanceModel& model,
                                               const ModelParams& params,
                                               ConstSpan embedding, int v);

// Rank-based mAP over an arbitrary score table; row_fn(v, row) must fill
// row[w] with the score of candidate w from source v.  Shared by the model
// path and by tests that feed synthetic tables.
template <typename RowFn>
double map_from_scores(int n, RowFn&& row_fn, const std::vector<std::vector<int>>& nbrs) {
    double total = 0.0;
    std::vector<double> row(n);
    std::vector<int> order(n);
    std::vector<double> sorted(n);
    std::vector<int> nbr_prefix(n + 1);
    std::vector<char> is_nbr(n);

    for (int v = 0; v < n; ++v) {
        if (nbrs[v].empty()) throw DataError("mAP: node " + std::to_string(v) + " is isolated");
        row_fn(v, row);

        std::fill(is_nbr.begin(), is_nbr.end(), 0);
        for (int u : nbrs[v]) is_nbr[u] = 1;

        int m = 0;
        order.resize(n);
        for (int w = 0; w < n; ++w)
            if (w != v) order[m++] = w;
        order.resize(m);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return row[a] != row[b] ? row[a] < row[b] : a < b;
        });
        for (int k = 0; k < m; ++k) {
            sorted[k] = row[order[k]];
            nbr_prefix[k + 1] = nbr_prefix[k] + (is_nbr[order[k]] ? 1 : 0);
        }

        double ap = 0.0;
        for (int u : nbrs[v]) {
            const auto it =
                std::upper_bound(sorted.begin(), sorted.begin() + m, row[u]);
            const int rank = static_cast<int>(it - sorted.begin());
            ap += static_cast<double>(nbr_prefix[rank]) / static_cast<double>(rank);
        }
        total += ap / static_cast<double>(nbrs[v].size());
    }
    return total / static_cast<double>(n);
}

struct MetricsReport {
    std::string dataset;
    std::string signature;
    std::string loss;        // "distortion" or "proxy"
    std::string conversion;  // "t1"/"t2"/"t3", empty for distortion
    double lr = 0.0;
    std::uint64_t seed = 0;
    int iterations = 0;
    int threads = 1;
    double distortion = 0.0;
    double map = 0.0;
    double seconds = 0.0;
};

}  // namespace ovle
