#include "ovle/metrics.hpp"

#include <cmath>
#include <limits>

#include "ovle/losses.hpp"

namespace ovle {

std::vector<std::vector<int>> neighbor_sets(const Graph& g, const DistanceMatrix* dists) {
    const int n = g.node_count;
    std::vector<std::vector<int>> nbrs(n);
    if (!g.weighted) {
        for (int v = 0; v < n; ++v)
            for (const auto& [u, w] : g.adjacency[v]) nbrs[v].push_back(u);
        return nbrs;
    }
    if (dists == nullptr)
        throw ConfigError("mAP on a weighted graph needs the shortest-path matrix");
    for (int v = 0; v < n; ++v) {
        double best = std::numeric_limits<double>::infinity();
        for (int w = 0; w < n; ++w)
            if (w != v) best = std::min(best, dists->at(v, w));
        for (int w = 0; w < n; ++w)
            if (w != v && dists->at(v, w) == best) nbrs[v].push_back(w);
    }
    return nbrs;
}

double distortion_metric(const DistanceModel& model, const ModelParams& params,
                         ConstSpan embedding, const DistanceMatrix& targets, int threads) {
    return distortion_loss_grad(model, params, embedding, targets, {}, {}, threads);
}

double map_metric(const DistanceModel& model, const ModelParams& params,
                  ConstSpan embedding, const Graph& graph, const DistanceMatrix* dists,
                  int threads) {
    (void)threads;  // per-source work is cheap enough to keep single-threaded
    const int n = graph.node_count;
    const int dim = model.dim();
    auto row_of = [&](int i) {
        return embedding.subspan(static_cast<std::size_t>(i) * dim, dim);
    };
    const auto nbrs = neighbor_sets(graph, dists);
    return map_from_scores(
        n,
        [&](int v, std::vector<double>& row) {
            for (int w = 0; w < n; ++w)
                row[w] = w == v ? 0.0 : model.distance(row_of(v), row_of(w), params);
        },
        nbrs);
}

std::vector<std::pair<int, double>> rank_table(const DistanceModel& model,
                                               const ModelParams& params,
                                               ConstSpan embedding, int v) {
    const int dim = model.dim();
    const int n = static_cast<int>(embedding.size()) / dim;
    if (v < 0 || v >= n) throw DataError("rank_table: bad node index");
    auto row_of = [&](int i) {
        return embedding.subspan(static_cast<std::size_t>(i) * dim, dim);
    };
    std::vector<std::pair<int, double>> out;
    out.reserve(n - 1);
    for (int w = 0; w < n; ++w)
        if (w != v) out.emplace_back(w, model.distance(row_of(v), row_of(w), params));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    return out;
}

}  // namespace ovle
