#include "ovle/losses.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace ovle {

double convert(Conversion c, double d, double d0, bool literal_min) {
    return std::exp(log_convert(c, d, d0, literal_min));
}

double log_convert(Conversion c, double d, double d0, bool literal_min) {
    switch (c) {
        case Conversion::T1:
            return -d;
        case Conversion::T2: {
            if (d < 0.0) throw DataError("t2 conversion: negative distance");
            const double m = literal_min ? std::min(d, d0) : std::max(d, d0);
            return 1.0 / m;
        }
        case Conversion::T3: {
            if (d < 0.0) throw DataError("t3 conversion: negative distance");
            const double m = literal_min ? std::min(d, d0) : std::max(d, d0);
            return -std::log(m);
        }
    }
    return 0.0;
}

double dlog_convert(Conversion c, double d, double d0, bool literal_min) {
    switch (c) {
        case Conversion::T1:
            return -1.0;
        case Conversion::T2: {
            if (d < 0.0) throw DataError("t2 conversion: negative distance");
            const bool active = literal_min ? d < d0 : d > d0;
            if (!active) return 0.0;
            return -1.0 / (d * d);
        }
        case Conversion::T3: {
            if (d < 0.0) throw DataError("t3 conversion: negative distance");
            const bool active = literal_min ? d < d0 : d > d0;
            if (!active) return 0.0;
            return -1.0 / d;
        }
    }
    return 0.0;
}

double proxy_source_loss(ConstSpan log_scores, const std::vector<int>& neighbors,
                         int self, bool exclude_self) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < log_scores.size(); ++w) {
        if (exclude_self && static_cast<int>(w) == self) continue;
        mx = std::max(mx, log_scores[w]);
    }
    double sum = 0.0;
    for (std::size_t w = 0; w < log_scores.size(); ++w) {
        if (exclude_self && static_cast<int>(w) == self) continue;
        sum += std::exp(log_scores[w] - mx);
    }
    const double lse = mx + std::log(sum);
    double loss = 0.0;
    for (int u : neighbors) loss += lse - log_scores[u];
    return loss;
}

namespace {

// Runs fn(chunk_index, thread_index) for chunks 0..n_chunks-1, chunk c on
// thread c % T.  Each thread walks its chunks in increasing order, so the
// computation is deterministic for a fixed thread count.
template <typename Fn>
void run_chunks(int n_chunks, int threads, Fn&& fn) {
    threads = std::clamp(threads, 1, n_chunks == 0 ? 1 : n_chunks);
    if (threads == 1) {
        for (int c = 0; c < n_chunks; ++c) fn(c, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int c = t; c < n_chunks; c += threads) fn(c, t);
        });
    for (auto& th : pool) th.join();
}

struct GradBuffers {
    std::vector<std::vector<double>> per_thread;

    GradBuffers(int threads, std::size_t size) : per_thread(threads) {
        for (auto& b : per_thread) b.assign(size, 0.0);
    }

    void reduce_into(Span grad) const {
        for (const auto& b : per_thread)
            for (std::size_t i = 0; i < b.size(); ++i) grad[i] += b[i];
    }
};

}  // namespace

double distortion_loss_grad(const DistanceModel& model, const ModelParams& params,
                            ConstSpan embedding, const DistanceMatrix& targets,
                            const std::vector<std::pair<int, int>>& pairs, Span grad,
                            int threads) {
    const int n = targets.n;
    const int dim = model.dim();
    const int nscal = model.scalar_count();
    const bool want_grad = !grad.empty();
    const bool all_pairs = pairs.empty();
    const std::size_t pair_count =
        all_pairs ? static_cast<std::size_t>(n) * (n - 1) / 2 : pairs.size();
    if (pair_count == 0) throw DataError("distortion loss: no pairs");
    const double inv_pairs = 1.0 / static_cast<double>(pair_count);

    constexpr std::size_t kChunk = 8192;
    const int n_chunks = all_pairs
                             ? n
                             : static_cast<int>((pairs.size() + kChunk - 1) / kChunk);
    threads = std::clamp(threads, 1, std::max(1, n_chunks));

    std::vector<double> partial(n_chunks, 0.0);
    GradBuffers buffers(want_grad ? threads : 0, grad.size());

    auto row = [&](int i) { return embedding.subspan(static_cast<std::size_t>(i) * dim, dim); };

    run_chunks(n_chunks, threads, [&](int chunk, int tid) {
        std::vector<double> lgx(dim), lgy(dim), lgs(nscal);
        Span tgrad = want_grad ? Span(buffers.per_thread[tid]) : Span();
        double local = 0.0;

        auto handle_pair = [&](int i, int j) {
            const double dg = targets.at(i, j);
            double du;
            if (want_grad) {
                std::fill(lgx.begin(), lgx.end(), 0.0);
                std::fill(lgy.begin(), lgy.end(), 0.0);
                std::fill(lgs.begin(), lgs.end(), 0.0);
                du = model.distance_with_grad(row(i), row(j), params, 1.0, lgx, lgy, lgs);
            } else {
                du = model.distance(row(i), row(j), params);
            }
            const double diff = du - dg;
            local += std::abs(diff) / dg;
            if (want_grad && diff != 0.0) {
                const double s = (diff > 0.0 ? 1.0 : -1.0) / dg * inv_pairs;
                double* gi = tgrad.data() + static_cast<std::size_t>(i) * dim;
                double* gj = tgrad.data() + static_cast<std::size_t>(j) * dim;
                for (int k = 0; k < dim; ++k) gi[k] += s * lgx[k];
                for (int k = 0; k < dim; ++k) gj[k] += s * lgy[k];
                double* gs = tgrad.data() + static_cast<std::size_t>(n) * dim;
                for (int k = 0; k < nscal; ++k) gs[k] += s * lgs[k];
            }
        };

        if (all_pairs) {
            const int i = chunk;
            for (int j = i + 1; j < n; ++j) handle_pair(i, j);
        } else {
            const std::size_t b = static_cast<std::size_t>(chunk) * kChunk;
            const std::size_t e = std::min(pairs.size(), b + kChunk);
            for (std::size_t k = b; k < e; ++k) handle_pair(pairs[k].first, pairs[k].second);
        }
        partial[chunk] = local;
    });

    if (want_grad) buffers.reduce_into(grad);
    double loss = 0.0;
    for (double v : partial) loss += v;
    return loss * inv_pairs;
}

double proxy_loss_grad(const DistanceModel& model, const ModelParams& params,
                       ConstSpan embedding, const Graph& graph, const LossSpec& spec,
                       Span grad, int threads) {
    if (!model.signature().is_metric() && spec.conversion != Conversion::T1)
        throw ConfigError("t2/t3 conversions require a metric model (scores may be negative)");

    const int n = graph.node_count;
    const int dim = model.dim();
    const int nscal = model.scalar_count();
    const bool want_grad = !grad.empty();
    threads = std::clamp(threads, 1, n);

    std::vector<double> partial(n, 0.0);
    GradBuffers buffers(want_grad ? threads : 0, grad.size());

    auto row = [&](int i) { return embedding.subspan(static_cast<std::size_t>(i) * dim, dim); };

    run_chunks(n, threads, [&](int v, int tid) {
        const auto& nbrs = graph.adjacency[v];
        if (nbrs.empty()) return;

        std::vector<double> dist(n), logt(n);
        for (int w = 0; w < n; ++w) dist[w] = model.distance(row(v), row(w), params);
        double mx = -std::numeric_limits<double>::infinity();
        for (int w = 0; w < n; ++w) {
            if (spec.exclude_self && w == v) continue;
            logt[w] = log_convert(spec.conversion, dist[w], spec.d0, spec.literal_min);
            mx = std::max(mx, logt[w]);
        }
        double denom = 0.0;
        for (int w = 0; w < n; ++w) {
            if (spec.exclude_self && w == v) continue;
            denom += std::exp(logt[w] - mx);
        }
        const double lse = mx + std::log(denom);

        double local = 0.0;
        for (const auto& [u, w_unused] : nbrs) local += lse - logt[u];
        partial[v] = local;

        if (!want_grad) return;
        Span tgrad(buffers.per_thread[tid]);
        std::vector<double> lgx(dim), lgy(dim), lgs(nscal);
        std::vector<double> nb_count(n, 0.0);
        for (const auto& [u, w_unused2] : nbrs) nb_count[u] += 1.0;
        const double deg = static_cast<double>(nbrs.size());
        double* gv = tgrad.data() + static_cast<std::size_t>(v) * dim;
        double* gs = tgrad.data() + static_cast<std::size_t>(n) * dim;

        for (int w = 0; w < n; ++w) {
            if (spec.exclude_self && w == v) continue;
            const double p = std::exp(logt[w] - lse);
            double coef = deg * p;  // d(local)/d(logt_w), softmax part
            // numerator part: each neighbor edge (v, u) contributes -logt_u
            coef -= nb_count[w];
            const double up =
                coef * dlog_convert(spec.conversion, dist[w], spec.d0, spec.literal_min);
            if (up == 0.0) continue;
            std::fill(lgx.begin(), lgx.end(), 0.0);
            std::fill(lgy.begin(), lgy.end(), 0.0);
            std::fill(lgs.begin(), lgs.end(), 0.0);
            model.distance_with_grad(row(v), row(w), params, up, lgx, lgy, lgs);
            double* gw = tgrad.data() + static_cast<std::size_t>(w) * dim;
            for (int k = 0; k < dim; ++k) gv[k] += lgx[k];
            for (int k = 0; k < dim; ++k) gw[k] += lgy[k];
            for (int k = 0; k < nscal; ++k) gs[k] += lgs[k];
        }
    });

    if (want_grad) buffers.reduce_into(grad);
    double loss = 0.0;
    for (double v : partial) loss += v;
    return loss;
}

}  // namespace ovle
