#include "ovle/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "ovle/metrics.hpp"
#include "ovle/rng.hpp"

namespace ovle {

std::vector<double> init_embedding(int n, int d, std::uint64_t seed, double init_scale) {
    if (n < 1 || d < 1) throw ConfigError("init_embedding: n and d must be >= 1");
    Rng rng(seed);
    std::vector<double> m(static_cast<std::size_t>(n) * d);
    for (double& v : m) v = rng.uniform(-init_scale, init_scale);
    return m;
}

void adam_step(Span params, ConstSpan grads, AdamState& state, double lr,
               const TrainConfig& cfg) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size())
        throw ConfigError("adam_step: shape mismatch");
    ++state.step_count;
    const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        params[i] -= lr * (m / c1) / (std::sqrt(v / c2) + cfg.adam_eps);
    }
}

namespace {

std::vector<std::pair<int, int>> sample_pairs(int n, std::size_t count,
                                              std::uint64_t seed, int iteration) {
    // Fresh deterministic sample per iteration.
    Rng rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(iteration + 1)));
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(count);
    while (pairs.size() < count) {
        int i = static_cast<int>(rng.index(n));
        int j = static_cast<int>(rng.index(n));
        if (i == j) continue;
        pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
    return pairs;
}

struct RunOutcome {
    TrainResult result;
    bool ok = false;
};

RunOutcome train_one_rate(const Graph& graph, const DistanceMatrix* targets,
                          const DistanceModel& model, const LossSpec& loss,
                          const TrainConfig& cfg, double lr) {
    const int n = graph.node_count;
    const int dim = model.dim();
    const int nscal = model.scalar_count();
    const std::size_t psize = static_cast<std::size_t>(n) * dim + nscal;

    RunOutcome out;
    TrainResult& res = out.result;
    res.learning_rate = lr;
    res.params = init_embedding(n, dim, cfg.seed, cfg.init_scale);
    res.params.resize(psize, 0.0);
    if (model.signature().has_offset()) res.params.back() = 1.0;  // c starts at 1

    const bool distortion = loss.kind == LossKind::Distortion;
    if (distortion && targets == nullptr)
        throw ConfigError("distortion loss requires target distances");
    const bool sample = distortion && n > loss.full_pair_limit;

    AdamState state(psize);
    std::vector<double> grad(psize);
    res.trace.reserve(cfg.iterations);

    for (int iter = 0; iter < cfg.iterations; ++iter) {
        std::fill(grad.begin(), grad.end(), 0.0);
        const ModelParams mp = model.decode(
            ConstSpan(res.params).subspan(static_cast<std::size_t>(n) * dim, nscal));
        ConstSpan emb(res.params.data(), static_cast<std::size_t>(n) * dim);

        double value;
        try {
            if (distortion) {
                const auto pairs =
                    sample ? sample_pairs(n, loss.sampled_pairs, cfg.seed, iter)
                           : std::vector<std::pair<int, int>>{};
                value = distortion_loss_grad(model, mp, emb, *targets, pairs, grad,
                                             cfg.threads);
            } else {
                value = proxy_loss_grad(model, mp, emb, graph, loss, grad, cfg.threads);
            }
        } catch (const NumericError&) {
            res.diverged = true;
            return out;
        }
        if (!std::isfinite(value)) {
            res.diverged = true;
            return out;
        }

        for (std::size_t i = 0; i < psize; ++i) {
            if (!std::isfinite(grad[i])) {
                double mg = 0.0;
                for (double g : grad)
                    if (std::isfinite(g)) mg = std::max(mg, std::abs(g));
                const char* block = i < static_cast<std::size_t>(n) * dim ? "embedding"
                                                                          : "scalars";
                throw NumericError("non-finite gradient at iteration " +
                                   std::to_string(iter) + " in " + block +
                                   " block (max finite |g| = " + std::to_string(mg) + ")");
            }
        }
        adam_step(res.params, grad, state, lr, cfg);
        res.trace.push_back({iter, value});
        res.final_loss = value;
    }

    // Final evaluation metric for rate selection and reporting.
    const ModelParams mp = model.decode(
        ConstSpan(res.params).subspan(static_cast<std::size_t>(n) * dim, nscal));
    ConstSpan emb(res.params.data(), static_cast<std::size_t>(n) * dim);
    res.final_metric = distortion
                           ? distortion_metric(model, mp, emb, *targets, cfg.threads)
                           : map_metric(model, mp, emb, graph, targets, cfg.threads);
    out.ok = true;
    return out;
}

}  // namespace

TrainResult train(const Graph& graph, const DistanceMatrix* targets, const Signature& sig,
                  const LossSpec& loss, const TrainConfig& cfg) {
    if (cfg.iterations < 1) throw ConfigError("iterations must be >= 1");
    if (!graph.connected()) throw DataError("train: graph is not connected");

    const DistanceModel model(sig);
    std::vector<double> rates =
        cfg.lr_sweep.empty() ? std::vector<double>{cfg.learning_rate} : cfg.lr_sweep;
    for (double r : rates)
        if (r <= 0.0) throw ConfigError("learning rate must be positive");

    const bool distortion = loss.kind == LossKind::Distortion;
    bool have_best = false;
    TrainResult best;
    TrainResult last_diverged;
    for (double lr : rates) {
        RunOutcome out = train_one_rate(graph, targets, model, loss, cfg, lr);
        if (!out.ok) {
            last_diverged = std::move(out.result);
            continue;
        }
        const bool better = !have_best ||
                            (distortion ? out.result.final_metric < best.final_metric
                                        : out.result.final_metric > best.final_metric);
        if (better) {
            best = std::move(out.result);
            have_best = true;
        }
    }
    if (!have_best) {
        last_diverged.diverged = true;
        return last_diverged;
    }
    return best;
}

}  // namespace ovle
