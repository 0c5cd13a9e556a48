#pragma once

#include <cstdint>
#include <vector>

#include "ovle/common.hpp"
#include "ovle/graph.hpp"
#include "ovle/losses.hpp"
#include "ovle/model.hpp"

namespace ovle {

struct TrainConfig {
    int iterations = 2000;
    double learning_rate = 0.1;
    std::vector<double> lr_sweep;  // overrides learning_rate when non-empty
    std::uint64_t seed = 1;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double init_scale = 0.1;
    int threads = 1;
};

struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    long step_count = 0;

    explicit AdamState(std::size_t size)
        : first_moment(size, 0.0), second_moment(size, 0.0) {}
};

// Bias-corrected Adam update.
void adam_step(Span params, ConstSpan grads, AdamState& state, double lr,
               const TrainConfig& cfg);

// Entries i.i.d. uniform in [-init_scale, init_scale].
std::vector<double> init_embedding(int n, int d, std::uint64_t seed, double init_scale);

struct TraceEntry {
    int iteration;
    double loss;
};

struct TrainResult {
    std::vector<double> params;  // [n*dim embedding | scalar block]
    double final_loss = 0.0;
    double final_metric = 0.0;  // distortion or mAP depending on the loss kind
    double learning_rate = 0.0;
    bool diverged = false;
    std::vector<TraceEntry> trace;
};

// Full-batch training.  `targets` is required for the distortion loss.  With
// an lr sweep, each rate trains independently from the same seed and the run
// with the best final metric wins (lowest distortion / highest mAP);
// diverged rates are dropped.
TrainResult train(const Graph& graph, const DistanceMatrix* targets,
                  const Signature& sig, const LossSpec& loss, const TrainConfig& cfg);

}  // namespace ovle
