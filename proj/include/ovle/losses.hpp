#pragma once

#include <cstdint>
#include <vector>

#include "ovle/common.hpp"
#include "ovle/graph.hpp"
#include "ovle/model.hpp"

namespace ovle {

enum class Conversion { T1, T2, T3 };  // exp(-d), exp(1/d'), 1/d'
enum class LossKind { Distortion, Proxy };

struct LossSpec {
    LossKind kind = LossKind::Distortion;
    Conversion conversion = Conversion::T1;
    double d0 = 1e-2;
    // If set, t2/t3 read their clamp literally as 1/min(d, d0) instead of
    // the default 1/max(d, d0).
    bool literal_min = false;
    // Drop the w == v term from the proxy denominator.
    bool exclude_self = false;
    // Distortion pair policy: all pairs up to this node count, then a fresh
    // uniform sample per iteration.
    int full_pair_limit = 2000;
    std::size_t sampled_pairs = 1'000'000;
};

// Distance -> positive score.
double convert(Conversion c, double d, double d0, bool literal_min = false);
double log_convert(Conversion c, double d, double d0, bool literal_min = false);
double dlog_convert(Conversion c, double d, double d0, bool literal_min = false);

// Loss term of a single proxy source given log-scores for every candidate:
// sum over neighbors u of [ -log_score[u] + logsumexp(log_score) ].
// self < 0 keeps every candidate; otherwise log_scores[self] is skipped
// when exclude_self is set.
double proxy_source_loss(ConstSpan log_scores, const std::vector<int>& neighbors,
                         int self = -1, bool exclude_self = false);

// Full-batch losses with gradients accumulated into grad
// (layout [n*dim embedding | scalar block]); pass an empty grad span to skip
// the backward pass.  Parallel chunks reduce in a fixed order, so results
// are bit-stable for a given thread count.

// pairs: flattened (i, j) list; empty means all i < j.
double distortion_loss_grad(const DistanceModel& model, const ModelParams& params,
                            ConstSpan embedding, const DistanceMatrix& targets,
                            const std::vector<std::pair<int, int>>& pairs, Span grad,
                            int threads = 1);

double proxy_loss_grad(const DistanceModel& model, const ModelParams& params,
                       ConstSpan embedding, const Graph& graph, const LossSpec& spec,
                       Span grad, int threads = 1);

}  // namespace ovle
