#pragma once

#include <vector>

#include "ovle/common.hpp"
#include "ovle/geometry.hpp"
#include "ovle/signature.hpp"

namespace ovle {

// Decoded scalar parameters: positive weights w = exp(theta) and the
// dot-similarity offset c.  Decoding happens once per optimization step.
struct ModelParams {
    std::vector<double> weights;
    double offset = 0.0;
};

// One weighted distance term over a contiguous coordinate block.
// weight_index < 0 means a fixed weight of 1 (Euclidean product factors).
struct DistanceTerm {
    SpaceKind kind;
    int begin;
    int end;
    int weight_index;
};

// Evaluates the configured distance (or dot similarity) and its gradients
// with respect to the two ambient rows and the raw scalar block.  Pure and
// safe for concurrent use with read-only parameters.
class DistanceModel {
public:
    explicit DistanceModel(Signature sig);

    const Signature& signature() const { return sig_; }
    int dim() const { return sig_.ambient_dim; }
    int scalar_count() const { return sig_.scalar_count(); }
    const std::vector<DistanceTerm>& terms() const { return terms_; }

    // raw_scalars = [theta..., c?]
    ModelParams decode(ConstSpan raw_scalars) const;

    double distance(ConstSpan x, ConstSpan y, const ModelParams& p) const;

    // Accumulates upstream * d(dist)/d* into gx, gy (length dim) and
    // g_scalars (length scalar_count, in theta/c space).  Returns the value.
    double distance_with_grad(ConstSpan x, ConstSpan y, const ModelParams& p,
                              double upstream, Span gx, Span gy, Span g_scalars) const;

    // Evaluation with explicit per-term weights (zeros allowed).  Used by
    // tests to restrict an overlay to a sub-structure.
    double distance_custom_weights(ConstSpan x, ConstSpan y, ConstSpan term_weights) const;

private:
    Signature sig_;
    std::vector<DistanceTerm> terms_;
    Aggregation agg_ = Aggregation::RootSumSq;

    double term_weight(const ModelParams& p, const DistanceTerm& t) const {
        return t.weight_index < 0 ? 1.0 : p.weights[t.weight_index];
    }
};

}  // namespace ovle
