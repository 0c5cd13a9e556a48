#pragma once

#include <vector>

#include "ovle/common.hpp"

namespace ovle {

enum class SpaceKind { Euclidean, Spherical, Hyperbolic };

char space_kind_char(SpaceKind k);

namespace geom {

// Interior nudge applied to arccos/arccosh arguments when computing
// gradients; values are clamped exactly to the closed domain instead.
inline constexpr double kGradEps = 1e-7;

// Accumulated inner products of a coordinate block.  All three base
// distances and their ambient gradients are cheap functions of these sums.
struct PairSums {
    double xx = 0.0;  // <x, x>
    double yy = 0.0;  // <y, y>
    double xy = 0.0;  // <x, y>
    double dd = 0.0;  // |x - y|^2

    static PairSums compute(ConstSpan x, ConstSpan y);
};

double dist_euclidean_from(const PairSums& s);
double dist_spherical_from(const PairSums& s);   // throws NumericError on zero norm
double dist_hyperbolic_from(const PairSums& s);

std::vector<double> map_spherical(ConstSpan x);
std::vector<double> map_hyperbolic(ConstSpan x);  // length d+1, first coord >= 1

double dist_euclidean(ConstSpan x, ConstSpan y);
double dist_spherical(ConstSpan x, ConstSpan y);
double dist_hyperbolic(ConstSpan x, ConstSpan y);
double distance(SpaceKind kind, ConstSpan x, ConstSpan y);

// Accumulates scale * d(dist)/dx into gx and scale * d(dist)/dy into gy.
// Near-singular configurations use the eps-regularized derivative.  Returns
// the distance value (unregularized).
double distance_with_grad(SpaceKind kind, ConstSpan x, ConstSpan y, double scale,
                          Span gx, Span gy);

// Fused variant: one coordinate pass applying Euclidean, spherical and
// hyperbolic gradient scales simultaneously.  Skips kinds with scale 0.
void accumulate_grads(ConstSpan x, ConstSpan y, const PairSums& s, double scale_e,
                      double scale_s, double scale_h, Span gx, Span gy);

}  // namespace geom
}  // namespace ovle
