#include "ovle/model.hpp"

#include <algorithm>
#include <cmath>

namespace ovle {

namespace {

constexpr double kExpDotClamp = 60.0;

double dot(ConstSpan x, ConstSpan y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double term_distance(SpaceKind kind, const geom::PairSums& s) {
    switch (kind) {
        case SpaceKind::Euclidean: return geom::dist_euclidean_from(s);
        case SpaceKind::Spherical: return geom::dist_spherical_from(s);
        case SpaceKind::Hyperbolic: return geom::dist_hyperbolic_from(s);
    }
    return 0.0;
}

}  // namespace

DistanceModel::DistanceModel(Signature sig) : sig_(std::move(sig)) {
    switch (sig_.variant) {
        case Signature::Variant::Single:
        case Signature::Variant::Product: {
            agg_ = Aggregation::RootSumSq;
            int offset = 0;
            int widx = 0;
            for (const Factor& f : sig_.factors) {
                const bool fixed = f.kind == SpaceKind::Euclidean;
                terms_.push_back({f.kind, offset, offset + f.ambient, fixed ? -1 : widx++});
                offset += f.ambient;
            }
            break;
        }
        case Signature::Variant::Overlay: {
            agg_ = sig_.agg;
            const int d = sig_.ambient_dim;
            int widx = 0;
            for (int l = 0; l <= sig_.depth; ++l) {
                const long parts = 1L << l;
                for (long i = 1; i <= parts; ++i) {
                    const int b = static_cast<int>(static_cast<long>(d) * (i - 1) / parts);
                    const int e = static_cast<int>(static_cast<long>(d) * i / parts);
                    for (SpaceKind k :
                         {SpaceKind::Euclidean, SpaceKind::Spherical, SpaceKind::Hyperbolic})
                        terms_.push_back({k, b, e, widx++});
                }
            }
            break;
        }
        case Signature::Variant::Dot:
        case Signature::Variant::ExpDot:
            break;
    }
}

ModelParams DistanceModel::decode(ConstSpan raw_scalars) const {
    const int w = sig_.weight_count();
    ModelParams p;
    p.weights.resize(w);
    for (int i = 0; i < w; ++i) p.weights[i] = std::exp(raw_scalars[i]);
    if (sig_.has_offset()) p.offset = raw_scalars[w];
    return p;
}

double DistanceModel::distance(ConstSpan x, ConstSpan y, const ModelParams& p) const {
    if (sig_.variant == Signature::Variant::Dot) return p.offset - dot(x, y);
    if (sig_.variant == Signature::Variant::ExpDot)
        return p.offset * std::exp(std::clamp(-dot(x, y), -kExpDotClamp, kExpDotClamp));

    double acc = 0.0;
    std::size_t j = 0;
    while (j < terms_.size()) {
        const int b = terms_[j].begin, e = terms_[j].end;
        const geom::PairSums sums =
            geom::PairSums::compute(x.subspan(b, e - b), y.subspan(b, e - b));
        // terms over the same block are consecutive
        for (; j < terms_.size() && terms_[j].begin == b && terms_[j].end == e; ++j) {
            const double d = term_distance(terms_[j].kind, sums);
            const double w = term_weight(p, terms_[j]);
            switch (agg_) {
                case Aggregation::Max: acc = std::max(acc, w * d); break;
                case Aggregation::Sum: acc += w * d; break;
                case Aggregation::RootSumSq: acc += w * d * d; break;
            }
        }
    }
    return agg_ == Aggregation::RootSumSq ? std::sqrt(acc) : acc;
}

double DistanceModel::distance_custom_weights(ConstSpan x, ConstSpan y,
                                              ConstSpan term_weights) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
        const int b = terms_[j].begin, e = terms_[j].end;
        const geom::PairSums sums =
            geom::PairSums::compute(x.subspan(b, e - b), y.subspan(b, e - b));
        const double w = term_weights[j];
        if (w == 0.0) continue;
        const double d = term_distance(terms_[j].kind, sums);
        switch (agg_) {
            case Aggregation::Max: acc = std::max(acc, w * d); break;
            case Aggregation::Sum: acc += w * d; break;
            case Aggregation::RootSumSq: acc += w * d * d; break;
        }
    }
    return agg_ == Aggregation::RootSumSq ? std::sqrt(acc) : acc;
}

double DistanceModel::distance_with_grad(ConstSpan x, ConstSpan y, const ModelParams& p,
                                         double upstream, Span gx, Span gy,
                                         Span g_scalars) const {
    if (sig_.variant == Signature::Variant::Dot) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            gx[i] -= upstream * y[i];
            gy[i] -= upstream * x[i];
        }
        g_scalars[1] += upstream;  // d(dist)/dc = 1; slot 0 is the unused weight
        return p.offset - dot(x, y);
    }
    if (sig_.variant == Signature::Variant::ExpDot) {
        const double nd = -dot(x, y);
        const double arg = std::clamp(nd, -kExpDotClamp, kExpDotClamp);
        const double ex = std::exp(arg);
        const double val = p.offset * ex;
        if (nd > -kExpDotClamp && nd < kExpDotClamp) {
            const double coeff = -upstream * val;  // d(val)/d(dot) = -c e^{-dot}
            for (std::size_t i = 0; i < x.size(); ++i) {
                gx[i] += coeff * y[i];
                gy[i] += coeff * x[i];
            }
        }
        g_scalars[1] += upstream * ex;
        return val;
    }

    const std::size_t nterms = terms_.size();
    // Small fixed-size scratch would do (<= 3(2^{t+1}-1)); keep it simple.
    std::vector<double> dist(nterms), weight(nterms);
    std::vector<geom::PairSums> sums;
    std::vector<std::size_t> block_first;  // first term index of each block
    sums.reserve(8);
    block_first.reserve(8);

    std::size_t j = 0;
    while (j < nterms) {
        const int b = terms_[j].begin, e = terms_[j].end;
        block_first.push_back(j);
        sums.push_back(geom::PairSums::compute(x.subspan(b, e - b), y.subspan(b, e - b)));
        for (; j < nterms && terms_[j].begin == b && terms_[j].end == e; ++j) {
            dist[j] = term_distance(terms_[j].kind, sums.back());
            weight[j] = term_weight(p, terms_[j]);
        }
    }

    // Aggregate and compute per-term sensitivities.
    double value = 0.0;
    std::vector<double> dscale(nterms, 0.0);  // upstream * dD/d(dist_j)
    switch (agg_) {
        case Aggregation::Sum: {
            for (std::size_t k = 0; k < nterms; ++k) value += weight[k] * dist[k];
            for (std::size_t k = 0; k < nterms; ++k) {
                dscale[k] = upstream * weight[k];
                if (terms_[k].weight_index >= 0)
                    g_scalars[terms_[k].weight_index] += upstream * dist[k] * weight[k];
            }
            break;
        }
        case Aggregation::RootSumSq: {
            double s = 0.0;
            for (std::size_t k = 0; k < nterms; ++k) s += weight[k] * dist[k] * dist[k];
            value = std::sqrt(s);
            const double inv = 1.0 / std::max(value, geom::kGradEps);
            for (std::size_t k = 0; k < nterms; ++k) {
                dscale[k] = upstream * weight[k] * dist[k] * inv;
                if (terms_[k].weight_index >= 0)
                    g_scalars[terms_[k].weight_index] +=
                        upstream * 0.5 * dist[k] * dist[k] * inv * weight[k];
            }
            break;
        }
        case Aggregation::Max: {
            std::size_t best = 0;
            for (std::size_t k = 0; k < nterms; ++k) {
                const double v = weight[k] * dist[k];
                if (v > value) {
                    value = v;
                    best = k;
                }
            }
            dscale[best] = upstream * weight[best];
            if (terms_[best].weight_index >= 0)
                g_scalars[terms_[best].weight_index] += upstream * dist[best] * weight[best];
            break;
        }
    }

    // One coordinate pass per block with the three kind scales fused.
    for (std::size_t blk = 0; blk < block_first.size(); ++blk) {
        const std::size_t first = block_first[blk];
        const std::size_t last =
            blk + 1 < block_first.size() ? block_first[blk + 1] : nterms;
        double se = 0.0, ss = 0.0, sh = 0.0;
        for (std::size_t k = first; k < last; ++k) {
            switch (terms_[k].kind) {
                case SpaceKind::Euclidean: se += dscale[k]; break;
                case SpaceKind::Spherical: ss += dscale[k]; break;
                case SpaceKind::Hyperbolic: sh += dscale[k]; break;
            }
        }
        if (se == 0.0 && ss == 0.0 && sh == 0.0) continue;
        const int b = terms_[first].begin, e = terms_[first].end;
        geom::accumulate_grads(x.subspan(b, e - b), y.subspan(b, e - b), sums[blk], se, ss,
                               sh, gx.subspan(b, e - b), gy.subspan(b, e - b));
    }
    return value;
}

}  // namespace ovle
