#include "ovle/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ovle {

char space_kind_char(SpaceKind k) {
    switch (k) {
        case SpaceKind::Euclidean: return 'E';
        case SpaceKind::Spherical: return 'S';
        case SpaceKind::Hyperbolic: return 'H';
    }
    return '?';
}

namespace geom {

PairSums PairSums::compute(ConstSpan x, ConstSpan y) {
    PairSums s;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double a = x[i], b = y[i];
        const double diff = a - b;
        s.xx += a * a;
        s.yy += b * b;
        s.xy += a * b;
        s.dd += diff * diff;
    }
    return s;
}

double dist_euclidean_from(const PairSums& s) { return std::sqrt(s.dd); }

double dist_spherical_from(const PairSums& s) {
    const double nx = std::sqrt(s.xx), ny = std::sqrt(s.yy);
    if (nx == 0.0 || ny == 0.0)
        throw NumericError("spherical projection of a zero vector");
    // identical vectors must give exactly 0; sqrt(xx*yy) alone can round the
    // cosine a hair below 1 and leak a ~1e-8 distance into self pairs
    if (s.dd == 0.0) return 0.0;
    const double c = std::clamp(s.xy / (nx * ny), -1.0, 1.0);
    return std::acos(c);
}

double dist_hyperbolic_from(const PairSums& s) {
    // identical vectors must give exactly 0: sqrt(1+xx)^2 - xy rounds to
    // 1 +- 1ulp, and acosh amplifies that to a ~1e-8 jitter
    if (s.dd == 0.0) return 0.0;
    const double a = std::sqrt(1.0 + s.xx) * std::sqrt(1.0 + s.yy) - s.xy;
    return std::acosh(std::max(a, 1.0));
}

std::vector<double> map_spherical(ConstSpan x) {
    double norm2 = 0.0;
    for (double v : x) norm2 += v * v;
    if (norm2 == 0.0) throw NumericError("spherical projection of a zero vector");
    const double inv = 1.0 / std::sqrt(norm2);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * inv;
    return out;
}

std::vector<double> map_hyperbolic(ConstSpan x) {
    double norm2 = 0.0;
    for (double v : x) norm2 += v * v;
    std::vector<double> out(x.size() + 1);
    out[0] = std::sqrt(1.0 + norm2);
    std::copy(x.begin(), x.end(), out.begin() + 1);
    return out;
}

double dist_euclidean(ConstSpan x, ConstSpan y) {
    if (x.size() != y.size()) throw DataError("dist_euclidean: length mismatch");
    return dist_euclidean_from(PairSums::compute(x, y));
}

double dist_spherical(ConstSpan x, ConstSpan y) {
    if (x.size() != y.size()) throw DataError("dist_spherical: length mismatch");
    return dist_spherical_from(PairSums::compute(x, y));
}

double dist_hyperbolic(ConstSpan x, ConstSpan y) {
    if (x.size() != y.size()) throw DataError("dist_hyperbolic: length mismatch");
    return dist_hyperbolic_from(PairSums::compute(x, y));
}

double distance(SpaceKind kind, ConstSpan x, ConstSpan y) {
    switch (kind) {
        case SpaceKind::Euclidean: return dist_euclidean(x, y);
        case SpaceKind::Spherical: return dist_spherical(x, y);
        case SpaceKind::Hyperbolic: return dist_hyperbolic(x, y);
    }
    return 0.0;
}

void accumulate_grads(ConstSpan x, ConstSpan y, const PairSums& s, double scale_e,
                      double scale_s, double scale_h, Span gx, Span gy) {
    const std::size_t n = x.size();

    double ce = 0.0;
    if (scale_e != 0.0) {
        const double d = std::max(std::sqrt(s.dd), kGradEps);
        ce = scale_e / d;
    }

    // Spherical: d = acos(c), c = <x,y>/(|x||y|).
    // dc/dx = y/(|x||y|) - c x/|x|^2
    double cs_y = 0.0, cs_x = 0.0, cs_xg = 0.0, cs_yg = 0.0;
    if (scale_s != 0.0 && s.dd != 0.0) {  // zero subgradient at coincident points
        const double nx = std::sqrt(s.xx), ny = std::sqrt(s.yy);
        if (nx == 0.0 || ny == 0.0)
            throw NumericError("spherical projection of a zero vector");
        const double c = std::clamp(s.xy / (nx * ny), -1.0, 1.0);
        const double cr = std::clamp(c, -1.0 + kGradEps, 1.0 - kGradEps);
        const double dfac = -scale_s / std::sqrt(1.0 - cr * cr);
        cs_y = dfac / (nx * ny);        // coefficient of y in grad wrt x
        cs_x = -dfac * c / (nx * nx);   // coefficient of x in grad wrt x
        cs_xg = dfac / (nx * ny);       // coefficient of x in grad wrt y
        cs_yg = -dfac * c / (ny * ny);  // coefficient of y in grad wrt y
    }

    // Hyperbolic: d = acosh(a), a = sqrt(1+|x|^2) sqrt(1+|y|^2) - <x,y>.
    // da/dx = x sqrt(1+|y|^2)/sqrt(1+|x|^2) - y
    double ch_x = 0.0, ch_y = 0.0, ch_xg = 0.0, ch_yg = 0.0;
    if (scale_h != 0.0) {
        const double px = std::sqrt(1.0 + s.xx), py = std::sqrt(1.0 + s.yy);
        const double a = px * py - s.xy;
        const double ar = std::max(a, 1.0 + kGradEps);
        const double hfac = scale_h / std::sqrt(ar * ar - 1.0);
        ch_x = hfac * py / px;   // coefficient of x in grad wrt x
        ch_y = -hfac;            // coefficient of y in grad wrt x
        ch_yg = hfac * px / py;  // coefficient of y in grad wrt y
        ch_xg = -hfac;           // coefficient of x in grad wrt y
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double a = x[i], b = y[i];
        const double diff = a - b;
        gx[i] += ce * diff + cs_y * b + cs_x * a + ch_x * a + ch_y * b;
        gy[i] += -ce * diff + cs_xg * a + cs_yg * b + ch_yg * b + ch_xg * a;
    }
}

double distance_with_grad(SpaceKind kind, ConstSpan x, ConstSpan y, double scale,
                          Span gx, Span gy) {
    if (x.size() != y.size()) throw DataError("distance_with_grad: length mismatch");
    const PairSums s = PairSums::compute(x, y);
    double d = 0.0;
    switch (kind) {
        case SpaceKind::Euclidean:
            d = dist_euclidean_from(s);
            accumulate_grads(x, y, s, scale, 0.0, 0.0, gx, gy);
            break;
        case SpaceKind::Spherical:
            d = dist_spherical_from(s);
            accumulate_grads(x, y, s, 0.0, scale, 0.0, gx, gy);
            break;
        case SpaceKind::Hyperbolic:
            d = dist_hyperbolic_from(s);
            accumulate_grads(x, y, s, 0.0, 0.0, scale, gx, gy);
            break;
    }
    return d;
}

}  // namespace geom
}  // namespace ovle
