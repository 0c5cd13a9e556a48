#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ovle/common.hpp"
#include "ovle/geometry.hpp"

namespace ovle {

enum class Aggregation { Max, Sum, RootSumSq };  // l0, l1, l2

// A product factor.  `dim` is the dimension written in the signature text
// (the mathematical dimension); spherical factors store one extra ambient
// coordinate, so ambient = dim + 1 for S and ambient = dim for E/H.
struct Factor {
    SpaceKind kind;
    int dim;
    int ambient;
};

struct Signature {
    enum class Variant { Single, Product, Overlay, Dot, ExpDot };

    Variant variant = Variant::Single;
    int ambient_dim = 0;
    std::vector<Factor> factors;          // Single / Product
    int depth = 0;                        // Overlay
    Aggregation agg = Aggregation::Sum;   // Overlay
    std::string text;                     // normalized form

    // Overlay -> 3(2^{t+1}-1); Product -> non-Euclidean factors; Dot/ExpDot -> 1.
    int weight_count() const;
    bool has_offset() const { return variant == Variant::Dot || variant == Variant::ExpDot; }
    int scalar_count() const { return weight_count() + (has_offset() ? 1 : 0); }
    bool is_metric() const { return !has_offset(); }
};

// Grammar (case-insensitive):
//   single   := ("E"|"H"|"S") INT
//   product  := single ("x" single)* | single "^" INT
//   overlay  := "OL" ("0"|"1"|"2") ":t=" INT
//   dot      := "DOT" | "EXPDOT"
// The ambient dimensions of all factors must sum to d.
Signature parse_signature(std::string_view text, int d);

}  // namespace ovle
