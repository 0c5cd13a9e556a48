#include "ovle/signature.hpp"

#include <cctype>
#include <cstdio>

namespace ovle {

int Signature::weight_count() const {
    switch (variant) {
        case Variant::Overlay:
            return 3 * ((2 << depth) - 1);
        case Variant::Dot:
        case Variant::ExpDot:
            return 1;
        case Variant::Single:
        case Variant::Product: {
            int c = 0;
            for (const Factor& f : factors)
                if (f.kind != SpaceKind::Euclidean) ++c;
            return c;
        }
    }
    return 0;
}

namespace {

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    bool done() const { return pos_ >= text_.size(); }
    std::size_t pos() const { return pos_; }

    char peek_upper() const {
        return done() ? '\0' : static_cast<char>(std::toupper(static_cast<unsigned char>(text_[pos_])));
    }

    bool eat(char upper) {
        if (peek_upper() == upper) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("signature syntax error at position " + std::to_string(pos_) +
                          ": " + what);
    }

    int integer() {
        if (done() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            fail("expected integer");
        long v = 0;
        while (!done() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + (text_[pos_] - '0');
            if (v > 1'000'000) fail("integer too large");
            ++pos_;
        }
        return static_cast<int>(v);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

Factor make_factor(SpaceKind kind, int dim, const Cursor& cur) {
    if (dim < 1) cur.fail("factor dimension must be >= 1");
    return {kind, dim, kind == SpaceKind::Spherical ? dim + 1 : dim};
}

std::string canonical_product(const std::vector<Factor>& factors) {
    std::string out;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) out += 'x';
        out += space_kind_char(factors[i].kind);
        out += std::to_string(factors[i].dim);
    }
    return out;
}

}  // namespace

Signature parse_signature(std::string_view text, int d) {
    if (d < 1) throw ConfigError("signature: ambient dimension must be >= 1");
    Cursor cur(text);
    Signature sig;
    sig.ambient_dim = d;

    const char head = cur.peek_upper();
    if (head == 'O' || head == 'D') {
        // Try "OL<agg>:t=<int>", "DOT", "EXPDOT".
        if (head == 'O') {
            cur.eat('O');
            if (!cur.eat('L')) cur.fail("expected \"OL\"");
            if (cur.eat('0'))
                sig.agg = Aggregation::Max;
            else if (cur.eat('1'))
                sig.agg = Aggregation::Sum;
            else if (cur.eat('2'))
                sig.agg = Aggregation::RootSumSq;
            else
                cur.fail("expected aggregation 0, 1 or 2");
            if (!cur.eat(':') || !cur.eat('T') || !cur.eat('='))
                cur.fail("expected \":t=\"");
            sig.depth = cur.integer();
            if (!cur.done()) cur.fail("trailing input");
            sig.variant = Signature::Variant::Overlay;
            if ((1 << sig.depth) > d)
                throw ConfigError("signature: overlay depth " + std::to_string(sig.depth) +
                                  " needs d >= " + std::to_string(1 << sig.depth));
            const char agg_char = sig.agg == Aggregation::Max ? '0'
                                  : sig.agg == Aggregation::Sum ? '1'
                                                                : '2';
            sig.text = std::string("OL") + agg_char + ":t=" + std::to_string(sig.depth);
            return sig;
        }
        cur.eat('D');
        if (cur.eat('O') && cur.eat('T') && cur.done()) {
            sig.variant = Signature::Variant::Dot;
            sig.text = "DOT";
            return sig;
        }
        cur.fail("expected \"DOT\"");
    }
    if (head == 'E' && std::toupper(static_cast<unsigned char>(text.size() > 1 ? text[1] : '\0')) == 'X') {
        Cursor c2(text);
        for (char ch : {'E', 'X', 'P', 'D', 'O', 'T'})
            if (!c2.eat(ch)) c2.fail("expected \"EXPDOT\"");
        if (!c2.done()) c2.fail("trailing input");
        sig.variant = Signature::Variant::ExpDot;
        sig.text = "EXPDOT";
        return sig;
    }

    // Product grammar: term ("x" term)*, term := single ("^" INT)?
    while (true) {
        SpaceKind kind;
        if (cur.eat('E'))
            kind = SpaceKind::Euclidean;
        else if (cur.eat('S'))
            kind = SpaceKind::Spherical;
        else if (cur.eat('H'))
            kind = SpaceKind::Hyperbolic;
        else
            cur.fail("expected space kind E, S or H");
        int dim = cur.integer();
        int repeat = 1;
        if (cur.eat('^')) {
            repeat = cur.integer();
            if (repeat < 1) cur.fail("power must be >= 1");
        }
        for (int r = 0; r < repeat; ++r) sig.factors.push_back(make_factor(kind, dim, cur));
        if (cur.done()) break;
        if (!cur.eat('X')) cur.fail("expected \"x\" between factors");
    }

    int total = 0;
    for (const Factor& f : sig.factors) total += f.ambient;
    if (total != d)
        throw ConfigError("signature \"" + std::string(text) + "\": ambient dimensions sum to " +
                          std::to_string(total) + ", expected d=" + std::to_string(d));
    sig.variant = sig.factors.size() == 1 ? Signature::Variant::Single
                                          : Signature::Variant::Product;
    sig.text = canonical_product(sig.factors);
    return sig;
}

}  // namespace ovle
