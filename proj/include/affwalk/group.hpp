#pragma once

#include <map>
#include <string>
#include <string_view>

#include "affwalk/arith.hpp"

namespace affwalk {

// An affine map x -> a*x + b with a a signed unit of the prime context and
// b a context integer. The validating constructor enforces membership
// eagerly; `trusted` skips the check for values produced by the group law
// itself (the group is closed under composition and inversion).
class GroupElement {
public:
    GroupElement(const Rational& a, const Rational& b, const PrimeContext& ctx);

    static GroupElement identity() { return GroupElement(Rational(1), Rational(0)); }
    static GroupElement trusted(Rational a, Rational b);

    const Rational& a() const { return a_; }
    const Rational& b() const { return b_; }

    std::string str() const;  // "(a,b)" with rational components
    static GroupElement parse(std::string_view text, const PrimeContext& ctx);

    friend bool operator==(const GroupElement&, const GroupElement&) = default;

private:
    GroupElement(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {}
    Rational a_;
    Rational b_;
};

// Composition (g h)(x) = g(h(x)): (a,b)(a',b') = (a a', a b' + b).
GroupElement multiply(const GroupElement& g, const GroupElement& h);
inline GroupElement operator*(const GroupElement& g, const GroupElement& h) {
    return multiply(g, h);
}

// (a,b)^(-1) = (1/a, -b/a).
GroupElement inverse(const GroupElement& g);

// g(x) = a*x + b.
Rational act_rational(const GroupElement& g, const Rational& x);

// Total order on elements (lexicographic on (a, b)); used to emit
// enumerations deterministically.
bool element_less(const GroupElement& g, const GroupElement& h);

// Decomposition of a unit as sign * product p^k_p over the context primes.
struct UnitDecomposition {
    int sign = 1;
    std::map<unsigned long, long> exponents;  // one entry per context prime

    Rational reconstruct() const;
};

UnitDecomposition unit_decompose(const Rational& a, const PrimeContext& ctx);

// Point of the hyperbolic half-plane model {(x, y) : x > 0}.
struct HalfPlanePoint {
    Rational x;
    Rational y;

    friend bool operator==(const HalfPlanePoint&, const HalfPlanePoint&) = default;
};

// (a,b).(x,y) = (|a| x, a y + b); an isometric action.
HalfPlanePoint act_halfplane(const GroupElement& g, const HalfPlanePoint& pt);

// Vertex of the (p+1)-regular disc tree: the disc of radius p^level with
// canonical center (digits zeroed at exponents >= -level), so vertex
// equality is structural equality.
class TreeVertex {
public:
    TreeVertex(unsigned long prime, long level, const Rational& center);

    unsigned long prime() const { return prime_; }
    long level() const { return level_; }
    const Rational& center() const { return center_; }

    // Disc containment (this contains other).
    bool contains(const TreeVertex& other) const;

    TreeVertex parent() const { return TreeVertex(prime_, level_ + 1, center_); }

    std::string label() const;  // "p:level:center", stable plot key

    friend bool operator==(const TreeVertex&, const TreeVertex&) = default;

private:
    unsigned long prime_;
    long level_;
    Rational center_;  // canonical representative
};

// (a,b) maps the disc of radius p^k around z onto the disc of radius
// p^(k - v_p(a)) around a z + b.
TreeVertex act_tree(const GroupElement& g, const TreeVertex& v);

// Image of the base point under g in the product of the half-plane and the
// disc trees: ((|a|, b), (disc of radius p^(v_p(a)) around b)_p). The sign
// of a collapses; two elements share an orbit point iff they differ by the
// right factor (-1, 0).
struct OrbitPoint {
    HalfPlanePoint half_plane;
    std::map<unsigned long, TreeVertex> tree_vertices;

    friend bool operator==(const OrbitPoint&, const OrbitPoint&) = default;
};

OrbitPoint embed_orbit(const GroupElement& g, const PrimeContext& ctx);

}  // namespace affwalk
