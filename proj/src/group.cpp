#include "affwalk/group.hpp"

#include <algorithm>

namespace affwalk {

GroupElement::GroupElement(const Rational& a, const Rational& b,
                           const PrimeContext& ctx)
    : a_(a), b_(b) {
    if (sgn(a_) == 0) {
        throw DomainError("linear coefficient must be nonzero");
    }
    if (!is_unit(a_, ctx)) {
        throw DomainError("linear coefficient " + to_string(a_) +
                          " is not a unit of the prime context");
    }
    if (!in_ZP(b_, ctx)) {
        throw DomainError("translation " + to_string(b_) +
                          " is not a context integer");
    }
}

GroupElement GroupElement::trusted(Rational a, Rational b) {
    if (sgn(a) == 0) {
        throw DomainError("linear coefficient must be nonzero");
    }
    return GroupElement(std::move(a), std::move(b));
}

std::string GroupElement::str() const {
    return "(" + to_string(a_) + "," + to_string(b_) + ")";
}

GroupElement GroupElement::parse(std::string_view text, const PrimeContext& ctx) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(),
                           [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.size() < 5 || s.front() != '(' || s.back() != ')') {
        throw ValidationError("bad group element: '" + std::string(text) + "'");
    }
    s = s.substr(1, s.size() - 2);
    auto comma = s.find(',');
    if (comma == std::string::npos) {
        throw ValidationError("bad group element: '" + std::string(text) + "'");
    }
    return GroupElement(parse_rational(s.substr(0, comma)),
                        parse_rational(s.substr(comma + 1)), ctx);
}

GroupElement multiply(const GroupElement& g, const GroupElement& h) {
    return GroupElement::trusted(g.a() * h.a(), g.a() * h.b() + g.b());
}

GroupElement inverse(const GroupElement& g) {
    Rational ainv = 1 / g.a();
    return GroupElement::trusted(ainv, -g.b() * ainv);
}

Rational act_rational(const GroupElement& g, const Rational& x) {
    return g.a() * x + g.b();
}

bool element_less(const GroupElement& g, const GroupElement& h) {
    int c = cmp(g.a(), h.a());
    if (c != 0) return c < 0;
    return cmp(g.b(), h.b()) < 0;
}

Rational UnitDecomposition::reconstruct() const {
    Rational out(sign);
    for (const auto& [p, k] : exponents) out *= rational_pow(p, k);
    return out;
}

UnitDecomposition unit_decompose(const Rational& a, const PrimeContext& ctx) {
    if (!is_unit(a, ctx)) {
        throw DomainError("not a unit of the prime context: " + to_string(a));
    }
    UnitDecomposition d;
    d.sign = sgn(a) < 0 ? -1 : 1;
    for (unsigned long p : ctx.primes()) {
        d.exponents[p] = *valuation(a, p);
    }
    return d;
}

HalfPlanePoint act_halfplane(const GroupElement& g, const HalfPlanePoint& pt) {
    return HalfPlanePoint{abs(g.a()) * pt.x, g.a() * pt.y + g.b()};
}

TreeVertex::TreeVertex(unsigned long prime, long level, const Rational& center)
    : prime_(prime), level_(level),
      center_(canonical_disc_center(prime, level, center)) {}

bool TreeVertex::contains(const TreeVertex& other) const {
    if (prime_ != other.prime_ || level_ < other.level_) return false;
    Rational diff = center_ - other.center_;
    if (sgn(diff) == 0) return true;
    return *valuation(diff, prime_) >= -level_;
}

std::string TreeVertex::label() const {
    return std::to_string(prime_) + ":" + std::to_string(level_) + ":" +
           to_string(center_);
}

TreeVertex act_tree(const GroupElement& g, const TreeVertex& v) {
    long shift = *valuation(g.a(), v.prime());
    return TreeVertex(v.prime(), v.level() - shift,
                      act_rational(g, v.center()));
}

OrbitPoint embed_orbit(const GroupElement& g, const PrimeContext& ctx) {
    OrbitPoint pt;
    pt.half_plane = HalfPlanePoint{abs(g.a()), g.b()};
    for (unsigned long p : ctx.primes()) {
        long v = *valuation(g.a(), p);
        pt.tree_vertices.emplace(p, TreeVertex(p, -v, g.b()));
    }
    return pt;
}

}  // namespace affwalk
