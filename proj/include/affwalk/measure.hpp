#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "affwalk/group.hpp"

namespace affwalk {

// One atom of a finitely supported measure, before validation.
struct RawAtom {
    Rational a;
    Rational b;
    Rational weight;
};

struct Atom {
    GroupElement element;
    Rational weight;
};

// A finitely supported probability measure on the affine group of a prime
// context. Immutable after validation: atoms are pairwise distinct, sorted
// canonically, with positive exact weights summing to one.
class MeasureSpec {
public:
    const PrimeContext& context() const { return ctx_; }
    const std::vector<Atom>& atoms() const { return atoms_; }

private:
    friend MeasureSpec validate_measure(const std::vector<RawAtom>&,
                                        std::optional<PrimeContext>);
    MeasureSpec(PrimeContext ctx, std::vector<Atom> atoms)
        : ctx_(std::move(ctx)), atoms_(std::move(atoms)) {}

    PrimeContext ctx_;
    std::vector<Atom> atoms_;
};

// Validates and canonicalizes a raw atom list: merges duplicate support
// points, checks weights are positive and sum to exactly 1, and checks
// membership of every atom in the group of the context. When no context is
// supplied the minimal prime set covering all atoms is inferred; a supplied
// context must cover it.
MeasureSpec validate_measure(const std::vector<RawAtom>& atoms,
                             std::optional<PrimeContext> ctx = std::nullopt);

enum class DriftClass {
    Boundary,   // contracting in mean at this place (negative drift)
    Reflected,  // expanding in mean (negative drift for the reflected measure)
    Centered,   // zero drift
};

// Per-place drift data. The expected valuations e_p are exact rationals and
// all sign classification is decided from them (for the infinite place,
// from an exact comparison of the corresponding unit product with 1), never
// from the floating drift values.
struct DriftReport {
    std::map<unsigned long, Rational> expected_valuations;  // e_p, finite p
    std::map<Place, double> drifts;                         // all places
    std::vector<Place> boundary_places;
    std::vector<Place> reflected_boundary_places;
    std::vector<Place> centered_places;
    int infinity_sign = 0;  // exact sign of the infinite-place drift

    DriftClass classify(Place place) const;
    bool is_boundary(Place place) const {
        return classify(place) == DriftClass::Boundary;
    }
    // Coefficient of ln p in the infinite-place drift; by the norm product
    // identity this equals e_p, so the coefficients of the drift relation
    // cancel exactly.
    const std::map<unsigned long, Rational>& infinity_coefficients() const {
        return expected_valuations;
    }
    double max_abs_drift_finite() const;
    double max_abs_drift() const;
};

// Drifts at every place: at a finite p the drift is -e_p ln p with
// e_p = E[v_p(a)] computed exactly; the infinite-place drift is
// sum_p e_p ln p, its sign decided exactly.
DriftReport drift_vector(const MeasureSpec& spec);

// Image of the measure under group inversion; drives the negative-time walk.
MeasureSpec reflect(const MeasureSpec& spec);

// Measure config file format (structured key/value text):
//
//   primes = [2, 3]          # optional; inferred when absent
//   atoms = [
//     {a = "2", b = "0", w = "1/2"},
//     {a = "1/2", b = "3/4", w = "1/2"},
//   ]
//
// Rationals use the "num/den" form; float literals are rejected.
MeasureSpec parse_measure_config(std::string_view text);
MeasureSpec load_measure_config(const std::string& path);

}  // namespace affwalk
