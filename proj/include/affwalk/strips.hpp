#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "affwalk/walk.hpp"

namespace affwalk {

// Target point of a completion of the rationals at one place, represented
// by an exact rational stand-in (the context integers are dense in every
// completion, and walk endpoints are approximated by their partial sums).
struct BoundaryTarget {
    Place place = Place::infinity();
    Rational value;
};

// A pair of boundary targets driving strip membership: one target per
// expanding place (the exit point of the reversed walk) and one per
// contracting place (the exit point of the forward walk). Centered places
// carry no target.
class StripQuery {
public:
    static StripQuery from_targets(const DriftReport& report,
                                   std::map<Place, Rational> reflected,
                                   std::map<Place, Rational> forward);

    const std::map<Place, Rational>& reflected_targets() const {
        return reflected_;
    }
    const std::map<Place, Rational>& forward_targets() const { return forward_; }

    // All targeted places with their targets (both directions).
    std::map<Place, Rational> all_targets() const;

private:
    std::map<Place, Rational> reflected_;
    std::map<Place, Rational> forward_;
};

// True iff |z - b|_place <= |a|_place, i.e. g lies in the cone with vertex z.
bool cone_contains(Place place, const Rational& z, const GroupElement& g);

// Conjunction of the cone conditions over every targeted place.
bool strip_contains(const StripQuery& q, const GroupElement& g);

// The set {b in Z(P) : |z_p - b|_p <= 1 for every place}, which always has
// 2 or 3 elements. Requires one target per place (finite primes and the
// infinite place). Computed by combining the finite-place congruences into
// an arithmetic progression and cutting it with the real interval.
std::vector<Rational> enumerate_ball_points(
    const PrimeContext& ctx, const std::map<Place, Rational>& targets);

// Window sets used to meter the walk:
//  - WalkWindow: unit exponents bounded by rate*n, centered translation
//    norms bounded by the slack schedule (visited with high probability);
//  - FullWindow: same, with the translation bound at every place;
//  - Section: trivial unit part and translation norm <= 1 at centered places.
enum class WindowKind { WalkWindow, FullWindow, Section };

struct WindowParams {
    double rate = 1.0;  // bound on |ln|a|_p| per unit time; must exceed
                        // every finite-place |drift|
    long n = 0;

    // Pinned slack schedule: the centered-translation bound at time n is
    // translation_bound(n) = n^(3/4), i.e. eps_n * n with eps_n = n^(-1/4).
    static double epsilon(long n);
    static double translation_bound(long n);

    // rate = 1 + 2 * max over all places of |drift|.
    static WindowParams recommended(const DriftReport& report, long n);

    void validate(const DriftReport& report) const;
};

bool window_contains(WindowKind kind, const GroupElement& g,
                     const WindowParams& params, const DriftReport& report);

struct EnumerationLimits {
    std::size_t max_unit_box = 4'000'000;   // sign-counted unit candidates
    std::size_t max_points = 20'000'000;    // emitted elements
};

// All group elements of the strip that lie in the walk window at time
// params.n, enumerated by iterating the unit over the exponent box the
// window allows and listing the finitely many admissible translations per
// unit. Every emitted element passes the exact membership predicates.
std::vector<GroupElement> enumerate_strip_window(
    const StripQuery& q, const WindowParams& params, const DriftReport& report,
    const PrimeContext& ctx, const EnumerationLimits& limits = {});

// Exact number of translations (resp. units) whose norm is at most m at
// every place. m >= 1.
enum class LatticeKind { Translations, Units };
Integer count_lattice_ball(const PrimeContext& ctx, LatticeKind kind,
                           const Rational& m,
                           const EnumerationLimits& limits = {});

struct CensusRow {
    long n = 0;
    double hit_frequency = 0.0;        // empirical P[R_n in walk window]
    double mean_strip_count = 0.0;     // mean over sampled target pairs
    double mean_log_count_over_n = 0.0;
};

struct CensusReport {
    std::vector<CensusRow> rows;
    double fitted_unit_growth = 0.0;  // slope of ln(count) against ln(n)
    double min_hit_frequency = 0.0;
    long pairs = 0;
    long walk_seeds = 0;
    bool degenerate = false;  // no targeted places: counts are full-window counts
};

struct CensusOptions {
    std::uint64_t master_seed = 0;
    long pairs = 20;           // sampled bilateral target pairs
    long walk_seeds = 200;     // streams for the hit-frequency estimate
    long target_horizon = 512; // bilateral horizon approximating endpoints
    unsigned jobs = 1;
    WalkLimits walk_limits;
    EnumerationLimits enumeration_limits;
};

// Empirical check of the strip-growth hypotheses: per n, the frequency of
// the walk visiting its window and the strip cardinality inside the window
// for target pairs sampled from bilateral walks. When every place is
// centered the strip is the whole group and the count column reports the
// full-window cardinality instead.
CensusReport strip_census(const MeasureSpec& spec, double rate,
                          const std::vector<long>& n_list,
                          const CensusOptions& opts);

}  // namespace affwalk
