#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "affwalk/walk.hpp"

namespace affwalk {

// One certified component of a walk exit point: a stabilized digit window
// at a finite place, or a bracketing interval at the infinite place, plus
// the exact rational stand-in (the terminal partial sum) used downstream.
struct BoundaryComponent {
    std::optional<DigitWindow> digits;                   // finite places
    std::optional<std::pair<double, double>> interval;   // infinite place
    Rational value;
};

// Approximation of the exit point, one component per contracting place.
// Finite-place digits were identical over the last `confirmation_window`
// checkpoints; the interval is the oscillation bracket over that window.
struct BoundaryPoint {
    std::map<Place, BoundaryComponent> components;
    int confirmation_window = 0;
    long horizon_used = 0;

    std::map<Place, Rational> values() const;
};

struct BoundaryOptions {
    long checkpoint_stride = 64;
    int confirmation_window = 8;
};

// ConvergenceError carrying the best-effort approximation reached at the
// horizon.
class BoundaryConvergenceError : public ConvergenceError {
public:
    BoundaryConvergenceError(const std::string& what, BoundaryPoint best)
        : ConvergenceError(what), best_effort(std::move(best)) {}
    BoundaryPoint best_effort;
};

// Runs the walk until, at every contracting place, the leading `precision`
// digits (resp. the partial-sum oscillation, below 2^-precision) were
// stable across the confirmation window of checkpoints. Throws
// BoundaryConvergenceError when max_horizon is reached first. A measure
// with no contracting places yields an empty component map.
BoundaryPoint approximate_boundary_point(const MeasureSpec& spec,
                                         WalkSeed seed, long precision,
                                         long max_horizon,
                                         const BoundaryOptions& opts = {});

// Histogram of exit-point approximations over the balls of radius
// p^-resolution (canonical disc centers) or the dyadic cells of width
// 2^-resolution (left endpoints) at the infinite place. Non-converged
// samples are counted as skipped, never mixed into the histogram.
struct EmpiricalExitLaw {
    Place place = Place::infinity();
    long resolution = 0;
    std::map<Rational, long> histogram;
    long total = 0;
    long skipped = 0;
};

EmpiricalExitLaw empirical_exit_law(const MeasureSpec& spec, long seeds,
                                    Place place, long resolution,
                                    long max_horizon,
                                    std::uint64_t master_seed = 0,
                                    unsigned jobs = 1,
                                    const BoundaryOptions& opts = {});

// A bounded test function on the exit space: a finite sum of rational
// multiples of ball indicators and constants. Textual form:
//
//   const(c)
//   ball(place, center, radius_exponent)   -- |x - center|_place <= place^-r
//                                             (2^-r at the infinite place)
//   q * term, term + term
//
// A ball over a place with no component evaluates to 0.
class BoundaryFunction {
public:
    struct Ball {
        Place place = Place::infinity();
        Rational center;
        long radius_exponent = 0;
    };
    struct Term {
        Rational coefficient;
        std::optional<Ball> ball;  // absent: constant term
    };

    static BoundaryFunction parse(std::string_view text);
    static BoundaryFunction constant(const Rational& c);

    Rational evaluate(const std::map<Place, Rational>& point) const;
    Rational constant_part() const;
    const std::vector<Term>& terms() const { return terms_; }
    void validate_places(const PrimeContext& ctx) const;
    std::string str() const;

private:
    std::vector<Term> terms_;
};

// Exit-point samples drawn from consecutive streams of one master seed;
// reusing a batch across group elements gives common random numbers.
struct BoundarySampleBatch {
    std::vector<std::map<Place, Rational>> points;
    long skipped = 0;
};

BoundarySampleBatch sample_boundary_batch(const MeasureSpec& spec,
                                          std::uint64_t master_seed,
                                          long count, long precision,
                                          long max_horizon, unsigned jobs = 1,
                                          const BoundaryOptions& opts = {});

struct HarmonicEstimate {
    double value = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(samples)
    long samples = 0;
    long skipped = 0;
};

// Monte Carlo estimate of the boundary integral of psi(g . x) over the
// sampled exit law.
HarmonicEstimate evaluate_harmonic(const MeasureSpec& spec,
                                   const BoundaryFunction& psi,
                                   const GroupElement& g,
                                   const BoundarySampleBatch& batch);

HarmonicEstimate evaluate_harmonic(const MeasureSpec& spec,
                                   const BoundaryFunction& psi,
                                   const GroupElement& g, long samples,
                                   long max_horizon,
                                   std::uint64_t master_seed = 0,
                                   long precision = 24, unsigned jobs = 1,
                                   const BoundaryOptions& opts = {});

// Mean-value defect f(g) - sum_h mu(h) f(g h) estimated on one batch
// (common random numbers); std_error is that of the per-sample defect.
struct ResidualEstimate {
    double residual = 0.0;
    double std_error = 0.0;
    long samples = 0;
};

ResidualEstimate harmonicity_residual(const MeasureSpec& spec,
                                      const BoundaryFunction& psi,
                                      const GroupElement& g,
                                      const BoundarySampleBatch& batch);

}  // namespace affwalk
