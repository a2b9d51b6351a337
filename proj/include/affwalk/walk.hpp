#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "affwalk/measure.hpp"

namespace affwalk {

// Seed of one trajectory stream. The per-stream seed derives from
// (master_seed, stream_index) through the pinned mixing function below;
// distinct stream indices give independent streams.
struct WalkSeed {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

// SplitMix64 output function at position `index` of the stream seeded by
// `seed`. This is the project's only seed-derivation primitive and is part
// of the reproducibility contract (see README); changing it is a breaking
// change.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index);

inline std::uint64_t derive_stream_seed(WalkSeed seed) {
    return splitmix64_at(seed.master_seed, seed.stream_index);
}

struct WalkLimits {
    // Budget on numerator+denominator size of any product component.
    std::size_t max_rational_bits = 10'000'000;
};

// Samples atom indices with exact cumulative-weight thresholds: a 64-bit
// uniform draw u maps to the rational u / 2^64 in [0,1) and the atom whose
// cumulative interval contains it is selected.
class AtomSampler {
public:
    explicit AtomSampler(const MeasureSpec& spec);
    std::size_t operator()(std::mt19937_64& rng) const;

private:
    std::vector<unsigned __int128> upper_;  // exclusive thresholds
};

// A walk path with exact products. Index 0 of `products` is the identity;
// bilateral paths also carry the negative-time products, whose law is the
// walk of the reflected measure.
struct Trajectory {
    std::vector<GroupElement> increments;       // steps into times 1..N
    std::vector<GroupElement> products;         // times 0..N
    std::vector<GroupElement> past_increments;  // steps into times 0, -1, ...
    std::vector<GroupElement> past_products;    // times -1..-M

    long future_horizon() const { return static_cast<long>(increments.size()); }
    long past_horizon() const { return static_cast<long>(past_products.size()); }

    // Product at signed time n in [-M, N].
    const GroupElement& product_at(long n) const;
    // Increment into signed time n in [-M+1, N].
    const GroupElement& increment_at(long n) const;
};

// Incremental seeded walk sharing the sampling scheme of run_walk; useful
// when only a running product is needed.
class WalkEngine {
public:
    WalkEngine(const MeasureSpec& spec, std::uint64_t engine_seed,
               WalkLimits limits = {});

    // Samples the next increment, updates the product, returns the increment.
    const GroupElement& step();
    const GroupElement& current() const { return current_; }
    long steps_taken() const { return step_; }

private:
    const MeasureSpec* spec_;
    AtomSampler sampler_;
    std::mt19937_64 rng_;
    GroupElement current_;
    long step_ = 0;
    WalkLimits limits_;
};

// Unilateral walk of length `horizon`; deterministic given the seed, with
// i.i.d. increments of the measure. Throws ResourceError if a product
// component exceeds the bit budget.
Trajectory run_walk(const MeasureSpec& spec, WalkSeed seed, long horizon,
                    WalkLimits limits = {});

// Bilateral walk: `future` forward steps plus `past` negative-time steps
// driven by an independent substream; the negative-time products form a
// walk of the reflected measure.
Trajectory run_bilateral(const MeasureSpec& spec, WalkSeed seed, long past,
                         long future, WalkLimits limits = {});

// The sequence (1/n) max(0, ln|Z_n|_place) for n = 1..N over the forward
// products (A_n, Z_n); zero translations contribute 0.
std::vector<double> sublinearity_series(const Trajectory& traj, Place place);

}  // namespace affwalk
