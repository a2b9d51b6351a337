#include "affwalk/walk.hpp"

namespace affwalk {

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

AtomSampler::AtomSampler(const MeasureSpec& spec) {
    upper_.reserve(spec.atoms().size());
    Rational cum(0);
    for (const Atom& atom : spec.atoms()) {
        cum += atom.weight;
        // exclusive threshold ceil(cum * 2^64)
        Integer scaled = cum.get_num();
        scaled <<= 64;
        Integer t;
        mpz_cdiv_q(t.get_mpz_t(), scaled.get_mpz_t(),
                   cum.get_den().get_mpz_t());
        unsigned __int128 value;
        if (mpz_sizeinbase(t.get_mpz_t(), 2) > 64) {
            value = static_cast<unsigned __int128>(1) << 64;
        } else {
            Integer low = t;
            Integer high = t >> 32;
            value = static_cast<unsigned __int128>(
                        mpz_get_ui(high.get_mpz_t()))
                    << 32;
            Integer rem = low - (high << 32);
            value |= mpz_get_ui(rem.get_mpz_t());
        }
        upper_.push_back(value);
    }
}

std::size_t AtomSampler::operator()(std::mt19937_64& rng) const {
    unsigned __int128 u = rng();
    for (std::size_t i = 0; i + 1 < upper_.size(); ++i) {
        if (u < upper_[i]) return i;
    }
    return upper_.size() - 1;
}

namespace {

std::size_t rational_bits(const Rational& q) {
    return mpz_sizeinbase(q.get_num().get_mpz_t(), 2) +
           mpz_sizeinbase(q.get_den().get_mpz_t(), 2);
}

void check_budget(const GroupElement& g, const WalkLimits& limits, long step) {
    if (rational_bits(g.a()) > limits.max_rational_bits ||
        rational_bits(g.b()) > limits.max_rational_bits) {
        throw ResourceError("walk product exceeded " +
                            std::to_string(limits.max_rational_bits) +
                            " bits at step " + std::to_string(step));
    }
}

}  // namespace

WalkEngine::WalkEngine(const MeasureSpec& spec, std::uint64_t engine_seed,
                       WalkLimits limits)
    : spec_(&spec), sampler_(spec), rng_(engine_seed),
      current_(GroupElement::identity()), limits_(limits) {}

const GroupElement& WalkEngine::step() {
    const Atom& atom = spec_->atoms()[sampler_(rng_)];
    current_ = multiply(current_, atom.element);
    ++step_;
    check_budget(current_, limits_, step_);
    return atom.element;
}

const GroupElement& Trajectory::product_at(long n) const {
    if (n >= 0) return products.at(static_cast<std::size_t>(n));
    return past_products.at(static_cast<std::size_t>(-n - 1));
}

const GroupElement& Trajectory::increment_at(long n) const {
    if (n >= 1) return increments.at(static_cast<std::size_t>(n - 1));
    return past_increments.at(static_cast<std::size_t>(-n));
}

Trajectory run_walk(const MeasureSpec& spec, WalkSeed seed, long horizon,
                    WalkLimits limits) {
    Trajectory traj;
    traj.products.reserve(static_cast<std::size_t>(horizon) + 1);
    traj.increments.reserve(static_cast<std::size_t>(horizon));
    traj.products.push_back(GroupElement::identity());
    WalkEngine engine(spec, splitmix64_at(derive_stream_seed(seed), 0), limits);
    for (long n = 1; n <= horizon; ++n) {
        traj.increments.push_back(engine.step());
        traj.products.push_back(engine.current());
    }
    return traj;
}

Trajectory run_bilateral(const MeasureSpec& spec, WalkSeed seed, long past,
                         long future, WalkLimits limits) {
    Trajectory traj = run_walk(spec, seed, future, limits);
    traj.past_increments.reserve(static_cast<std::size_t>(past));
    traj.past_products.reserve(static_cast<std::size_t>(past));
    AtomSampler sampler(spec);
    std::mt19937_64 rng(splitmix64_at(derive_stream_seed(seed), 1));
    GroupElement current = GroupElement::identity();
    for (long m = 1; m <= past; ++m) {
        // increment into time -m+1; the product picks up its inverse
        const Atom& atom = spec.atoms()[sampler(rng)];
        traj.past_increments.push_back(atom.element);
        current = multiply(current, inverse(atom.element));
        check_budget(current, limits, -m);
        traj.past_products.push_back(current);
    }
    return traj;
}

std::vector<double> sublinearity_series(const Trajectory& traj, Place place) {
    std::vector<double> out;
    out.reserve(traj.products.size() - 1);
    for (std::size_t n = 1; n < traj.products.size(); ++n) {
        double v = log_plus_norm(traj.products[n].b(), place);
        out.push_back(v / static_cast<double>(n));
    }
    return out;
}

}  // namespace affwalk
