#include "affwalk/strips.hpp"

#include <algorithm>
#include <cmath>

#include "affwalk/parallel.hpp"

namespace affwalk {

namespace {

// Solution set of {b in Z(P) : v_p(b - c_p) >= t_p for every context prime}
// as an arithmetic progression offset + step * Z. Dividing through by
// gamma = prod p^{t_p} reduces to radius-one congruences, whose solutions
// are the integer translates of the combined fractional parts; gamma maps
// Z(P) onto itself, so scaling back gives the general solution.
struct Progression {
    Rational offset;
    Rational step;  // positive
};

struct Constraint {
    Rational center;
    long radius_exponent;  // t_p
};

Progression solve_translation_congruences(
    const PrimeContext& ctx, const std::map<unsigned long, Constraint>& cons) {
    Rational gamma(1);
    for (const auto& [p, c] : cons) gamma *= rational_pow(p, c.radius_exponent);
    Rational offset(0);
    for (const auto& [p, c] : cons) {
        Rational scaled = c.center / gamma;
        offset += canonical_disc_center(p, 0, scaled);
    }
    (void)ctx;
    return Progression{gamma * offset, gamma};
}

// floor(log_p m) for m >= 1: the largest e >= 0 with p^e <= m.
long floor_log(unsigned long p, const Rational& m) {
    long e = 0;
    Rational power(p);
    while (power <= m) {
        ++e;
        power *= static_cast<unsigned long>(p);
    }
    return e;
}

double safe_log(unsigned long p) { return std::log(static_cast<double>(p)); }

}  // namespace

StripQuery StripQuery::from_targets(const DriftReport& report,
                                    std::map<Place, Rational> reflected,
                                    std::map<Place, Rational> forward) {
    auto check = [](const std::vector<Place>& places,
                    const std::map<Place, Rational>& targets,
                    const char* which) {
        if (targets.size() != places.size()) {
            throw ValidationError(std::string("expected one ") + which +
                                  " target per place with that drift sign");
        }
        for (Place p : places) {
            if (!targets.count(p)) {
                throw ValidationError(std::string("missing ") + which +
                                      " target for place " + p.str());
            }
        }
    };
    check(report.reflected_boundary_places, reflected, "reflected");
    check(report.boundary_places, forward, "forward");
    StripQuery q;
    q.reflected_ = std::move(reflected);
    q.forward_ = std::move(forward);
    return q;
}

std::map<Place, Rational> StripQuery::all_targets() const {
    std::map<Place, Rational> out = reflected_;
    out.insert(forward_.begin(), forward_.end());
    return out;
}

bool cone_contains(Place place, const Rational& z, const GroupElement& g) {
    if (place.is_infinity()) {
        return abs(z - g.b()) <= abs(g.a());
    }
    Rational diff = z - g.b();
    if (sgn(diff) == 0) return true;
    return *valuation(diff, place.prime_value()) >=
           *valuation(g.a(), place.prime_value());
}

bool strip_contains(const StripQuery& q, const GroupElement& g) {
    for (const auto& [place, z] : q.reflected_targets()) {
        if (!cone_contains(place, z, g)) return false;
    }
    for (const auto& [place, z] : q.forward_targets()) {
        if (!cone_contains(place, z, g)) return false;
    }
    return true;
}

std::vector<Rational> enumerate_ball_points(
    const PrimeContext& ctx, const std::map<Place, Rational>& targets) {
    for (Place place : ctx.places()) {
        if (!targets.count(place)) {
            throw ValidationError("missing target for place " + place.str());
        }
    }
    if (targets.size() != ctx.size() + 1) {
        throw ValidationError("targets must cover exactly the context places");
    }

    std::map<unsigned long, Constraint> cons;
    for (unsigned long p : ctx.primes()) {
        cons[p] = Constraint{targets.at(Place::prime(p)), 0};
    }
    Progression prog = solve_translation_congruences(ctx, cons);

    const Rational& zinf = targets.at(Place::infinity());
    Integer kmin = ceil_rational((zinf - 1 - prog.offset) / prog.step);
    Integer kmax = floor_rational((zinf + 1 - prog.offset) / prog.step);

    std::vector<Rational> out;
    for (Integer k = kmin; k <= kmax; ++k) {
        Rational b = prog.offset + prog.step * Rational(k);
        bool ok = abs(zinf - b) <= 1;
        for (unsigned long p : ctx.primes()) {
            if (!ok) break;
            Rational diff = targets.at(Place::prime(p)) - b;
            ok = sgn(diff) == 0 || *valuation(diff, p) >= 0;
        }
        if (ok) out.push_back(std::move(b));
    }
    return out;
}

double WindowParams::epsilon(long n) {
    return n > 0 ? std::pow(static_cast<double>(n), -0.25) : 0.0;
}

double WindowParams::translation_bound(long n) {
    return n > 0 ? std::pow(static_cast<double>(n), 0.75) : 0.0;
}

WindowParams WindowParams::recommended(const DriftReport& report, long n) {
    return WindowParams{1.0 + 2.0 * report.max_abs_drift(), n};
}

void WindowParams::validate(const DriftReport& report) const {
    if (!(rate > report.max_abs_drift_finite())) {
        throw ValidationError(
            "window rate must exceed the largest finite-place |drift|");
    }
    if (n < 0) throw ValidationError("window index must be nonnegative");
}

bool window_contains(WindowKind kind, const GroupElement& g,
                     const WindowParams& params, const DriftReport& report) {
    if (kind == WindowKind::Section) {
        if (g.a() != 1) return false;
        for (Place place : report.centered_places) {
            if (pnorm(g.b(), place) > 1) return false;
        }
        return true;
    }

    double unit_cap = params.rate * static_cast<double>(params.n);
    for (const auto& [p, e] : report.expected_valuations) {
        (void)e;
        long v = *valuation(g.a(), p);
        if (std::fabs(static_cast<double>(v)) * safe_log(p) > unit_cap) {
            return false;
        }
    }

    double translation_cap = WindowParams::translation_bound(params.n);
    if (kind == WindowKind::WalkWindow) {
        for (Place place : report.centered_places) {
            if (log_plus_norm(g.b(), place) > translation_cap) return false;
        }
    } else {  // FullWindow: translation bound at every place
        for (const auto& [place, phi] : report.drifts) {
            (void)phi;
            if (log_plus_norm(g.b(), place) > translation_cap) return false;
        }
    }
    return true;
}

std::vector<GroupElement> enumerate_strip_window(
    const StripQuery& q, const WindowParams& params, const DriftReport& report,
    const PrimeContext& ctx, const EnumerationLimits& limits) {
    params.validate(report);
    const auto targets = q.all_targets();
    const long n = params.n;
    const double unit_cap = params.rate * static_cast<double>(n);
    const double translation_cap = WindowParams::translation_bound(n);

    const auto& primes = ctx.primes();
    std::vector<long> kmax(primes.size());
    std::size_t box = 2;  // sign factor
    for (std::size_t i = 0; i < primes.size(); ++i) {
        kmax[i] = static_cast<long>(
            std::floor(unit_cap / safe_log(primes[i]) + 1e-12));
        box *= static_cast<std::size_t>(2 * kmax[i] + 1);
        if (box > limits.max_unit_box) {
            throw ResourceError("unit exponent box exceeds limit");
        }
    }

    const bool inf_centered =
        report.classify(Place::infinity()) == DriftClass::Centered;

    std::vector<GroupElement> out;
    std::vector<long> k(primes.size(), 0);
    for (std::size_t i = 0; i < primes.size(); ++i) k[i] = -kmax[i];
    for (;;) {
        // positive unit magnitude for this exponent vector
        Rational unit(1);
        for (std::size_t i = 0; i < primes.size(); ++i) {
            unit *= rational_pow(primes[i], k[i]);
        }

        // translation congruences: cone radius |a|_p at targeted places,
        // the slack bound at centered places (one extra digit, the exact
        // predicates below are authoritative)
        std::map<unsigned long, Constraint> cons;
        for (std::size_t i = 0; i < primes.size(); ++i) {
            unsigned long p = primes[i];
            Place place = Place::prime(p);
            if (auto it = targets.find(place); it != targets.end()) {
                cons[p] = Constraint{it->second, k[i]};
            } else {
                long t = static_cast<long>(
                    std::ceil(-translation_cap / safe_log(p))) - 1;
                cons[p] = Constraint{Rational(0), t};
            }
        }

        Rational lo, hi;
        if (!inf_centered) {
            const Rational& zinf = targets.at(Place::infinity());
            Rational radius = abs(unit);
            lo = zinf - radius;
            hi = zinf + radius;
        } else {
            Rational radius(std::exp(translation_cap) * 1.001 + 1.0);
            lo = -radius;
            hi = radius;
        }
        Progression prog = solve_translation_congruences(ctx, cons);
        Integer kk_min = ceil_rational((lo - prog.offset) / prog.step);
        Integer kk_max = floor_rational((hi - prog.offset) / prog.step);
        for (Integer kk = kk_min; kk <= kk_max; ++kk) {
            Rational b = prog.offset + prog.step * Rational(kk);
            for (int sign : {1, -1}) {
                GroupElement g = GroupElement::trusted(
                    sign > 0 ? unit : -unit, b);
                if (strip_contains(q, g) &&
                    window_contains(WindowKind::WalkWindow, g, params,
                                    report)) {
                    out.push_back(std::move(g));
                    if (out.size() > limits.max_points) {
                        throw ResourceError(
                            "strip enumeration exceeds point limit");
                    }
                }
            }
        }

        // odometer
        std::size_t i = 0;
        for (; i < primes.size(); ++i) {
            if (k[i] < kmax[i]) {
                ++k[i];
                break;
            }
            k[i] = -kmax[i];
        }
        if (i == primes.size()) break;
    }
    std::sort(out.begin(), out.end(), element_less);
    return out;
}

Integer count_lattice_ball(const PrimeContext& ctx, LatticeKind kind,
                           const Rational& m, const EnumerationLimits& limits) {
    if (m < 1) throw DomainError("lattice ball radius must be >= 1");
    const auto& primes = ctx.primes();
    std::vector<long> e(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) {
        e[i] = floor_log(primes[i], m);
    }

    if (kind == LatticeKind::Translations) {
        // admissible translations form step * Z with step = prod p^{-e_p}
        Rational scale(1);
        for (std::size_t i = 0; i < primes.size(); ++i) {
            scale *= rational_pow(primes[i], e[i]);
        }
        return 2 * floor_rational(m * scale) + 1;
    }

    // Units: count exponent vectors with k_p >= -e_p and product <= m,
    // then double for the sign.
    std::size_t box = 1;
    std::vector<long> kcap(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) {
        Rational headroom = m;
        for (std::size_t j = 0; j < primes.size(); ++j) {
            if (j != i) headroom *= rational_pow(primes[j], e[j]);
        }
        kcap[i] = floor_log(primes[i], headroom);
        box *= static_cast<std::size_t>(kcap[i] + e[i] + 1);
        if (box > limits.max_unit_box) {
            throw ResourceError("unit ball enumeration exceeds limit");
        }
    }

    Integer count(0);
    std::vector<long> k(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) k[i] = -e[i];
    for (;;) {
        Rational prod(1);
        for (std::size_t i = 0; i < primes.size(); ++i) {
            prod *= rational_pow(primes[i], k[i]);
        }
        if (prod <= m) ++count;
        std::size_t i = 0;
        for (; i < primes.size(); ++i) {
            if (k[i] < kcap[i]) {
                ++k[i];
                break;
            }
            k[i] = -e[i];
        }
        if (i == primes.size()) break;
    }
    return 2 * count;
}

namespace {

// Cardinality of the full window at time n, used when every place is
// centered: translations with norm <= exp(translation_bound) everywhere,
// times the admissible units.
double full_window_count(const PrimeContext& ctx, const DriftReport& report,
                         const WindowParams& params) {
    double unit_cap = params.rate * static_cast<double>(params.n);
    double units = 2.0;
    for (unsigned long p : ctx.primes()) {
        units *= 2.0 * std::floor(unit_cap / safe_log(p)) + 1.0;
    }
    (void)report;
    double bound = std::exp(WindowParams::translation_bound(params.n));
    double step_log = 0.0;
    for (unsigned long p : ctx.primes()) {
        step_log -= std::floor(std::log(bound) / safe_log(p)) * safe_log(p);
    }
    double translations = 2.0 * std::floor(bound / std::exp(step_log)) + 1.0;
    return units * translations;
}

}  // namespace

CensusReport strip_census(const MeasureSpec& spec, double rate,
                          const std::vector<long>& n_list,
                          const CensusOptions& opts) {
    if (n_list.empty()) throw ValidationError("census needs a nonempty n list");
    DriftReport report = drift_vector(spec);
    CensusReport census;
    census.pairs = opts.pairs;
    census.walk_seeds = opts.walk_seeds;
    census.degenerate = report.boundary_places.empty() &&
                        report.reflected_boundary_places.empty();

    long nmax = *std::max_element(n_list.begin(), n_list.end());
    WindowParams probe{rate, nmax};
    probe.validate(report);

    // hit frequencies, one walk per stream
    std::vector<std::vector<char>> hits(
        static_cast<std::size_t>(opts.walk_seeds),
        std::vector<char>(n_list.size(), 0));
    parallel_for(static_cast<std::size_t>(opts.walk_seeds), opts.jobs,
                 [&](std::size_t s) {
                     Trajectory traj = run_walk(
                         spec, WalkSeed{opts.master_seed, s}, nmax,
                         opts.walk_limits);
                     for (std::size_t i = 0; i < n_list.size(); ++i) {
                         WindowParams params{rate, n_list[i]};
                         hits[s][i] = window_contains(
                             WindowKind::WalkWindow,
                             traj.product_at(n_list[i]), params, report);
                     }
                 });

    // strip counts over sampled bilateral target pairs
    std::vector<std::vector<double>> counts(
        static_cast<std::size_t>(census.degenerate ? 0 : opts.pairs),
        std::vector<double>(n_list.size(), 0.0));
    if (!census.degenerate) {
        constexpr std::uint64_t kPairStreamBase = 1ull << 32;
        parallel_for(static_cast<std::size_t>(opts.pairs), opts.jobs,
                     [&](std::size_t j) {
                         Trajectory traj = run_bilateral(
                             spec, WalkSeed{opts.master_seed,
                                            kPairStreamBase + j},
                             opts.target_horizon, opts.target_horizon,
                             opts.walk_limits);
                         std::map<Place, Rational> forward, reflected;
                         for (Place place : report.boundary_places) {
                             forward[place] =
                                 traj.product_at(opts.target_horizon).b();
                         }
                         for (Place place : report.reflected_boundary_places) {
                             reflected[place] =
                                 traj.product_at(-opts.target_horizon).b();
                         }
                         StripQuery q = StripQuery::from_targets(
                             report, std::move(reflected), std::move(forward));
                         for (std::size_t i = 0; i < n_list.size(); ++i) {
                             WindowParams params{rate, n_list[i]};
                             counts[j][i] = static_cast<double>(
                                 enumerate_strip_window(
                                     q, params, report, spec.context(),
                                     opts.enumeration_limits)
                                     .size());
                         }
                     });
    }

    census.min_hit_frequency = 1.0;
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        CensusRow row;
        row.n = n_list[i];
        long hit = 0;
        for (long s = 0; s < opts.walk_seeds; ++s) {
            hit += hits[static_cast<std::size_t>(s)][i];
        }
        row.hit_frequency =
            static_cast<double>(hit) / static_cast<double>(opts.walk_seeds);

        double sum = 0.0, logsum = 0.0;
        if (census.degenerate) {
            WindowParams params{rate, n_list[i]};
            double c = full_window_count(spec.context(), report, params);
            sum = c;
            logsum = std::log(c) / static_cast<double>(n_list[i]);
        } else {
            for (long j = 0; j < opts.pairs; ++j) {
                double c = counts[static_cast<std::size_t>(j)][i];
                sum += c / static_cast<double>(opts.pairs);
                logsum += std::log(std::max(1.0, c)) /
                          static_cast<double>(n_list[i]) /
                          static_cast<double>(opts.pairs);
            }
        }
        row.mean_strip_count = sum;
        row.mean_log_count_over_n = logsum;
        census.min_hit_frequency =
            std::min(census.min_hit_frequency, row.hit_frequency);
        census.rows.push_back(row);
    }

    // least-squares slope of ln(count) against ln(n)
    if (census.rows.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        double cnt = static_cast<double>(census.rows.size());
        for (const CensusRow& row : census.rows) {
            double x = std::log(static_cast<double>(row.n));
            double y = std::log(std::max(1.0, row.mean_strip_count));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        census.fitted_unit_growth =
            (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    }
    return census;
}

}  // namespace affwalk
