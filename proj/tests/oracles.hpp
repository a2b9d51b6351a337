// Test-side oracles and statistics helpers. The enumerators here are
// deliberately independent of the library's solution paths: they search
// bounded candidate boxes directly so the fast implementations can be
// checked set-for-set.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "affwalk/measure.hpp"
#include "affwalk/strips.hpp"

namespace oracles {

using affwalk::Integer;
using affwalk::Place;
using affwalk::PrimeContext;
using affwalk::Rational;

inline long rand_long(std::mt19937_64& rng, long lo, long hi) {
    return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Random signed unit with per-prime exponents in [-emax, emax].
inline Rational random_unit(std::mt19937_64& rng, const PrimeContext& ctx,
                            long emax) {
    Rational a(rng() % 2 == 0 ? 1 : -1);
    for (unsigned long p : ctx.primes()) {
        a *= affwalk::rational_pow(p, rand_long(rng, -emax, emax));
    }
    return a;
}

// Random context integer h * prod p^{-e} with bounded pieces.
inline Rational random_zp(std::mt19937_64& rng, const PrimeContext& ctx,
                          long emax, long hmax) {
    Rational b(rand_long(rng, -hmax, hmax));
    for (unsigned long p : ctx.primes()) {
        b *= affwalk::rational_pow(p, rand_long(rng, -emax, 0));
    }
    return b;
}

inline Rational random_rational(std::mt19937_64& rng, long num_max,
                                long den_max) {
    Integer n(rand_long(rng, -num_max, num_max));
    Integer d(rand_long(rng, 1, den_max));
    Rational q(n, d);
    q.canonicalize();
    return q;
}

// Random measure with exact weights (integer parts over their sum).
inline affwalk::MeasureSpec random_measure(std::mt19937_64& rng,
                                           const PrimeContext& ctx,
                                           long atom_count) {
    std::vector<affwalk::RawAtom> atoms;
    Rational total(0);
    std::vector<Rational> parts;
    for (long i = 0; i < atom_count; ++i) {
        Rational w(rand_long(rng, 1, 9));
        parts.push_back(w);
        total += w;
    }
    for (long i = 0; i < atom_count; ++i) {
        atoms.push_back(affwalk::RawAtom{random_unit(rng, ctx, 3),
                                         random_zp(rng, ctx, 2, 20),
                                         parts[static_cast<std::size_t>(i)] /
                                             total});
    }
    return validate_measure(atoms, ctx);
}

// ---------------------------------------------------------------------------
// Brute-force enumerators

// {b in Z(P) : |z_p - b|_p <= 1 at every place}: any solution has p-adic
// denominator depth at most that of z_p, so candidates c / Q with
// Q = prod p^{m_p} cover the set; the integer part is bounded by the real
// window. Denominator exponents are capped at 40.
inline std::vector<Rational> brute_force_ball_points(
    const PrimeContext& ctx, const std::map<Place, Rational>& targets) {
    Integer big_q(1);
    for (unsigned long p : ctx.primes()) {
        auto v = affwalk::valuation(targets.at(Place::prime(p)), p);
        long m = (v && *v < 0) ? std::min<long>(40, -*v) : 0;
        Integer pw;
        mpz_ui_pow_ui(pw.get_mpz_t(), p, static_cast<unsigned long>(m));
        big_q *= pw;
    }
    const Rational& zinf = targets.at(Place::infinity());
    Integer cmin = affwalk::ceil_rational((zinf - 1) * Rational(big_q));
    Integer cmax = affwalk::floor_rational((zinf + 1) * Rational(big_q));

    // per-prime precomputation: z_p = r/s, the condition on c is
    // v_p(r Q - c s) >= v_p(s Q)
    struct Cond {
        Integer f;       // the prime
        Integer rq;      // r * Q
        Integer s;       // denominator of the target
        long threshold;  // v_p(s Q)
    };
    std::vector<Cond> conds;
    for (unsigned long p : ctx.primes()) {
        const Rational& z = targets.at(Place::prime(p));
        Cond c;
        c.f = Integer(p);
        c.rq = z.get_num() * big_q;
        c.s = z.get_den();
        Integer sq = c.s * big_q, tmp;
        c.threshold = static_cast<long>(
            mpz_remove(tmp.get_mpz_t(), sq.get_mpz_t(), c.f.get_mpz_t()));
        conds.push_back(std::move(c));
    }

    std::vector<Rational> out;
    Integer diff, tmp;
    for (Integer c = cmin; c <= cmax; ++c) {
        bool ok = true;
        for (const Cond& cond : conds) {
            diff = cond.rq - c * cond.s;
            long v;
            if (diff == 0) {
                v = cond.threshold;  // exact hit counts as inside
            } else {
                v = static_cast<long>(mpz_remove(
                    tmp.get_mpz_t(), diff.get_mpz_t(), cond.f.get_mpz_t()));
            }
            if (v < cond.threshold) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        Rational b(c, big_q);
        b.canonicalize();
        if (abs(zinf - b) <= 1) out.push_back(std::move(b));
    }
    return out;
}

// Direct count of {b in Z(P) : |b|_place <= m at every place} via the same
// candidate box.
inline Integer brute_force_translation_count(const PrimeContext& ctx,
                                             const Rational& m) {
    Integer big_q(1);
    for (unsigned long p : ctx.primes()) {
        long e = 0;
        Rational power(p);
        while (power <= m) {
            ++e;
            power *= static_cast<unsigned long>(p);
        }
        Integer pw;
        mpz_ui_pow_ui(pw.get_mpz_t(), p, static_cast<unsigned long>(e));
        big_q *= pw;
    }
    Integer cmax = affwalk::floor_rational(m * Rational(big_q));
    Integer count(0);
    for (Integer c = -cmax; c <= cmax; ++c) {
        Rational b(c, big_q);
        b.canonicalize();
        bool ok = abs(b) <= m;
        for (unsigned long p : ctx.primes()) {
            if (!ok) break;
            ok = affwalk::pnorm(b, Place::prime(p)) <= m;
        }
        if (ok) ++count;
    }
    return count;
}

// Strip-window elements found by filtering a dense candidate box: units
// over the full exponent box, translations over c / prod p^depth within the
// admissible real range. Desk-scale only.
inline std::vector<affwalk::GroupElement> brute_force_strip_window(
    const affwalk::StripQuery& query, const affwalk::WindowParams& params,
    const affwalk::DriftReport& report, const PrimeContext& ctx, long depth,
    const Rational& real_span) {
    std::vector<affwalk::GroupElement> out;
    std::vector<long> kmax;
    for (unsigned long p : ctx.primes()) {
        kmax.push_back(static_cast<long>(std::floor(
            params.rate * static_cast<double>(params.n) /
                std::log(static_cast<double>(p)) +
            1e-12)));
    }
    Integer big_q(1);
    for (unsigned long p : ctx.primes()) {
        Integer pw;
        mpz_ui_pow_ui(pw.get_mpz_t(), p, static_cast<unsigned long>(depth));
        big_q *= pw;
    }
    Integer cmax = affwalk::floor_rational(real_span * Rational(big_q));

    std::vector<long> k(ctx.primes().size());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = -kmax[i];
    for (;;) {
        Rational unit(1);
        for (std::size_t i = 0; i < k.size(); ++i) {
            unit *= affwalk::rational_pow(ctx.primes()[i], k[i]);
        }
        for (Integer c = -cmax; c <= cmax; ++c) {
            Rational b(c, big_q);
            b.canonicalize();
            for (int sign : {1, -1}) {
                affwalk::GroupElement g = affwalk::GroupElement::trusted(
                    sign > 0 ? unit : -unit, b);
                if (strip_contains(query, g) &&
                    window_contains(affwalk::WindowKind::WalkWindow, g, params,
                                    report)) {
                    out.push_back(std::move(g));
                }
            }
        }
        std::size_t i = 0;
        for (; i < k.size(); ++i) {
            if (k[i] < kmax[i]) {
                ++k[i];
                break;
            }
            k[i] = -kmax[i];
        }
        if (i == k.size()) break;
    }
    std::sort(out.begin(), out.end(), affwalk::element_less);
    return out;
}

// ---------------------------------------------------------------------------
// Statistics

inline double ks_distance_uniform(std::vector<double> values, double lo,
                                  double hi) {
    std::sort(values.begin(), values.end());
    double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double cdf = std::clamp((values[i] - lo) / (hi - lo), 0.0, 1.0);
        d = std::max(d, std::fabs(cdf - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - cdf));
    }
    return d;
}

// Chi-square upper quantile via the Wilson-Hilferty approximation.
inline double chi_square_quantile(long df, double z_upper) {
    double d = static_cast<double>(df);
    double t = 1.0 - 2.0 / (9.0 * d) + z_upper * std::sqrt(2.0 / (9.0 * d));
    return d * t * t * t;
}

// Two-sample chi-square statistic for equal-size samples binned over the
// union of observed keys; degrees of freedom = bins - 1.
template <typename Key>
inline std::pair<double, long> chi_square_two_sample(
    const std::map<Key, long>& h1, const std::map<Key, long>& h2) {
    std::map<Key, std::pair<long, long>> merged;
    for (const auto& [k, c] : h1) merged[k].first += c;
    for (const auto& [k, c] : h2) merged[k].second += c;
    double stat = 0.0;
    for (const auto& [k, counts] : merged) {
        double a = static_cast<double>(counts.first);
        double b = static_cast<double>(counts.second);
        stat += (a - b) * (a - b) / (a + b);
    }
    return {stat, static_cast<long>(merged.size()) - 1};
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LinearFit least_squares(const std::vector<double>& xs,
                               const std::vector<double>& ys) {
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    LinearFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

}  // namespace oracles
