#pragma once

#include <gmpxx.h>

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "affwalk/errors.hpp"

namespace affwalk {

// Exact arbitrary-precision rational, always stored reduced with positive
// denominator (mpq_class maintains canonical form through arithmetic).
using Rational = mpq_class;
using Integer = mpz_class;

// A place of the rationals: a finite prime p, or the infinite (Euclidean)
// place. Finite places order ascending; the infinite place sorts last.
class Place {
public:
    static Place infinity() { return Place(0); }
    static Place prime(unsigned long p);

    bool is_infinity() const { return value_ == 0; }
    bool is_finite() const { return value_ != 0; }
    unsigned long prime_value() const;

    // Textual form: the prime itself, or "inf".
    std::string str() const;
    static Place parse(std::string_view text);

    friend bool operator==(Place a, Place b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(Place a, Place b) {
        // encode infinity as larger than any prime
        unsigned long x = a.value_ == 0 ? ~0ul : a.value_;
        unsigned long y = b.value_ == 0 ? ~0ul : b.value_;
        return x <=> y;
    }

private:
    explicit Place(unsigned long v) : value_(v) {}
    unsigned long value_;  // 0 encodes the infinite place
};

// An ordered finite set of distinct primes. Construction sorts, deduplicates
// and verifies primality.
class PrimeContext {
public:
    explicit PrimeContext(std::vector<unsigned long> primes);

    const std::vector<unsigned long>& primes() const { return primes_; }
    bool contains(unsigned long p) const;
    std::size_t size() const { return primes_.size(); }

    // All places: the primes in ascending order followed by infinity.
    std::vector<Place> places() const;

    friend bool operator==(const PrimeContext& a, const PrimeContext& b) {
        return a.primes_ == b.primes_;
    }

private:
    std::vector<unsigned long> primes_;
};

// A finite window of p-adic digits: value = sum digits[i] * p^(start+i),
// digits in [0, p-1], leading digit nonzero unless the value is zero.
struct DigitWindow {
    unsigned long prime = 2;
    long start_exponent = 0;
    std::vector<long> digits;

    Rational reconstruct() const;

    friend bool operator==(const DigitWindow&, const DigitWindow&) = default;
};

// p-adic valuation of q. Returns nullopt (the +infinity sentinel) iff q = 0.
std::optional<long> valuation(const Rational& q, unsigned long p);

// |q|_place as an exact rational: p^(-v_p(q)) at a finite place, |q| at the
// infinite place, 0 for q = 0.
Rational pnorm(const Rational& q, Place place);

// True iff every prime factor of the denominator of q lies in the context.
bool in_ZP(const Rational& q, const PrimeContext& ctx);

// True iff q is a unit of the context: nonzero with numerator and
// denominator factoring entirely over the context primes.
bool is_unit(const Rational& q, const PrimeContext& ctx);

// The two sides of the norm product identity for a unit a:
// (|a|, product over context primes of |a|_p^(-1)). The components are
// always equal; throws DomainError when a is not a unit.
std::pair<Rational, Rational> product_formula_sides(const Rational& a,
                                                    const PrimeContext& ctx);

// First `count` p-adic digits of q starting at exponent v_p(q).
DigitWindow padic_digits(const Rational& q, unsigned long p, long count);

// Canonical center of the disc of radius p^level around z: the unique
// representative whose digits vanish at every exponent >= -level. Two
// centers z, z' with v_p(z - z') >= -level canonicalize identically.
Rational canonical_disc_center(unsigned long p, long level, const Rational& z);

// p^e as an exact rational (e may be negative).
Rational rational_pow(unsigned long p, long e);

// floor / ceil of an exact rational.
Integer floor_rational(const Rational& q);
Integer ceil_rational(const Rational& q);

// ln|q| for nonzero q, computed from the bignum sizes (no overflow for
// huge operands). Diagnostic use only; the exact value stays rational.
double log_abs(const Rational& q);

// ln|q|_place for nonzero q.
double log_norm(const Rational& q, Place place);

// max(0, ln|q|_place) with the convention that q = 0 contributes 0.
double log_plus_norm(const Rational& q, Place place);

// Textual form "num/den" with the denominator omitted when it equals 1 and
// the sign carried by the numerator. Used across config files, CLI
// arguments and outputs.
std::string to_string(const Rational& q);
Rational parse_rational(std::string_view text);

}  // namespace affwalk
