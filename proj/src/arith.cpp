#include "affwalk/arith.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace affwalk {

namespace {

bool probably_prime(unsigned long p) {
    Integer z(static_cast<unsigned long>(p));
    return mpz_probab_prime_p(z.get_mpz_t(), 30) != 0;
}

// Number of factors of f removed from z (z must be nonzero).
long remove_factor(Integer& reduced, const Integer& z, const Integer& f) {
    return static_cast<long>(
        mpz_remove(reduced.get_mpz_t(), z.get_mpz_t(), f.get_mpz_t()));
}

}  // namespace

Place Place::prime(unsigned long p) {
    if (p < 2 || !probably_prime(p)) {
        throw DomainError("not a prime: " + std::to_string(p));
    }
    return Place(p);
}

unsigned long Place::prime_value() const {
    if (is_infinity()) {
        throw DomainError("infinite place has no prime value");
    }
    return value_;
}

std::string Place::str() const {
    return is_infinity() ? "inf" : std::to_string(value_);
}

Place Place::parse(std::string_view text) {
    if (text == "inf" || text == "infinity" || text == "oo") {
        return infinity();
    }
    unsigned long p = 0;
    for (char c : text) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw ValidationError("bad place: '" + std::string(text) + "'");
        }
        p = p * 10 + static_cast<unsigned long>(c - '0');
    }
    if (text.empty()) throw ValidationError("empty place");
    return prime(p);
}

PrimeContext::PrimeContext(std::vector<unsigned long> primes)
    : primes_(std::move(primes)) {
    if (primes_.empty()) {
        throw ValidationError("prime context must contain at least one prime");
    }
    std::sort(primes_.begin(), primes_.end());
    primes_.erase(std::unique(primes_.begin(), primes_.end()), primes_.end());
    for (unsigned long p : primes_) {
        if (p < 2 || !probably_prime(p)) {
            throw ValidationError("not a prime: " + std::to_string(p));
        }
    }
}

bool PrimeContext::contains(unsigned long p) const {
    return std::binary_search(primes_.begin(), primes_.end(), p);
}

std::vector<Place> PrimeContext::places() const {
    std::vector<Place> out;
    out.reserve(primes_.size() + 1);
    for (unsigned long p : primes_) out.push_back(Place::prime(p));
    out.push_back(Place::infinity());
    return out;
}

std::optional<long> valuation(const Rational& q, unsigned long p) {
    if (sgn(q) == 0) return std::nullopt;
    Integer f(p), tmp;
    long vn = remove_factor(tmp, q.get_num(), f);
    long vd = remove_factor(tmp, q.get_den(), f);
    return vn - vd;
}

Rational rational_pow(unsigned long p, long e) {
    Integer pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), p, static_cast<unsigned long>(e < 0 ? -e : e));
    Rational r;
    if (e >= 0) {
        r = Rational(pw);
    } else {
        r = Rational(1, pw);
        r.canonicalize();
    }
    return r;
}

Rational pnorm(const Rational& q, Place place) {
    if (sgn(q) == 0) return Rational(0);
    if (place.is_infinity()) return abs(q);
    long v = *valuation(q, place.prime_value());
    return rational_pow(place.prime_value(), -v);
}

bool in_ZP(const Rational& q, const PrimeContext& ctx) {
    Integer d = q.get_den();
    Integer tmp;
    for (unsigned long p : ctx.primes()) {
        Integer f(p);
        remove_factor(tmp, d, f);
        d = tmp;
    }
    return d == 1;
}

bool is_unit(const Rational& q, const PrimeContext& ctx) {
    if (sgn(q) == 0) return false;
    Integer n = abs(q.get_num());
    Integer d = q.get_den();
    Integer tmp;
    for (unsigned long p : ctx.primes()) {
        Integer f(p);
        remove_factor(tmp, n, f);
        n = tmp;
        remove_factor(tmp, d, f);
        d = tmp;
    }
    return n == 1 && d == 1;
}

std::pair<Rational, Rational> product_formula_sides(const Rational& a,
                                                    const PrimeContext& ctx) {
    if (!is_unit(a, ctx)) {
        throw DomainError("not a unit of the prime context: " + to_string(a));
    }
    Rational left = abs(a);
    Rational right(1);
    for (unsigned long p : ctx.primes()) {
        right *= rational_pow(p, *valuation(a, p));
    }
    return {left, right};
}

DigitWindow padic_digits(const Rational& q, unsigned long p, long count) {
    if (count < 1) throw DomainError("digit count must be positive");
    DigitWindow w;
    w.prime = p;
    if (sgn(q) == 0) {
        w.start_exponent = 0;
        w.digits.assign(static_cast<std::size_t>(count), 0);
        return w;
    }
    Integer f(p), r, s;
    long vn = remove_factor(r, q.get_num(), f);
    long vd = remove_factor(s, q.get_den(), f);
    w.start_exponent = vn - vd;

    // q = p^start * r/s with r, s coprime to p; expand r/s in Z_p by
    // inverting s modulo p^count.
    Integer modulus;
    mpz_ui_pow_ui(modulus.get_mpz_t(), p, static_cast<unsigned long>(count));
    Integer sinv;
    if (mpz_invert(sinv.get_mpz_t(), s.get_mpz_t(), modulus.get_mpz_t()) == 0) {
        throw DomainError("denominator not invertible modulo p^count");
    }
    Integer x;
    mpz_mod(x.get_mpz_t(), r.get_mpz_t(), modulus.get_mpz_t());
    x *= sinv;
    mpz_mod(x.get_mpz_t(), x.get_mpz_t(), modulus.get_mpz_t());

    w.digits.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
        unsigned long digit = mpz_fdiv_q_ui(x.get_mpz_t(), x.get_mpz_t(), p);
        w.digits.push_back(static_cast<long>(digit));
    }
    return w;
}

Rational DigitWindow::reconstruct() const {
    Integer acc(0);
    for (std::size_t i = digits.size(); i-- > 0;) {
        acc *= static_cast<unsigned long>(prime);
        acc += digits[i];
    }
    return Rational(acc) * rational_pow(prime, start_exponent);
}

Rational canonical_disc_center(unsigned long p, long level, const Rational& z) {
    if (sgn(z) == 0) return Rational(0);
    long v = *valuation(z, p);
    long cutoff = -level;  // digits at exponents >= cutoff are zeroed
    if (v >= cutoff) return Rational(0);
    return padic_digits(z, p, cutoff - v).reconstruct();
}

Integer floor_rational(const Rational& q) {
    Integer out;
    mpz_fdiv_q(out.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return out;
}

Integer ceil_rational(const Rational& q) {
    Integer out;
    mpz_cdiv_q(out.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return out;
}

namespace {

double log_abs_mpz(const Integer& z) {
    long e = 0;
    double d = mpz_get_d_2exp(&e, z.get_mpz_t());
    return std::log(std::fabs(d)) + static_cast<double>(e) * std::log(2.0);
}

}  // namespace

double log_abs(const Rational& q) {
    return log_abs_mpz(q.get_num()) - log_abs_mpz(q.get_den());
}

double log_norm(const Rational& q, Place place) {
    if (place.is_infinity()) return log_abs(q);
    long v = *valuation(q, place.prime_value());
    return -static_cast<double>(v) *
           std::log(static_cast<double>(place.prime_value()));
}

double log_plus_norm(const Rational& q, Place place) {
    if (sgn(q) == 0) return 0.0;
    return std::max(0.0, log_norm(q, place));
}

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(std::string_view text) {
    auto fail = [&] {
        throw ValidationError("bad rational: '" + std::string(text) + "'");
    };
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(),
                           [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) fail();
    if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
        s.find('E') != std::string::npos) {
        throw ValidationError("float literal not accepted, use num/den: '" +
                              std::string(text) + "'");
    }
    std::string num = s, den = "1";
    if (auto slash = s.find('/'); slash != std::string::npos) {
        num = s.substr(0, slash);
        den = s.substr(slash + 1);
        if (den.empty() || den.find('/') != std::string::npos) fail();
    }
    auto digits_only = [](const std::string& t, bool sign_ok) {
        if (t.empty()) return false;
        std::size_t i = 0;
        if (sign_ok && (t[0] == '+' || t[0] == '-')) i = 1;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        }
        return true;
    };
    if (!digits_only(num, true) || !digits_only(den, false)) fail();
    Integer n(num), d(den);
    if (d == 0) throw ValidationError("zero denominator: '" + std::string(text) + "'");
    Rational q(n, d);
    q.canonicalize();
    return q;
}

}  // namespace affwalk
