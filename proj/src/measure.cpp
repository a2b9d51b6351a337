#include "affwalk/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace affwalk {

namespace {

// Collect the prime factors of z by trial division; factors above the trial
// bound must themselves be prime for inference to succeed.
void collect_prime_factors(Integer z, std::set<unsigned long>& out) {
    z = abs(z);
    if (z <= 1) return;
    for (unsigned long p = 2; p <= 1000000ul && z > 1; p += (p == 2 ? 1 : 2)) {
        if (mpz_divisible_ui_p(z.get_mpz_t(), p)) {
            out.insert(p);
            Integer f(p), reduced;
            mpz_remove(reduced.get_mpz_t(), z.get_mpz_t(), f.get_mpz_t());
            z = reduced;
        }
    }
    if (z > 1) {
        if (mpz_probab_prime_p(z.get_mpz_t(), 30) != 0 && z.fits_ulong_p()) {
            out.insert(z.get_ui());
        } else {
            throw ValidationError(
                "cannot infer prime context (large composite factor); "
                "supply primes explicitly");
        }
    }
}

}  // namespace

MeasureSpec validate_measure(const std::vector<RawAtom>& atoms,
                             std::optional<PrimeContext> ctx) {
    if (atoms.empty()) {
        throw ValidationError("measure has empty support");
    }
    Rational total(0);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (sgn(atoms[i].weight) <= 0) {
            throw ValidationError("atom " + std::to_string(i) + " (a=" +
                                  to_string(atoms[i].a) + ", b=" +
                                  to_string(atoms[i].b) +
                                  ") has nonpositive weight");
        }
        if (sgn(atoms[i].a) == 0) {
            throw ValidationError("atom " + std::to_string(i) +
                                  " has zero linear coefficient");
        }
        total += atoms[i].weight;
    }
    if (total != 1) {
        throw ValidationError("weights sum to " + to_string(total) +
                              ", expected 1");
    }

    if (!ctx) {
        std::set<unsigned long> primes;
        for (const RawAtom& atom : atoms) {
            collect_prime_factors(atom.a.get_num(), primes);
            collect_prime_factors(atom.a.get_den(), primes);
            collect_prime_factors(atom.b.get_den(), primes);
        }
        if (primes.empty()) {
            throw ValidationError(
                "atoms involve no primes; supply primes explicitly");
        }
        ctx = PrimeContext(
            std::vector<unsigned long>(primes.begin(), primes.end()));
    }

    // Validating construction, then canonical sort and duplicate merge.
    std::vector<Atom> checked;
    checked.reserve(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        try {
            checked.push_back(
                Atom{GroupElement(atoms[i].a, atoms[i].b, *ctx), atoms[i].weight});
        } catch (const DomainError& e) {
            throw ValidationError("atom " + std::to_string(i) + " (a=" +
                                  to_string(atoms[i].a) + ", b=" +
                                  to_string(atoms[i].b) + "): " + e.what());
        }
    }
    std::sort(checked.begin(), checked.end(), [](const Atom& x, const Atom& y) {
        return element_less(x.element, y.element);
    });
    std::vector<Atom> merged;
    for (Atom& atom : checked) {
        if (!merged.empty() && merged.back().element == atom.element) {
            merged.back().weight += atom.weight;
        } else {
            merged.push_back(std::move(atom));
        }
    }
    return MeasureSpec(std::move(*ctx), std::move(merged));
}

DriftClass DriftReport::classify(Place place) const {
    for (Place p : boundary_places) {
        if (p == place) return DriftClass::Boundary;
    }
    for (Place p : reflected_boundary_places) {
        if (p == place) return DriftClass::Reflected;
    }
    return DriftClass::Centered;
}

double DriftReport::max_abs_drift_finite() const {
    double m = 0.0;
    for (const auto& [place, phi] : drifts) {
        if (place.is_finite()) m = std::max(m, std::fabs(phi));
    }
    return m;
}

double DriftReport::max_abs_drift() const {
    double m = 0.0;
    for (const auto& [place, phi] : drifts) m = std::max(m, std::fabs(phi));
    return m;
}

DriftReport drift_vector(const MeasureSpec& spec) {
    DriftReport report;
    const auto& primes = spec.context().primes();

    for (unsigned long p : primes) {
        Rational e(0);
        for (const Atom& atom : spec.atoms()) {
            e += atom.weight * Rational(*valuation(atom.element.a(), p));
        }
        report.expected_valuations[p] = e;
    }

    // Exact sign of the infinite-place drift sum_p e_p ln p: clear the
    // common denominator and compare the resulting unit product with 1.
    Integer common(1);
    for (unsigned long p : primes) {
        Integer den = report.expected_valuations[p].get_den();
        mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), den.get_mpz_t());
    }
    Integer above(1), below(1);
    for (unsigned long p : primes) {
        Rational scaled = report.expected_valuations[p] * Rational(common);
        Integer n = scaled.get_num();  // integral by construction
        if (!n.fits_slong_p()) {
            throw ResourceError("drift coefficient too large");
        }
        long k = n.get_si();
        Integer pw;
        mpz_ui_pow_ui(pw.get_mpz_t(), p,
                      static_cast<unsigned long>(k < 0 ? -k : k));
        if (k >= 0) {
            above *= pw;
        } else {
            below *= pw;
        }
    }
    report.infinity_sign = cmp(above, below) > 0 ? 1 : (above == below ? 0 : -1);

    double phi_inf = 0.0;
    for (unsigned long p : primes) {
        double e = report.expected_valuations[p].get_d();
        double phi = -e * std::log(static_cast<double>(p));
        report.drifts[Place::prime(p)] = phi;
        phi_inf -= phi;
    }
    report.drifts[Place::infinity()] = phi_inf;

    for (unsigned long p : primes) {
        int s = sgn(report.expected_valuations[p]);
        Place place = Place::prime(p);
        // drift = -e_p ln p, so positive e_p means contraction
        if (s > 0) {
            report.boundary_places.push_back(place);
        } else if (s < 0) {
            report.reflected_boundary_places.push_back(place);
        } else {
            report.centered_places.push_back(place);
        }
    }
    if (report.infinity_sign < 0) {
        report.boundary_places.push_back(Place::infinity());
    } else if (report.infinity_sign > 0) {
        report.reflected_boundary_places.push_back(Place::infinity());
    } else {
        report.centered_places.push_back(Place::infinity());
    }
    return report;
}

MeasureSpec reflect(const MeasureSpec& spec) {
    std::vector<RawAtom> atoms;
    atoms.reserve(spec.atoms().size());
    for (const Atom& atom : spec.atoms()) {
        GroupElement inv = inverse(atom.element);
        atoms.push_back(RawAtom{inv.a(), inv.b(), atom.weight});
    }
    return validate_measure(atoms, spec.context());
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

struct Token {
    enum Kind { Ident, String, Punct, End } kind = End;
    std::string text;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_space_and_comments();
        if (pos_ >= text_.size()) return Token{Token::End, ""};
        char c = text_[pos_];
        if (c == '[' || c == ']' || c == '{' || c == '}' || c == ',' ||
            c == '=') {
            ++pos_;
            return Token{Token::Punct, std::string(1, c)};
        }
        if (c == '"') {
            ++pos_;
            std::string out;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                out.push_back(text_[pos_++]);
            }
            if (pos_ >= text_.size()) {
                throw ValidationError("unterminated string in config");
            }
            ++pos_;
            return Token{Token::String, out};
        }
        std::string out;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(
                                          text_[pos_])) &&
               std::string_view("[]{},=#").find(text_[pos_]) ==
                   std::string_view::npos) {
            out.push_back(text_[pos_++]);
        }
        if (out.empty()) {
            throw ValidationError("unexpected character in config: '" +
                                  std::string(1, c) + "'");
        }
        return Token{Token::Ident, out};
    }

private:
    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

class ConfigParser {
public:
    explicit ConfigParser(std::string_view text) : lexer_(text) { advance(); }

    MeasureSpec parse() {
        std::optional<std::vector<unsigned long>> primes;
        std::vector<RawAtom> atoms;
        bool saw_atoms = false;
        while (current_.kind != Token::End) {
            std::string key = expect_ident();
            expect_punct("=");
            if (key == "primes") {
                primes = parse_prime_array();
            } else if (key == "atoms") {
                atoms = parse_atom_array();
                saw_atoms = true;
            } else {
                throw ValidationError("unknown config key: '" + key + "'");
            }
        }
        if (!saw_atoms) throw ValidationError("config missing 'atoms'");
        std::optional<PrimeContext> ctx;
        if (primes) ctx = PrimeContext(*primes);
        return validate_measure(atoms, ctx);
    }

private:
    void advance() { current_ = lexer_.next(); }

    std::string expect_ident() {
        if (current_.kind != Token::Ident) {
            throw ValidationError("expected identifier in config");
        }
        std::string out = current_.text;
        advance();
        return out;
    }

    void expect_punct(const std::string& p) {
        if (current_.kind != Token::Punct || current_.text != p) {
            throw ValidationError("expected '" + p + "' in config");
        }
        advance();
    }

    bool try_punct(const std::string& p) {
        if (current_.kind == Token::Punct && current_.text == p) {
            advance();
            return true;
        }
        return false;
    }

    std::vector<unsigned long> parse_prime_array() {
        expect_punct("[");
        std::vector<unsigned long> out;
        while (!try_punct("]")) {
            if (current_.kind != Token::Ident) {
                throw ValidationError("expected prime in 'primes'");
            }
            Rational q = parse_rational(current_.text);
            if (q.get_den() != 1 || sgn(q) <= 0 || !q.get_num().fits_ulong_p()) {
                throw ValidationError("bad prime: '" + current_.text + "'");
            }
            out.push_back(q.get_num().get_ui());
            advance();
            if (!try_punct(",")) {
                expect_punct("]");
                break;
            }
        }
        return out;
    }

    std::vector<RawAtom> parse_atom_array() {
        expect_punct("[");
        std::vector<RawAtom> out;
        while (!try_punct("]")) {
            out.push_back(parse_atom_table());
            if (!try_punct(",")) {
                expect_punct("]");
                break;
            }
        }
        return out;
    }

    RawAtom parse_atom_table() {
        expect_punct("{");
        std::optional<Rational> a, b, w;
        while (!try_punct("}")) {
            std::string key = expect_ident();
            expect_punct("=");
            if (current_.kind != Token::String && current_.kind != Token::Ident) {
                throw ValidationError("expected value for atom field '" + key +
                                      "'");
            }
            Rational value = parse_rational(current_.text);
            advance();
            if (key == "a") {
                a = value;
            } else if (key == "b") {
                b = value;
            } else if (key == "w") {
                w = value;
            } else {
                throw ValidationError("unknown atom field: '" + key + "'");
            }
            if (!try_punct(",")) {
                expect_punct("}");
                break;
            }
        }
        if (!a || !b || !w) {
            throw ValidationError("atom must define fields a, b and w");
        }
        return RawAtom{*a, *b, *w};
    }

    Lexer lexer_;
    Token current_;
};

}  // namespace

MeasureSpec parse_measure_config(std::string_view text) {
    return ConfigParser(text).parse();
}

MeasureSpec load_measure_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open measure config: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_measure_config(buf.str());
}

}  // namespace affwalk
