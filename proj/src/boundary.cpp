#include "affwalk/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "affwalk/parallel.hpp"

namespace affwalk {

std::map<Place, Rational> BoundaryPoint::values() const {
    std::map<Place, Rational> out;
    for (const auto& [place, comp] : components) out[place] = comp.value;
    return out;
}

BoundaryPoint approximate_boundary_point(const MeasureSpec& spec,
                                         WalkSeed seed, long precision,
                                         long max_horizon,
                                         const BoundaryOptions& opts) {
    if (precision < 1) throw ValidationError("precision must be >= 1");
    if (opts.checkpoint_stride < 1 || opts.confirmation_window < 1) {
        throw ValidationError("bad checkpoint options");
    }
    DriftReport report = drift_vector(spec);

    BoundaryPoint out;
    out.confirmation_window = opts.confirmation_window;
    if (report.boundary_places.empty()) return out;

    const std::size_t window = static_cast<std::size_t>(opts.confirmation_window);
    const Rational inf_tolerance = rational_pow(2, -precision);

    std::map<Place, std::deque<DigitWindow>> digit_history;
    std::deque<Rational> value_history;  // infinite place
    bool want_infinite = false;
    for (Place place : report.boundary_places) {
        if (place.is_infinity()) {
            want_infinite = true;
        } else {
            digit_history[place] = {};
        }
    }

    // Same stream as the forward part of run_walk for this seed.
    WalkEngine engine(spec, splitmix64_at(derive_stream_seed(seed), 0));

    auto snapshot_converged = [&]() {
        for (auto& [place, history] : digit_history) {
            const Rational& z = engine.current().b();
            DigitWindow w = padic_digits(z, place.prime_value(), precision);
            history.push_back(std::move(w));
            if (history.size() > window) history.pop_front();
        }
        if (want_infinite) {
            value_history.push_back(engine.current().b());
            if (value_history.size() > window) value_history.pop_front();
        }
        for (const auto& [place, history] : digit_history) {
            if (history.size() < window) return false;
            for (const DigitWindow& w : history) {
                if (!(w == history.front())) return false;
            }
        }
        if (want_infinite) {
            if (value_history.size() < window) return false;
            Rational lo = value_history.front(), hi = value_history.front();
            for (const Rational& v : value_history) {
                if (v < lo) lo = v;
                if (v > hi) hi = v;
            }
            if (hi - lo > inf_tolerance) return false;
        }
        return true;
    };

    auto build_components = [&]() {
        for (const auto& [place, history] : digit_history) {
            BoundaryComponent comp;
            comp.digits = history.back();
            comp.value = engine.current().b();
            out.components[place] = std::move(comp);
        }
        if (want_infinite) {
            Rational lo = value_history.front(), hi = value_history.front();
            for (const Rational& v : value_history) {
                if (v < lo) lo = v;
                if (v > hi) hi = v;
            }
            BoundaryComponent comp;
            comp.interval = std::make_pair(lo.get_d(), hi.get_d());
            comp.value = engine.current().b();
            out.components[Place::infinity()] = std::move(comp);
        }
    };

    for (long n = 1; n <= max_horizon; ++n) {
        engine.step();
        if (n % opts.checkpoint_stride != 0) continue;
        if (snapshot_converged()) {
            out.horizon_used = n;
            build_components();
            return out;
        }
    }

    out.horizon_used = max_horizon;
    if (!value_history.empty() || !digit_history.empty()) {
        bool have_data = want_infinite ? !value_history.empty() : true;
        for (const auto& [place, history] : digit_history) {
            have_data = have_data && !history.empty();
        }
        if (have_data) build_components();
    }
    throw BoundaryConvergenceError(
        "exit point did not stabilize within horizon " +
            std::to_string(max_horizon),
        out);
}

namespace {

Rational ball_identifier(Place place, long resolution, const Rational& value) {
    if (place.is_infinity()) {
        // left endpoint of the dyadic cell of width 2^-resolution
        Rational scaled = value * rational_pow(2, resolution);
        return Rational(floor_rational(scaled)) * rational_pow(2, -resolution);
    }
    return canonical_disc_center(place.prime_value(), -resolution, value);
}

}  // namespace

EmpiricalExitLaw empirical_exit_law(const MeasureSpec& spec, long seeds,
                                    Place place, long resolution,
                                    long max_horizon,
                                    std::uint64_t master_seed, unsigned jobs,
                                    const BoundaryOptions& opts) {
    DriftReport report = drift_vector(spec);
    if (!report.is_boundary(place)) {
        throw ValidationError("place " + place.str() +
                              " is not contracting for this measure");
    }
    long precision = std::max<long>(1, resolution + 8);

    EmpiricalExitLaw law;
    law.place = place;
    law.resolution = resolution;

    std::vector<std::optional<Rational>> keys(static_cast<std::size_t>(seeds));
    parallel_for(static_cast<std::size_t>(seeds), jobs, [&](std::size_t i) {
        try {
            BoundaryPoint bp = approximate_boundary_point(
                spec, WalkSeed{master_seed, i}, precision, max_horizon, opts);
            keys[i] = ball_identifier(place, resolution,
                                      bp.components.at(place).value);
        } catch (const ConvergenceError&) {
            keys[i] = std::nullopt;
        }
    });
    for (const auto& key : keys) {
        if (key) {
            ++law.histogram[*key];
            ++law.total;
        } else {
            ++law.skipped;
        }
    }
    return law;
}

// ---------------------------------------------------------------------------
// Boundary test functions

BoundaryFunction BoundaryFunction::constant(const Rational& c) {
    BoundaryFunction f;
    f.terms_.push_back(Term{c, std::nullopt});
    return f;
}

namespace {

void skip_space(std::string_view text, std::size_t& pos) {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos]))) {
        ++pos;
    }
}

bool consume(std::string_view text, std::size_t& pos, char c) {
    skip_space(text, pos);
    if (pos < text.size() && text[pos] == c) {
        ++pos;
        return true;
    }
    return false;
}

std::string read_until(std::string_view text, std::size_t& pos,
                       std::string_view stops) {
    skip_space(text, pos);
    std::string out;
    while (pos < text.size() && stops.find(text[pos]) == std::string_view::npos) {
        out.push_back(text[pos++]);
    }
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) {
        out.pop_back();
    }
    return out;
}

long parse_long(const std::string& text) {
    Rational q = parse_rational(text);
    if (q.get_den() != 1 || !q.get_num().fits_slong_p()) {
        throw ValidationError("expected integer, got '" + text + "'");
    }
    return q.get_num().get_si();
}

}  // namespace

BoundaryFunction BoundaryFunction::parse(std::string_view text) {
    BoundaryFunction f;
    std::size_t pos = 0;
    for (;;) {
        skip_space(text, pos);
        if (pos >= text.size()) break;

        Term term;
        term.coefficient = 1;
        // optional "q *" prefix: a rational never contains '(' so probe for
        // a '*' before the next parenthesis
        std::size_t probe = pos;
        std::string head = read_until(text, probe, "*(+");
        if (probe < text.size() && text[probe] == '*') {
            term.coefficient = parse_rational(head);
            pos = probe + 1;
            skip_space(text, pos);
        }

        std::string name = read_until(text, pos, "(");
        if (!consume(text, pos, '(')) {
            throw ValidationError("expected '(' in boundary function");
        }
        if (name == "const") {
            std::string value = read_until(text, pos, ")");
            if (!consume(text, pos, ')')) {
                throw ValidationError("expected ')' in boundary function");
            }
            term.coefficient *= parse_rational(value);
            term.ball.reset();
        } else if (name == "ball") {
            Ball ball;
            ball.place = Place::parse(read_until(text, pos, ","));
            if (!consume(text, pos, ',')) {
                throw ValidationError("ball needs (place, center, radius)");
            }
            ball.center = parse_rational(read_until(text, pos, ","));
            if (!consume(text, pos, ',')) {
                throw ValidationError("ball needs (place, center, radius)");
            }
            ball.radius_exponent = parse_long(read_until(text, pos, ")"));
            if (!consume(text, pos, ')')) {
                throw ValidationError("expected ')' in boundary function");
            }
            term.ball = std::move(ball);
        } else {
            throw ValidationError("unknown boundary function term: '" + name +
                                  "'");
        }
        f.terms_.push_back(std::move(term));

        skip_space(text, pos);
        if (pos >= text.size()) break;
        if (!consume(text, pos, '+')) {
            throw ValidationError("expected '+' between terms");
        }
    }
    if (f.terms_.empty()) {
        throw ValidationError("empty boundary function");
    }
    return f;
}

Rational BoundaryFunction::evaluate(
    const std::map<Place, Rational>& point) const {
    Rational out(0);
    for (const Term& term : terms_) {
        if (!term.ball) {
            out += term.coefficient;
            continue;
        }
        auto it = point.find(term.ball->place);
        if (it == point.end()) continue;  // no component: indicator is 0
        const Rational& x = it->second;
        bool inside;
        if (term.ball->place.is_infinity()) {
            inside = abs(x - term.ball->center) <=
                     rational_pow(2, -term.ball->radius_exponent);
        } else {
            Rational diff = x - term.ball->center;
            inside = sgn(diff) == 0 ||
                     *valuation(diff, term.ball->place.prime_value()) >=
                         term.ball->radius_exponent;
        }
        if (inside) out += term.coefficient;
    }
    return out;
}

Rational BoundaryFunction::constant_part() const {
    Rational out(0);
    for (const Term& term : terms_) {
        if (!term.ball) out += term.coefficient;
    }
    return out;
}

void BoundaryFunction::validate_places(const PrimeContext& ctx) const {
    for (const Term& term : terms_) {
        if (term.ball && term.ball->place.is_finite() &&
            !ctx.contains(term.ball->place.prime_value())) {
            throw ValidationError("boundary function references place " +
                                  term.ball->place.str() +
                                  " outside the prime context");
        }
    }
}

std::string BoundaryFunction::str() const {
    std::string out;
    for (const Term& term : terms_) {
        if (!out.empty()) out += " + ";
        if (!term.ball) {
            out += "const(" + to_string(term.coefficient) + ")";
            continue;
        }
        if (term.coefficient != 1) {
            out += to_string(term.coefficient) + " * ";
        }
        out += "ball(" + term.ball->place.str() + ", " +
               to_string(term.ball->center) + ", " +
               std::to_string(term.ball->radius_exponent) + ")";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Harmonic evaluation

BoundarySampleBatch sample_boundary_batch(const MeasureSpec& spec,
                                          std::uint64_t master_seed,
                                          long count, long precision,
                                          long max_horizon, unsigned jobs,
                                          const BoundaryOptions& opts) {
    std::vector<std::optional<std::map<Place, Rational>>> slots(
        static_cast<std::size_t>(count));
    parallel_for(static_cast<std::size_t>(count), jobs, [&](std::size_t i) {
        try {
            slots[i] = approximate_boundary_point(spec,
                                                  WalkSeed{master_seed, i},
                                                  precision, max_horizon, opts)
                           .values();
        } catch (const ConvergenceError&) {
            slots[i] = std::nullopt;
        }
    });
    BoundarySampleBatch batch;
    batch.points.reserve(slots.size());
    for (auto& slot : slots) {
        if (slot) {
            batch.points.push_back(std::move(*slot));
        } else {
            ++batch.skipped;
        }
    }
    return batch;
}

namespace {

std::map<Place, Rational> translate_point(const GroupElement& g,
                                          const std::map<Place, Rational>& x) {
    std::map<Place, Rational> out;
    for (const auto& [place, v] : x) out[place] = act_rational(g, v);
    return out;
}

HarmonicEstimate summarize(const std::vector<double>& values, long skipped) {
    HarmonicEstimate est;
    est.samples = static_cast<long>(values.size());
    est.skipped = skipped;
    if (values.empty()) {
        throw ConvergenceError("no usable boundary samples");
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    est.value = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - est.value) * (v - est.value);
        double var = ss / static_cast<double>(values.size() - 1);
        est.std_error = std::sqrt(var / static_cast<double>(values.size()));
    }
    return est;
}

}  // namespace

HarmonicEstimate evaluate_harmonic(const MeasureSpec& spec,
                                   const BoundaryFunction& psi,
                                   const GroupElement& g,
                                   const BoundarySampleBatch& batch) {
    psi.validate_places(spec.context());
    std::vector<double> values;
    values.reserve(batch.points.size());
    for (const auto& x : batch.points) {
        values.push_back(psi.evaluate(translate_point(g, x)).get_d());
    }
    return summarize(values, batch.skipped);
}

HarmonicEstimate evaluate_harmonic(const MeasureSpec& spec,
                                   const BoundaryFunction& psi,
                                   const GroupElement& g, long samples,
                                   long max_horizon,
                                   std::uint64_t master_seed, long precision,
                                   unsigned jobs, const BoundaryOptions& opts) {
    BoundarySampleBatch batch = sample_boundary_batch(
        spec, master_seed, samples, precision, max_horizon, jobs, opts);
    return evaluate_harmonic(spec, psi, g, batch);
}

ResidualEstimate harmonicity_residual(const MeasureSpec& spec,
                                      const BoundaryFunction& psi,
                                      const GroupElement& g,
                                      const BoundarySampleBatch& batch) {
    psi.validate_places(spec.context());
    std::vector<double> defects;
    defects.reserve(batch.points.size());
    for (const auto& x : batch.points) {
        Rational direct = psi.evaluate(translate_point(g, x));
        Rational stepped(0);
        for (const Atom& atom : spec.atoms()) {
            GroupElement gh = multiply(g, atom.element);
            stepped += atom.weight * psi.evaluate(translate_point(gh, x));
        }
        defects.push_back(Rational(direct - stepped).get_d());
    }
    HarmonicEstimate est = summarize(defects, batch.skipped);
    return ResidualEstimate{est.value, est.std_error, est.samples};
}

}  // namespace affwalk
