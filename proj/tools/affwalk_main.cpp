// Command-line front end: wires measure configs, seeds and subcommands to
// the library and emits line-delimited records or CSV tables. All
// randomness flows from --seed through the pinned stream derivation, so
// reruns with identical options are byte-identical.
//
// Exit codes: 0 success, 2 configuration/validation error, 3 resource or
// convergence failure (partial results carry a partial=true marker).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "affwalk/boundary.hpp"
#include "affwalk/geometry.hpp"
#include "affwalk/records.hpp"
#include "affwalk/strips.hpp"

namespace {

using namespace affwalk;

struct CommonOptions {
    std::string config_path;
    std::string output_path;  // empty: stdout
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    unsigned jobs = 1;
};

long parse_long_field(const std::string& text) {
    Rational q = parse_rational(text);
    if (q.get_den() != 1 || !q.get_num().fits_slong_p()) {
        throw ValidationError("expected integer: '" + text + "'");
    }
    return q.get_num().get_si();
}

void write_output(const CommonOptions& common, const std::string& text) {
    if (common.output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(common.output_path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot open output file: " + common.output_path);
    }
    out << text;
}

MeasureSpec load_measure(const CommonOptions& common) {
    if (common.config_path.empty()) {
        throw ValidationError("a measure config is required (--config)");
    }
    return load_measure_config(common.config_path);
}

std::pair<Place, Rational> parse_target(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos) {
        throw ValidationError("target must be place=value: '" + text + "'");
    }
    return {Place::parse(text.substr(0, eq)),
            parse_rational(text.substr(eq + 1))};
}

std::string drift_class_name(DriftClass c) {
    switch (c) {
        case DriftClass::Boundary: return "boundary";
        case DriftClass::Reflected: return "reflected";
        default: return "centered";
    }
}

std::string place_list(const std::vector<Place>& places) {
    std::string out;
    for (Place p : places) {
        if (!out.empty()) out += ',';
        out += p.str();
    }
    return out;
}

// ---------------------------------------------------------------------------

int cmd_drift(const CommonOptions& common) {
    MeasureSpec spec = load_measure(common);
    DriftReport report = drift_vector(spec);
    std::ostringstream out;
    for (Place place : spec.context().places()) {
        Record rec;
        rec.add("place", place.str());
        if (place.is_finite()) {
            rec.add("e", to_string(
                             report.expected_valuations.at(place.prime_value())));
        }
        rec.add("phi", report.drifts.at(place));
        rec.add("class", drift_class_name(report.classify(place)));
        out << rec.line() << "\n";
    }
    Record summary;
    summary.add("boundary", place_list(report.boundary_places));
    summary.add("reflected", place_list(report.reflected_boundary_places));
    summary.add("centered", place_list(report.centered_places));
    out << summary.line() << "\n";
    write_output(common, out.str());
    return 0;
}

int cmd_simulate(const CommonOptions& common, long steps, long past) {
    MeasureSpec spec = load_measure(common);
    std::ostringstream out;
    Trajectory traj;
    try {
        traj = run_bilateral(spec, WalkSeed{common.seed, common.stream}, past,
                             steps);
    } catch (const ResourceError& e) {
        Record rec;
        rec.add("partial", "true");
        rec.add("error", std::string(e.what()));
        out << rec.line() << "\n";
        write_output(common, out.str());
        return 3;
    }
    auto places = spec.context().places();
    for (long n = -traj.past_horizon(); n <= traj.future_horizon(); ++n) {
        const GroupElement& r = traj.product_at(n);
        Record rec;
        rec.add("n", n);
        bool have_increment = n >= 1 || (n > -traj.past_horizon() && n <= 0);
        if (have_increment) {
            const GroupElement& g = traj.increment_at(n);
            rec.add("a", to_string(g.a()));
            rec.add("b", to_string(g.b()));
        } else {
            rec.add("a", "-");
            rec.add("b", "-");
        }
        rec.add("A", to_string(r.a()));
        rec.add("Z", to_string(r.b()));
        for (Place place : places) {
            rec.add("lnA_" + place.str(), log_norm(r.a(), place));
            rec.add("lnZp_" + place.str(), log_plus_norm(r.b(), place));
        }
        out << rec.line() << "\n";
    }
    write_output(common, out.str());
    return 0;
}

void append_boundary_point(std::ostringstream& out, const BoundaryPoint& bp,
                           bool converged) {
    Record head;
    head.add("horizon", bp.horizon_used);
    head.add("window", static_cast<long>(bp.confirmation_window));
    head.add("converged", converged ? "true" : "false");
    if (!converged) head.add("partial", "true");
    out << head.line() << "\n";
    for (const auto& [place, comp] : bp.components) {
        Record rec;
        rec.add("place", place.str());
        if (comp.digits) {
            rec.add("start", comp.digits->start_exponent);
            std::string digits;
            for (long d : comp.digits->digits) {
                if (!digits.empty()) digits += ',';
                digits += std::to_string(d);
            }
            rec.add("digits", digits);
        }
        if (comp.interval) {
            rec.add("lo", comp.interval->first);
            rec.add("hi", comp.interval->second);
        }
        rec.add("value", to_string(comp.value));
        out << rec.line() << "\n";
    }
}

int cmd_boundary(const CommonOptions& common, long precision, long horizon,
                 const BoundaryOptions& opts, long samples, long resolution,
                 const std::string& place_text) {
    MeasureSpec spec = load_measure(common);
    std::ostringstream out;
    if (samples > 0) {
        // exit-law histogram mode
        Place place = Place::parse(place_text);
        EmpiricalExitLaw law =
            empirical_exit_law(spec, samples, place, resolution, horizon,
                               common.seed, common.jobs, opts);
        Record head;
        head.add("place", place.str());
        head.add("resolution", law.resolution);
        head.add("total", law.total);
        head.add("skipped", law.skipped);
        if (law.total == 0) head.add("partial", "true");
        out << head.line() << "\n";
        for (const auto& [ball, count] : law.histogram) {
            Record rec;
            rec.add("ball", to_string(ball));
            rec.add("count", count);
            out << rec.line() << "\n";
        }
        write_output(common, out.str());
        return law.total == 0 ? 3 : 0;
    }
    try {
        BoundaryPoint bp = approximate_boundary_point(
            spec, WalkSeed{common.seed, common.stream}, precision, horizon,
            opts);
        append_boundary_point(out, bp, true);
        write_output(common, out.str());
        return 0;
    } catch (const BoundaryConvergenceError& e) {
        append_boundary_point(out, e.best_effort, false);
        write_output(common, out.str());
        return 3;
    }
}

int cmd_harmonic(const CommonOptions& common, const std::string& psi_text,
                 const std::string& element_text, long samples, long horizon,
                 long precision, bool residual, const BoundaryOptions& opts) {
    MeasureSpec spec = load_measure(common);
    BoundaryFunction psi = BoundaryFunction::parse(psi_text);
    GroupElement g = element_text.empty()
                         ? GroupElement::identity()
                         : GroupElement::parse(element_text, spec.context());
    BoundarySampleBatch batch = sample_boundary_batch(
        spec, common.seed, samples, precision, horizon, common.jobs, opts);
    std::ostringstream out;
    try {
        HarmonicEstimate est = evaluate_harmonic(spec, psi, g, batch);
        Record rec;
        rec.add("psi", "\"" + psi.str() + "\"");
        rec.add("element", g.str());
        rec.add("value", est.value);
        rec.add("std_error", est.std_error);
        rec.add("samples", est.samples);
        rec.add("skipped", est.skipped);
        if (residual) {
            ResidualEstimate res = harmonicity_residual(spec, psi, g, batch);
            rec.add("residual", res.residual);
            rec.add("residual_std_error", res.std_error);
        }
        out << rec.line() << "\n";
    } catch (const ConvergenceError& e) {
        Record rec;
        rec.add("partial", "true");
        rec.add("error", std::string(e.what()));
        out << rec.line() << "\n";
        write_output(common, out.str());
        return 3;
    }
    write_output(common, out.str());
    return 0;
}

int cmd_strips(const CommonOptions& common,
               const std::vector<std::string>& forward_texts,
               const std::vector<std::string>& reflected_texts, long n,
               double rate) {
    MeasureSpec spec = load_measure(common);
    DriftReport report = drift_vector(spec);
    std::map<Place, Rational> forward, reflected;
    for (const std::string& t : forward_texts) forward.insert(parse_target(t));
    for (const std::string& t : reflected_texts) {
        reflected.insert(parse_target(t));
    }
    StripQuery query = StripQuery::from_targets(report, std::move(reflected),
                                                std::move(forward));
    WindowParams params = rate > 0
                              ? WindowParams{rate, n}
                              : WindowParams::recommended(report, n);
    std::ostringstream out;
    std::vector<GroupElement> elements;
    try {
        elements =
            enumerate_strip_window(query, params, report, spec.context());
    } catch (const ResourceError& e) {
        Record rec;
        rec.add("partial", "true");
        rec.add("error", std::string(e.what()));
        out << rec.line() << "\n";
        write_output(common, out.str());
        return 3;
    }
    Record head;
    head.add("n", n);
    head.add("rate", params.rate);
    head.add("count", static_cast<long>(elements.size()));
    out << head.line() << "\n";
    for (const GroupElement& g : elements) {
        Record rec;
        rec.add("element", g.str());
        out << rec.line() << "\n";
    }
    write_output(common, out.str());
    return 0;
}

int cmd_census(const CommonOptions& common, const std::string& n_text,
               long pairs, long walk_seeds, long horizon, double rate) {
    MeasureSpec spec = load_measure(common);
    DriftReport report = drift_vector(spec);
    std::vector<long> n_list;
    std::stringstream ss{n_text};
    for (std::string item; std::getline(ss, item, ',');) {
        n_list.push_back(parse_long_field(item));
    }
    CensusOptions opts;
    opts.master_seed = common.seed;
    opts.pairs = pairs;
    opts.walk_seeds = walk_seeds;
    opts.target_horizon = horizon;
    opts.jobs = common.jobs;
    double effective_rate =
        rate > 0 ? rate : WindowParams::recommended(report, 0).rate;
    std::ostringstream out;
    CensusReport census;
    try {
        census = strip_census(spec, effective_rate, n_list, opts);
    } catch (const ResourceError& e) {
        Record rec;
        rec.add("partial", "true");
        rec.add("error", std::string(e.what()));
        out << rec.line() << "\n";
        write_output(common, out.str());
        return 3;
    }
    for (const CensusRow& row : census.rows) {
        Record rec;
        rec.add("n", row.n);
        rec.add("hit_frequency", row.hit_frequency);
        rec.add("strip_count", row.mean_strip_count);
        rec.add("log_count_over_n", row.mean_log_count_over_n);
        out << rec.line() << "\n";
    }
    Record fit;
    fit.add("rate", effective_rate);
    fit.add("fitted_unit_growth", census.fitted_unit_growth);
    fit.add("min_hit_frequency", census.min_hit_frequency);
    fit.add("degenerate", census.degenerate ? "true" : "false");
    out << fit.line() << "\n";
    write_output(common, out.str());
    return 0;
}

int cmd_geometry(const CommonOptions& common, long steps, long past,
                 bool geodesic, const std::string& place_text,
                 const std::string& target_text, const std::string& levels) {
    std::ostringstream out;
    if (geodesic) {
        Place place = Place::parse(place_text);
        Rational z = parse_rational(target_text);
        auto colon = levels.find(':');
        if (colon == std::string::npos) {
            throw ValidationError("levels must be min:max");
        }
        long kmin = parse_long_field(levels.substr(0, colon));
        long kmax = parse_long_field(levels.substr(colon + 1));
        out << "level,vertex\n";
        for (const TreeVertex& v :
             geodesic_to_target(place.prime_value(), z, kmin, kmax)) {
            out << v.level() << "," << v.label() << "\n";
        }
        write_output(common, out.str());
        return 0;
    }
    MeasureSpec spec = load_measure(common);
    Trajectory traj = run_bilateral(spec, WalkSeed{common.seed, common.stream},
                                    past, steps);
    write_geometry_csv(out, trajectory_geometry(traj, spec.context()),
                       spec.context());
    write_output(common, out.str());
    return 0;
}

int cmd_ballpoints(const CommonOptions& common,
                   const std::vector<std::string>& prime_texts,
                   const std::vector<std::string>& target_texts) {
    std::optional<PrimeContext> ctx;
    if (!prime_texts.empty()) {
        std::vector<unsigned long> primes;
        for (const std::string& t : prime_texts) {
            primes.push_back(static_cast<unsigned long>(parse_long_field(t)));
        }
        ctx = PrimeContext(primes);
    } else if (!common.config_path.empty()) {
        ctx = load_measure(common).context();
    } else {
        throw ValidationError("ballpoints needs --primes or --config");
    }
    std::map<Place, Rational> targets;
    for (Place place : ctx->places()) targets[place] = 0;  // default targets
    for (const std::string& t : target_texts) {
        auto [place, value] = parse_target(t);
        if (!targets.count(place)) {
            throw ValidationError("target place " + place.str() +
                                  " outside the prime context");
        }
        targets[place] = value;
    }
    std::ostringstream out;
    for (const Rational& b : enumerate_ball_points(*ctx, targets)) {
        out << to_string(b) << "\n";
    }
    write_output(common, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace affwalk;
    CLI::App app{"random walks on finitely generated rational affine groups"};
    app.require_subcommand(1);

    CommonOptions common;
    auto add_common = [&](CLI::App* cmd, bool with_seed = true) {
        cmd->add_option("--config", common.config_path, "measure config file");
        cmd->add_option("--output", common.output_path,
                        "output file (default stdout)");
        if (with_seed) {
            cmd->add_option("--seed", common.seed, "master seed");
            cmd->add_option("--stream", common.stream, "stream index");
        }
        cmd->add_option("--jobs", common.jobs, "worker count");
    };

    BoundaryOptions bopts;
    auto add_boundary_opts = [&](CLI::App* cmd) {
        cmd->add_option("--stride", bopts.checkpoint_stride,
                        "checkpoint stride in steps");
        cmd->add_option("--confirm-window", bopts.confirmation_window,
                        "checkpoints a value must persist to count as stable");
    };

    auto* drift = app.add_subcommand("drift", "per-place drift report");
    add_common(drift, false);

    long steps = 100, past = 0;
    auto* simulate = app.add_subcommand("simulate", "seeded exact trajectory");
    add_common(simulate);
    simulate->add_option("--steps", steps, "forward horizon");
    simulate->add_option("--past", past, "negative-time horizon");

    long precision = 24, horizon = 4096, samples = 0, resolution = 3;
    std::string place_text = "inf";
    auto* boundary = app.add_subcommand(
        "boundary", "exit-point approximation or exit-law histogram");
    add_common(boundary);
    add_boundary_opts(boundary);
    boundary->add_option("--precision", precision, "digits / dyadic precision");
    boundary->add_option("--horizon", horizon, "maximum walk length");
    boundary->add_option("--samples", samples,
                         "sample count (enables histogram mode)");
    boundary->add_option("--resolution", resolution, "histogram ball depth");
    boundary->add_option("--place", place_text, "histogram place");

    std::string psi_text, element_text;
    bool residual = false;
    auto* harmonic =
        app.add_subcommand("harmonic", "Monte Carlo harmonic evaluation");
    add_common(harmonic);
    add_boundary_opts(harmonic);
    harmonic->add_option("--psi", psi_text, "boundary test function")
        ->required();
    harmonic->add_option("--element", element_text, "evaluation point (a,b)");
    harmonic->add_option("--samples", samples, "sample count");
    harmonic->add_option("--horizon", horizon, "maximum walk length");
    harmonic->add_option("--precision", precision, "boundary precision");
    harmonic->add_flag("--residual", residual,
                       "also report the mean-value defect");

    std::vector<std::string> forward_texts, reflected_texts;
    long window_n = 0;
    double rate = 0.0;
    auto* strips =
        app.add_subcommand("strips", "enumerate a strip inside a walk window");
    add_common(strips, false);
    strips->add_option("--forward", forward_texts,
                       "forward target place=value (one per contracting place)");
    strips->add_option("--reflected", reflected_texts,
                       "reflected target place=value (one per expanding place)");
    strips->add_option("--n", window_n, "window index");
    strips->add_option("--rate", rate, "window rate (default recommended)");

    std::string n_text = "8,16,32,64";
    long pairs = 20, walk_seeds = 200, census_horizon = 512;
    auto* census =
        app.add_subcommand("census", "window hit rates and strip growth");
    add_common(census);
    census->add_option("--n", n_text, "comma-separated window indices");
    census->add_option("--pairs", pairs, "sampled bilateral target pairs");
    census->add_option("--walk-seeds", walk_seeds,
                       "streams for the hit-frequency estimate");
    census->add_option("--horizon", census_horizon,
                       "bilateral horizon for target sampling");
    census->add_option("--rate", rate, "window rate (default recommended)");

    bool geodesic = false;
    std::string target_text = "0", levels = "0:8";
    auto* geometry = app.add_subcommand(
        "geometry", "trajectory coordinates for plotting (CSV)");
    add_common(geometry);
    geometry->add_option("--steps", steps, "forward horizon");
    geometry->add_option("--past", past, "negative-time horizon");
    geometry->add_flag("--geodesic", geodesic, "emit a tree geodesic instead");
    geometry->add_option("--place", place_text, "geodesic tree (prime)");
    geometry->add_option("--target", target_text, "geodesic endpoint");
    geometry->add_option("--levels", levels, "geodesic level range min:max");

    std::vector<std::string> prime_texts, target_texts;
    auto* ballpoints = app.add_subcommand(
        "ballpoints", "lattice points within radius 1 of targets everywhere");
    add_common(ballpoints, false);
    ballpoints->add_option("--primes", prime_texts, "prime context");
    ballpoints->add_option("--target", target_texts,
                           "target place=value (default 0 per place)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(drift)) return cmd_drift(common);
        if (app.got_subcommand(simulate)) {
            return cmd_simulate(common, steps, past);
        }
        if (app.got_subcommand(boundary)) {
            return cmd_boundary(common, precision, horizon, bopts, samples,
                                resolution, place_text);
        }
        if (app.got_subcommand(harmonic)) {
            return cmd_harmonic(common, psi_text, element_text,
                                samples > 0 ? samples : 1000, horizon,
                                precision, residual, bopts);
        }
        if (app.got_subcommand(strips)) {
            return cmd_strips(common, forward_texts, reflected_texts, window_n,
                              rate);
        }
        if (app.got_subcommand(census)) {
            return cmd_census(common, n_text, pairs, walk_seeds,
                              census_horizon, rate);
        }
        if (app.got_subcommand(geometry)) {
            return cmd_geometry(common, steps, past, geodesic, place_text,
                                target_text, levels);
        }
        if (app.got_subcommand(ballpoints)) {
            return cmd_ballpoints(common, prime_texts, target_texts);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
