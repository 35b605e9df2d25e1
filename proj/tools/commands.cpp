#include "commands.hpp"

#include "khom/af_tower.hpp"
#include "khom/error.hpp"
#include "khom/fredholm.hpp"
#include "khom/json_io.hpp"
#include "khom/zlattice.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>

namespace khom::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
    std::string command;
    std::string theta = "";
    std::string output;
    std::string format = "json";
    double tol_rank = 1e-8;
    double tol_round = 0.1;
    std::uint64_t seed = 0;
    bool timing = false;
    bool dump = false;
    int precision = 60;

    // cf / tower
    int depth = 20;
    std::string trace;
    int horizon = 0;
    // pair / rep-dump
    std::string module;
    std::vector<std::string> classes;
    int N = 0;
    int fiber = 1;
    bool conjugate = false;
    std::string rep;
    std::string variant = "z1";
    // sequence
    std::string which;
    std::vector<std::string> perturb;
};

/// Non-zero exit for a failed mathematical check, with the report still written.
struct Outcome {
    Json result;
    Json checks = Json::object();
    Json warnings = Json::array();
    int code = ok;
};

int exit_code_for(Errc e) {
    switch (e) {
        case Errc::UnstableIndex:
        case Errc::NonIntegerPairing: return instability;
        case Errc::NotAProjection:
        case Errc::NotUnitary: return check_failed;
        default: return input_error;
    }
}

Tolerances tolerances(const RunConfig& c) {
    Tolerances t;
    t.rank = c.tol_rank;
    t.round = c.tol_round;
    return t;
}

Json config_echo(const RunConfig& c) {
    Json j = {{"command", c.command}, {"format", c.format}, {"precision_digits", c.precision}};
    if (!c.theta.empty()) j["theta"] = c.theta;
    if (c.command == "cf" || c.command == "tower") j["depth"] = c.depth;
    if (c.command == "tower") {
        if (!c.trace.empty()) j["trace"] = c.trace;
        if (c.horizon) j["horizon"] = c.horizon;
    }
    if (c.command == "pair") {
        j["module"] = c.module;
        j["classes"] = c.classes;
        j["fiber_dim"] = c.fiber;
        j["conjugate"] = c.conjugate;
        j["seed"] = c.seed;
    }
    if (c.command == "pair" || c.command == "rep-dump") j["N"] = c.N;
    if (c.command == "rep-dump") {
        j["rep"] = c.rep;
        j["variant"] = c.variant;
        j["dump"] = c.dump;
    }
    if (c.command == "sequence") {
        j["which"] = c.which;
        j["perturb"] = c.perturb;
    }
    return j;
}

ThetaInput theta_input(const RunConfig& c) {
    if (c.theta.empty()) throw Error(Errc::InvalidInput, "--theta is required");
    return parse_theta(c.theta, c.precision);
}

// ---------------------------------------------------------------- cf

Outcome cmd_cf(const RunConfig& c) {
    const CFExpansion cf = cf_expand(theta_input(c), c.depth);
    const ConvergentTable table = convergents(cf);
    Outcome o;
    o.result = {{"cf", to_json(cf)}, {"convergents", to_json(table)}};
    o.checks["determinant_identity"] = table.determinant_identity_holds();
    if (cf.terminated && static_cast<int>(cf.digits.size()) < c.depth)
        o.warnings.push_back("rational expansion terminates after " + std::to_string(cf.digits.size()) + " digits");
    if (!table.determinant_identity_holds()) o.code = check_failed;
    return o;
}

std::string cf_csv(const Json& result) {
    std::ostringstream os;
    os << "n,p,q\n";
    for (const auto& r : result["convergents"])
        os << r["n"].get<int>() << ',' << r["p"].get<std::string>() << ',' << r["q"].get<std::string>() << '\n';
    return os.str();
}

// ---------------------------------------------------------------- pair

struct ClassSpec {
    enum Kind { unit, projection, unitary } kind;
    char generator = 0;  // 'U' or 'V'
    int power = 1;
};

ClassSpec parse_class(const std::string& s) {
    if (s == "1") return {ClassSpec::unit};
    if (s == "p") return {ClassSpec::projection};
    if (!s.empty() && (s[0] == 'U' || s[0] == 'V')) {
        ClassSpec k{ClassSpec::unitary, s[0], 1};
        if (s.size() > 1) {
            if (s[1] != '^' || s.size() < 3) throw Error(Errc::InvalidInput, "bad class '" + s + "'");
            try {
                std::size_t used = 0;
                k.power = std::stoi(s.substr(2), &used);
                if (used != s.size() - 2) throw std::invalid_argument(s);
            } catch (const std::logic_error&) {
                throw Error(Errc::InvalidInput, "bad exponent in class '" + s + "'");
            }
        }
        return k;
    }
    throw Error(Errc::InvalidInput, "class must be one of 1, U, V, p (or U^k, V^k), got '" + s + "'");
}

PolyMatrix unitary_of(const ClassSpec& k) {
    return PolyMatrix::scalar(k.generator == 'U' ? NCPolynomial::U(k.power) : NCPolynomial::V(k.power));
}

bool integer_theta(const Theta& t) { return t.is_rational() && t.exact()->second == 1; }

PairingResult pair_even(const RunConfig& c, const Theta& theta, const ClassSpec& k, const Tolerances& tol) {
    if (k.kind == ClassSpec::unitary)
        throw Error(Errc::InvalidInput, "module " + c.module + " is even; pair it with 1 or p");
    EvenFredholmModule m;
    if (c.module == "z0") {
        if (!integer_theta(theta)) throw Error(Errc::InvalidInput, "z0 needs an integer theta (phi(U) = phi(V) = 1)");
        m = z0_module();
    } else if (c.module == "z0prime") {
        if (!theta.is_rational()) throw Error(Errc::InvalidInput, "z0prime needs a rational theta m/q");
        const auto [num, den] = *theta.exact();
        m = z0prime_module(clock_shift(num, den));
    } else {
        m = dirac_module(theta, c.N > 0 ? c.N : 24);
    }
    if (c.conjugate) m = conjugated(m, random_diagonal_frame(c.seed));
    if (k.kind == ClassSpec::unit) return even_pairing(m, PolyMatrix::identity(1), tol);
    // the projection of trace theta mod 1 is 0 at integer theta
    if (integer_theta(theta)) {
        PairingResult r = even_pairing(m, PolyMatrix::scalar(NCPolynomial()), tol);
        r.element = "p";
        return r;
    }
    const double frac = theta.value() - std::floor(theta.value());
    return even_pairing(m, RieffelProjection(frac), tol);
}

PairingResult pair_odd(const RunConfig& c, const Theta& theta, const ClassSpec& k, const Tolerances& tol) {
    if (k.kind != ClassSpec::unitary)
        throw Error(Errc::InvalidInput, "module " + c.module + " is odd; pair it with U or V");
    OddFredholmModule m = canonical_odd(theta, c.N > 0 ? c.N : 16, parse_variant(c.module), c.fiber);
    if (c.conjugate) m = conjugated(m, random_diagonal_frame(c.seed));
    return odd_pairing(m, unitary_of(k), tol);
}

Outcome cmd_pair(const RunConfig& c) {
    static const std::vector<std::string> modules = {"z0", "z0prime", "z1", "z1prime", "dirac"};
    if (std::find(modules.begin(), modules.end(), c.module) == modules.end())
        throw Error(Errc::InvalidInput, "unknown module '" + c.module + "'");
    if (c.classes.empty()) throw Error(Errc::InvalidInput, "--class is required");
    const Theta theta = Theta::from_input(theta_input(c));
    const Tolerances tol = tolerances(c);
    const bool odd = c.module == "z1" || c.module == "z1prime";

    std::vector<ClassSpec> specs;
    for (const auto& s : c.classes) specs.push_back(parse_class(s));

    // independent pairings run concurrently; results keep input order
    std::vector<std::future<PairingResult>> jobs;
    for (const auto& k : specs) {
        jobs.push_back(std::async(std::launch::async, [&, k] {
            return odd ? pair_odd(c, theta, k, tol) : pair_even(c, theta, k, tol);
        }));
    }
    std::vector<PairingResult> results;
    std::optional<Error> first_error;
    for (auto& j : jobs) {
        try {
            results.push_back(j.get());
        } catch (const Error& e) {
            if (!first_error) first_error = e;
        }
    }
    if (first_error) throw *first_error;

    Outcome o;
    o.result = Json::array();
    bool stable = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        Json r = to_json(results[i]);
        r["class"] = c.classes[i];
        o.result.push_back(r);
        stable = stable && results[i].stable;
    }
    o.checks["stable"] = stable;
    if (!stable) o.code = instability;
    return o;
}

// ---------------------------------------------------------------- sequence

std::string normalize_map_name(const std::string& s) {
    std::string out;
    for (char ch : s)
        if (std::isalnum(static_cast<unsigned char>(ch))) out += static_cast<char>(std::tolower(ch));
    if (out == "a0") return "idalpha0";
    if (out == "a1") return "idalpha1";
    return out;
}

void apply_perturbation(CyclicSequence& seq, const std::string& spec) {
    // name=i,j : add 1 to entry (i, j), 1-based
    const auto eq = spec.find('=');
    const auto comma = spec.find(',', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || comma == std::string::npos)
        throw Error(Errc::InvalidInput, "perturbation must look like name=i,j, got '" + spec + "'");
    const std::string key = normalize_map_name(spec.substr(0, eq));
    long i = 0, j = 0;
    try {
        i = std::stol(spec.substr(eq + 1, comma - eq - 1));
        j = std::stol(spec.substr(comma + 1));
    } catch (const std::logic_error&) {
        throw Error(Errc::InvalidInput, "bad perturbation indices in '" + spec + "'");
    }
    for (auto& f : seq.maps()) {
        if (normalize_map_name(f.name) != key) continue;
        if (i < 1 || j < 1 || static_cast<std::size_t>(i) > f.matrix.rows() ||
            static_cast<std::size_t>(j) > f.matrix.cols())
            throw Error(Errc::InvalidInput, "entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                                ") outside the " + std::to_string(f.matrix.rows()) + "x" +
                                                std::to_string(f.matrix.cols()) + " matrix of " + f.name);
        f.matrix(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)) += 1;
        return;
    }
    throw Error(Errc::InvalidInput, "no map named '" + spec.substr(0, eq) + "' in the sequence");
}

Outcome cmd_sequence(const RunConfig& c) {
    if (c.which != "khomology" && c.which != "ktheory")
        throw Error(Errc::InvalidInput, "--which must be khomology or ktheory");
    CyclicSequence seq = c.which == "khomology" ? builtin_khomology_sequence() : builtin_ktheory_sequence();
    for (const auto& p : c.perturb) apply_perturbation(seq, p);
    const auto nodes = seq.check_exactness();
    Outcome o;
    o.result = {{"sequence", to_json(seq)}, {"nodes", to_json(nodes)}};
    bool all = true;
    for (const auto& n : nodes) all = all && n.verdict.exact;
    o.checks["exact_at_all_nodes"] = all;
    if (!all) o.code = check_failed;
    return o;
}

// ---------------------------------------------------------------- tower

BigRational theta_midpoint(const ThetaInput& in) {
    if (const auto* r = std::get_if<BigRational>(&in)) return *r;
    const auto& iv = std::get<RealInterval>(in);
    return BigRational((iv.lo + iv.hi) / 2);
}

BigRational theta_halfwidth(const ThetaInput& in) {
    if (std::holds_alternative<BigRational>(in)) return 0;
    const auto& iv = std::get<RealInterval>(in);
    return BigRational((iv.hi - iv.lo) / 2);
}

struct TowerRun {
    BratteliTower tower;
    std::vector<CoefficientComparison> comparison;
};

Outcome cmd_tower(const RunConfig& c, TowerRun& run) {
    if (c.depth < 1) throw Error(Errc::InvalidInput, "--depth must be >= 1");
    const ThetaInput in = theta_input(c);
    // one extra digit so q_{depth+1} is available for error bounds
    CFExpansion cf = cf_expand(in, c.depth + 1);
    Outcome o;
    int depth = c.depth;
    if (cf.terminated && static_cast<int>(cf.digits.size()) < c.depth + 1) {
        depth = std::min<int>(c.depth, static_cast<int>(cf.digits.size()));
        o.warnings.push_back("rational theta: continued fraction terminates after " +
                             std::to_string(cf.digits.size()) + " digits; tower stops at level " +
                             std::to_string(depth));
    }
    if (depth < 1) throw Error(Errc::InsufficientDigits, "theta is an integer; the tower is empty");
    run.tower = build_tower(cf, depth);
    run.comparison = compare_coefficients(run.tower);

    bool dims = true, dets = true, invariance = true, closed_form_all = true;
    for (int n = 1; n < depth; ++n) {
        const auto& s = run.tower.step_from(n);
        const auto& a = run.tower.level(n);
        const auto& b = run.tower.level(n + 1);
        dims = dims && b.q_n == s.multiplicity * a.q_n + a.q_prev && b.q_prev == a.q_n;
        dets = dets && determinant(khom_pullback_matrix(s)) == -1;
    }
    Json comparison = Json::array();
    for (const auto& cc : run.comparison) {
        invariance = invariance && cc.recursion_vs_identity == 1 && cc.recursion_vs_p1 == 0;
        closed_form_all = closed_form_all && cc.closed_form_matches;
        comparison.push_back(to_json(cc));
    }
    o.result = to_json(run.tower);
    o.result["coefficient_comparison"] = comparison;
    o.checks["dimension_consistency"] = dims;
    o.checks["pullback_det_minus_one"] = dets;
    o.checks["pairing_invariance"] = invariance;
    o.result["closed_form_matches_recursion"] = closed_form_all;
    if (!closed_form_all)
        o.warnings.push_back("closed-form coefficients (-1)^n(-q_{n-1}, q_n) differ from the inverse-limit recursion");

    if (!c.trace.empty()) {
        DimensionVector v;
        if (c.trace == "p1")
            v = p1_class();
        else if (c.trace == "1")
            v = identity_class(run.tower, 1);
        else
            throw Error(Errc::InvalidInput, "--trace must be p1 or 1");
        const int horizon = c.horizon > 0 ? c.horizon : depth;
        const BigRational value = trace_weights(run.tower, 1, horizon).trace(v);
        Json t = {{"class", c.trace}, {"horizon", horizon}, {"value", value.get_d()}, {"exact", to_string(value)}};
        if (c.trace == "p1" && horizon < static_cast<int>(run.tower.convergents.size()) - 1) {
            const BigRational bound(1, BigInt(run.tower.convergents.q(horizon) * run.tower.convergents.q(horizon + 1)));
            const BigRational frac_err = abs(BigRational(value - (theta_midpoint(in) - run.tower.cf.a0)));
            t["theta_error"] = frac_err.get_d();
            t["bound"] = bound.get_d();
            const bool within = frac_err <= bound + theta_halfwidth(in);
            o.checks["trace_within_bound"] = within;
            if (!within) o.code = check_failed;
        }
        o.result["trace"] = t;
    }
    if (!dims || !dets || !invariance) o.code = check_failed;
    return o;
}

std::string tower_csv(const TowerRun& run) {
    std::ostringstream os;
    os << "n,q_n,q_prev,multiplicity,x,y,closed_x,closed_y,pair_identity,pair_p1\n";
    for (const auto& cc : run.comparison) {
        const auto& l = run.tower.level(cc.level);
        const std::string m = cc.level < run.tower.depth() ? run.tower.step_from(cc.level).multiplicity.get_str() : "";
        os << l.n << ',' << l.q_n.get_str() << ',' << l.q_prev.get_str() << ',' << m << ',' << cc.recursion.x.get_str()
           << ',' << cc.recursion.y.get_str() << ',' << cc.closed_form.x.get_str() << ','
           << cc.closed_form.y.get_str() << ',' << cc.recursion_vs_identity.get_str() << ','
           << cc.recursion_vs_p1.get_str() << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------- rep-dump

Outcome cmd_rep_dump(const RunConfig& c) {
    const Theta theta = Theta::from_input(theta_input(c));
    Outcome o;
    Json r = {{"theta", theta.to_string()}};
    if (c.rep == "clock_shift") {
        if (!theta.is_rational()) throw Error(Errc::InvalidInput, "clock_shift needs a rational theta m/q");
        const auto [m, q] = *theta.exact();
        const ClockShiftRep rep = clock_shift(m, q);
        r["dimension"] = rep.dimension();
        r["relation_defect"] = rep.relation_defect();
        r["unitarity_defect"] = rep.unitarity_defect();
        if (c.dump) {
            r["U"] = matrix_json(rep.U);
            r["V"] = matrix_json(rep.V);
        }
        o.checks["relation_within_1e-12"] = rep.relation_defect() <= 1e-12;
    } else if (c.rep == "truncated") {
        const TruncatedZRep rep = truncated_rep(theta, c.N > 0 ? c.N : 8, parse_variant(c.variant), c.fiber);
        r["dimension"] = rep.dimension();
        r["variant"] = variant_name(rep.variant);
        r["boundary_defective"] = rep.boundary_defective;
        r["interior_relation_defect"] = rep.interior_relation_defect();
        if (c.dump) {
            r["U"] = matrix_json(to_dense(rep.U));
            r["V"] = matrix_json(to_dense(rep.V));
        }
        o.checks["interior_relation_within_1e-12"] = rep.interior_relation_defect() <= 1e-12;
    } else if (c.rep == "z2") {
        const TruncatedZ2Rep rep = dirac_data(theta, c.N > 0 ? c.N : 4);
        r["dimension"] = rep.dimension();
        r["interior_relation_defect"] = rep.interior_relation_defect();
        if (c.dump) {
            r["U"] = matrix_json(to_dense(rep.U));
            r["V"] = matrix_json(to_dense(rep.V));
            r["F0"] = matrix_json(rep.F0);
        }
        o.checks["interior_relation_within_1e-12"] = rep.interior_relation_defect() <= 1e-12;
    } else {
        throw Error(Errc::InvalidInput, "--rep must be clock_shift, truncated or z2");
    }
    o.result = r;
    return o;
}

Json versions() {
    return {{"khom", kVersion},
            {"gmp", gmp_version},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    if (const char* env = std::getenv("NCG_TORUS_PRECISION")) {
        try {
            c.precision = std::stoi(env);
        } catch (const std::logic_error&) {
            err << "NCG_TORUS_PRECISION must be an integer\n";
            return input_error;
        }
        if (c.precision < 1) {
            err << "NCG_TORUS_PRECISION must be positive\n";
            return input_error;
        }
    }

    CLI::App app{"K-homology computations for rotation algebras", "khom"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--output,-o", c.output, "write the report to this file");
    app.add_option("--format", c.format, "json, csv or dot")->check(CLI::IsMember({"json", "csv", "dot"}));
    app.add_option("--tol-rank", c.tol_rank, "singular values below this count as kernel")
        ->check(CLI::PositiveNumber);
    app.add_option("--tol-round", c.tol_round, "max distance of a pairing from an integer")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", c.seed, "seed for random diagonal frames");
    app.add_flag("--timing", c.timing, "include wall time in the report");
    app.add_flag("--dump", c.dump, "include matrices in rep-dump reports");

    auto* cf = app.add_subcommand("cf", "continued fraction and convergents");
    cf->add_option("--theta", c.theta)->required();
    cf->add_option("--depth", c.depth)->check(CLI::PositiveNumber);

    auto* pair = app.add_subcommand("pair", "index pairing of a Fredholm module with a K-theory class");
    pair->add_option("--module", c.module)->required();
    pair->add_option("--class", c.classes)->required()->delimiter(',');
    pair->add_option("--theta", c.theta)->required();
    pair->add_option("--N", c.N, "truncation half-width")->check(CLI::PositiveNumber);
    pair->add_option("--fiber", c.fiber, "fiber dimension of odd modules")->check(CLI::PositiveNumber);
    pair->add_flag("--conjugate", c.conjugate, "conjugate the module by a random diagonal unitary (--seed)");

    auto* seq = app.add_subcommand("sequence", "six-term exactness check");
    seq->add_option("--which", c.which)->required()->check(CLI::IsMember({"khomology", "ktheory"}));
    seq->add_option("--perturb", c.perturb, "add 1 to an entry: name=i,j (1-based)");

    auto* tower = app.add_subcommand("tower", "AF tower, inverse-limit coefficients and traces");
    tower->add_option("--theta", c.theta)->required();
    tower->add_option("--depth", c.depth)->check(CLI::PositiveNumber);
    tower->add_option("--trace", c.trace, "p1 or 1");
    tower->add_option("--horizon", c.horizon)->check(CLI::PositiveNumber);

    auto* rep = app.add_subcommand("rep-dump", "matrices of a representation");
    rep->add_option("--rep", c.rep)->required();
    rep->add_option("--theta", c.theta)->required();
    rep->add_option("--N", c.N)->check(CLI::PositiveNumber);
    rep->add_option("--variant", c.variant);
    rep->add_option("--fiber", c.fiber)->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return input_error;
    }
    c.command = app.get_subcommands().front()->get_name();

    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    std::string text;
    try {
        if (c.format == "dot" && c.command != "tower") throw Error(Errc::InvalidInput, "dot output is for tower only");
        if (c.format == "csv" && c.command != "tower" && c.command != "cf")
            throw Error(Errc::InvalidInput, "csv output is for cf and tower only");
        TowerRun tower_run;
        if (c.command == "cf")
            o = cmd_cf(c);
        else if (c.command == "pair")
            o = cmd_pair(c);
        else if (c.command == "sequence")
            o = cmd_sequence(c);
        else if (c.command == "tower")
            o = cmd_tower(c, tower_run);
        else
            o = cmd_rep_dump(c);

        if (c.format == "dot") {
            text = to_dot(tower_run.tower);
        } else if (c.format == "csv") {
            text = c.command == "cf" ? cf_csv(o.result) : tower_csv(tower_run);
        } else {
            Json report = {{"config", config_echo(c)},
                           {"result", o.result},
                           {"checks", o.checks},
                           {"warnings", o.warnings},
                           {"tolerances", to_json(tolerances(c))},
                           {"versions", versions()},
                           {"exit_code", o.code}};
            if (c.timing)
                report["wall_time_s"] =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            text = dump_json(report);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    }
    for (const auto& w : o.warnings) err << "warning: " << w.get<std::string>() << '\n';

    if (c.output.empty()) {
        out << text;
    } else {
        std::ofstream f(c.output, std::ios::binary);
        if (!f) {
            err << "error: cannot open " << c.output << '\n';
            return input_error;
        }
        f << text;
    }
    return o.code;
}

}  // namespace khom::cli
