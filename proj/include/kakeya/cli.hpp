#pragma once

// Subcommand dispatch for kakeya_lab. run() is callable in-process so tests
// can drive it without spawning the binary.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kakeya/io.hpp"

namespace kakeya::cli {

using io::json;

enum ExitCode : int { kOk = 0, kRefuted = 1, kInvalid = 2 };

struct Outcome {
    int exit_code = kOk;
    io::Report report;
    std::string text;  // what goes to --output or stdout
    std::string diagnostics;  // what goes to stderr
};

namespace detail {

struct Options {
    // shared
    std::uint64_t seed = 0;
    std::uint64_t budget = 10'000'000;
    unsigned threads = 1;
    std::string format = "json";
    std::string output;
    // field side
    std::uint64_t p = 0;
    std::string slopes;
    std::uint64_t cap = 0;
    std::string mode = "exhaustive";
    std::string input;
    std::string which = "012inf";
    std::string nu;
    int M = 1;
    std::string alpha = "7/4";
    std::string inner_alpha = "7/4";
    std::string constant = "1";
    // exponents
    int n = 7;
    std::optional<int> n_max;
    // grid side
    int grid_n = 2;
    std::string family;
    std::string kind = "random";
    std::int64_t N = 32;
    std::size_t count = 27;
    std::string shading;
    double fill = 1.0;
    std::string band;
    double sigma = 0.125;
    double slack = 2.0;
    std::string save_family;
};

inline void shared_flags(CLI::App* sub, Options& o) {
    sub->add_option("--seed", o.seed, "seed for every random choice")->capture_default_str();
    sub->add_option("--budget", o.budget, "search node budget")->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads (results do not depend on it)")->capture_default_str();
    sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sub->add_option("--output", o.output, "write the report here instead of stdout");
}

inline void grid_flags(CLI::App* sub, Options& o, bool with_shading) {
    sub->add_option("--family", o.family, "line family JSON file");
    sub->add_option("--kind", o.kind, "generated family kind")
        ->check(CLI::IsMember({"random", "bush", "hairbrush", "maximal_separated"}))
        ->capture_default_str();
    sub->add_option("--n", o.grid_n, "ambient dimension of a generated family")->capture_default_str();
    sub->add_option("--N", o.N, "grid scale")->capture_default_str();
    sub->add_option("--count", o.count, "number of generated lines")->capture_default_str();
    sub->add_option("--save-family", o.save_family, "also write the family JSON here");
    if (!with_shading) return;
    sub->add_option("--shading", o.shading, "shading JSON file");
    sub->add_option("--fill", o.fill, "random shading density, 1 keeps every point")->capture_default_str();
    sub->add_option("--band", o.band, "shade heights lo:hi (scaled) instead");
    sub->add_option("--sigma", o.sigma, "two-ends exponent")->capture_default_str();
    sub->add_option("--slack", o.slack, "two-ends slack")->capture_default_str();
}

/// The deterministic part of the invocation: every option of the chosen
/// subcommand except threads, format and output, plus hashes of input files.
inline json echo_config(const CLI::App* sub) {
    json cfg = json::object();
    for (const auto* opt : sub->get_options()) {
        const auto names = opt->get_lnames();
        if (names.empty()) continue;
        const auto& name = names.front();
        if (name == "help" || name == "threads" || name == "format" || name == "output" || name == "save-family")
            continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
        } else {
            value = opt->get_default_str();
        }
        cfg[name] = value;
        if ((name == "input" || name == "family" || name == "shading") && opt->count() > 0) {
            std::ifstream in(value, std::ios::binary);
            std::stringstream ss;
            ss << in.rdbuf();
            cfg[name + "_hash"] = io::fnv1a(ss.str());
        }
    }
    return cfg;
}

inline Rational parse_rational(const std::string& s, const std::string& what) {
    return io::rational_from_json(json(s), what);
}

inline grid::LineFamily load_family(const Options& o) {
    if (!o.family.empty()) return io::family_from_json(io::read_json(o.family));
    grid::GridParams g;
    g.n = o.grid_n;
    g.N = o.N;
    return grid::generate_family(grid::family_kind_from_string(o.kind), g, o.count, o.seed);
}

inline grid::Shading load_shading(const Options& o, const grid::LineFamily& F) {
    if (!o.shading.empty()) return io::shading_from_json(io::read_json(o.shading), F);
    if (!o.band.empty()) {
        const auto colon = o.band.find(':');
        if (colon == std::string::npos) throw InvalidInput("--band expects lo:hi");
        try {
            return grid::height_band_shading(F, std::stoll(o.band.substr(0, colon)), std::stoll(o.band.substr(colon + 1)));
        } catch (const std::logic_error&) {
            throw InvalidInput("--band expects integers lo:hi, got '" + o.band + "'");
        }
    }
    if (!(o.fill >= 0 && o.fill <= 1)) throw InvalidInput("--fill must lie in [0, 1]");
    if (o.fill >= 1) return grid::full_shading(F);
    return grid::random_shading(F, o.fill, o.seed);
}

inline NuParams parse_nu(const std::string& text, std::uint64_t p) {
    if (text.empty()) throw InvalidInput("this pipeline needs --nu r0,r_inf,s");
    const auto parts = io::parse_slopes(text, p);
    if (parts.size() != 3 || parts[2].is_infinite()) throw InvalidInput("--nu expects r0,r_inf,s with s finite");
    NuParams nu{parts[0], parts[1], parts[2].value()};
    nu.validate();
    return nu;
}

/// Fills result and exit code from a certificate.
inline void certificate_result(const Certificate& c, Outcome& out) {
    out.report.result["certificate"] = io::certificate_to_json(c);
    if (!c.valid()) {
        const auto* s = c.find(c.failing_step());
        out.exit_code = kRefuted;
        std::ostringstream msg;
        msg << "step '" << c.failing_step() << "' fails";
        if (s) msg << ": " << s->inequality() << " with realized constant " << io::number(s->constant).dump();
        out.report.error = msg.str();
    }
}

inline std::string flat_csv(const json& result) {
    std::string text = "key,value\n";
    for (const auto& [k, v] : result.items())
        if (!v.is_object() && !v.is_array()) text += k + "," + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
    return text;
}

// ---- subcommands

inline void run_exponents(const Options& o, Outcome& out) {
    const int lo = o.n_max ? std::min(o.n, *o.n_max) : o.n;
    const int hi = o.n_max ? *o.n_max : o.n;
    if (o.n_max && o.n > *o.n_max) throw InvalidInput("--n must not exceed --n-max");
    const auto table = exponents::comparison_table(lo, hi);
    auto& r = out.report.result;
    r["advanced_alpha"] = exponents::advanced_fixed();
    r["basic_alpha"] = exponents::basic_fixed();
    if (!o.n_max) {
        const auto row = table.rows.front();
        const auto ex = exponents::maximal_exponents(Rational(o.n));
        r["n"] = o.n;
        r["minkowski"] = row.minkowski;
        r["hausdorff"] = row.hausdorff;
        r["maximal_p"] = row.maximal_p;
        r["maximal_p_exact"] = to_string(ex.p);
        r["maximal_q"] = row.maximal_q;
        r["maximal_q_exact"] = to_string(ex.q);
        r["wolff"] = row.wolff;
        r["new_minkowski"] = row.new_minkowski;
        r["new_hausdorff"] = row.new_hausdorff;
        r["new_maximal"] = row.new_maximal;
    } else {
        r["table"] = io::table_to_json(table);
    }
    if (o.format == "csv") out.text = io::table_csv(table);
}

inline void run_sd_verify(const Options& o, Outcome& out) {
    if (o.input.empty()) throw InvalidInput("sd-verify needs --input");
    const auto inst = io::instance_from_json(io::read_json(o.input));
    const auto alpha = parse_rational(o.alpha, "--alpha");
    const auto C = parse_rational(o.constant, "--C");
    const auto maxp = inst.max_projection();
    auto& r = out.report.result;
    r["size"] = inst.G.size();
    r["max_projection"] = maxp;
    r["alpha"] = to_string(alpha);
    r["C"] = to_string(C);
    if (maxp > 1) r["empirical_exponent"] = empirical_exponent(inst);
    // #G <= C max^alpha decided exactly
    const std::vector<PowerTerm> lhs{{BigRational(static_cast<std::int64_t>(inst.G.size())), Rational(1)}};
    const std::vector<PowerTerm> rhs{{BigRational(C.numerator(), C.denominator()), Rational(1)},
                                     {BigRational(static_cast<std::int64_t>(maxp)), alpha}};
    const bool holds = compare_products(lhs, rhs) <= 0;
    r["holds"] = holds;
    if (!holds) {
        out.exit_code = kRefuted;
        out.report.error = "#G <= C max_r #pi_r(G)^alpha fails: " + std::to_string(inst.G.size()) + " > " + to_string(C) +
                           " * " + std::to_string(maxp) + "^" + to_string(alpha);
    }
}

inline void run_sd_search(const Options& o, Outcome& out) {
    if (o.p == 0 || o.slopes.empty() || o.cap == 0) throw InvalidInput("sd-search needs --p, --slopes and --cap");
    const auto mode = o.mode == "exhaustive" ? SearchMode::exhaustive : SearchMode::branch_and_bound;
    const auto res =
        extremal_search(o.p, io::parse_slopes(o.slopes, o.p), o.cap, mode, o.seed, o.budget, std::max(1u, o.threads));
    out.report.result["search"] = io::search_result_to_json(res);
}

inline void run_sd_pipeline(const Options& o, Outcome& out) {
    if (o.input.empty()) throw InvalidInput("sd-pipeline needs --input");
    const auto G = io::config_from_json(io::read_json(o.input));
    const auto p = G.space().p();
    const auto inner = parse_rational(o.inner_alpha, "--inner-alpha");
    const auto C = parse_rational(o.constant, "--C");
    if (o.which == "012inf") {
        certificate_result(pipeline_012inf(G), out);
    } else if (o.which == "conviviality") {
        const auto rs = io::parse_slopes(o.slopes, p);
        if (rs.size() != 2) throw InvalidInput("conviviality needs --slopes r1,r2");
        certificate_result(pipeline_conviviality(G, parse_nu(o.nu, p), rs[0], rs[1]), out);
    } else if (o.which == "substructure") {
        const auto sub = substructure(G, parse_nu(o.nu, p), io::parse_slopes(o.slopes, p));
        out.report.result["sub"] = io::config_to_json(sub.sub);
        out.report.result["realized_constant"] = io::number(sub.realized_constant);
        certificate_result(sub.cert, out);
    } else if (o.which == "iterate") {
        certificate_result(iterate_once(G, parse_nu(o.nu, p), io::parse_slopes(o.slopes, p), inner, C), out);
    } else {
        const auto tree = build_slope_tree(p, o.M, o.seed);
        certificate_result(pipeline_advanced(G, tree, inner, C), out);
    }
}

inline json family_block(const grid::LineFamily& F, const Options& o) {
    if (!o.save_family.empty()) io::write_text(o.save_family, io::dump(io::family_to_json(F)));
    return {{"n", F.params.n}, {"N", F.params.N}, {"lines", F.size()}, {"separated", F.separated}};
}

inline void run_grid_validate(const Options& o, Outcome& out) {
    const auto F = load_family(o);
    const auto rep = grid::validate_family(F);
    auto& r = out.report.result;
    r["family"] = family_block(F, o);
    r["validation"] = io::family_report_to_json(rep);
    const auto Y = load_shading(o, F);
    const grid::TwoEndsParams te{o.sigma, o.slack};
    r["shading"] = io::shading_stats_to_json(grid::shading_stats(F, Y));
    r["two_ends"] = io::two_ends_to_json(grid::two_ends_check(F, Y, te), te);
    if (!rep.ok) {
        out.exit_code = kRefuted;
        out.report.error = !rep.separation_ok ? "directions are not 1/N separated"
                           : !rep.capacity_ok ? "family exceeds N^{n-1} lines"
                                              : "angle-cap count exceeds its constant";
    }
}

inline void run_grid_bush(const Options& o, Outcome& out) {
    const auto F = load_family(o);
    const auto Y = load_shading(o, F);
    grid::BushParams bp;
    bp.two_ends = {o.sigma, o.slack};
    out.report.result["family"] = family_block(F, o);
    certificate_result(grid::bush_certificate(F, Y, bp), out);
}

inline void run_grid_sixslices(const Options& o, Outcome& out) {
    const auto F = load_family(o);
    const auto Y = load_shading(o, F);
    grid::SixSlicesParams sp;
    sp.two_ends = {o.sigma, o.slack};
    auto& r = out.report.result;
    r["family"] = family_block(F, o);
    try {
        const auto res = grid::six_slices_to_sd(F, Y, o.seed, sp);
        r["route"] = "six_slices";
        r["instance"] = io::grid_instance_to_json(res.instance);
        r["heights"] = res.heights;
        r["k"] = res.k;
        r["d"] = io::rational_to_json(res.d);
        certificate_result(res.cert, out);
    } catch (const BushBranchApplies& e) {
        // small density: the two-slice bound already suffices
        r["route"] = "bush";
        r["reason"] = e.what();
        grid::BushParams bp;
        bp.two_ends = sp.two_ends;
        certificate_result(grid::bush_certificate(F, Y, bp), out);
    }
}

inline void run_grid_maximal(const Options& o, Outcome& out) {
    const auto F = load_family(o);
    const auto Y = load_shading(o, F);
    out.report.result["family"] = family_block(F, o);
    out.report.result["maximal"] = io::maximal_to_json(grid::maximal_experiment(F, Y));
}

}  // namespace detail

/// Parses argv (without the program name) and runs one subcommand.
inline Outcome run(const std::vector<std::string>& args) {
    using namespace detail;
    Outcome out;
    Options o;
    CLI::App app{"Exact experiments on slope projections, exponent bounds and grid line families", "kakeya_lab"};
    app.require_subcommand(1);

    auto* ex = app.add_subcommand("exponents", "dimension and maximal-function exponents");
    ex->add_option("--n", o.n, "dimension (first row when --n-max is given)")->capture_default_str();
    ex->add_option("--n-max", o.n_max, "emit the comparison table up to this dimension");
    shared_flags(ex, o);

    auto* verify = app.add_subcommand("sd-verify", "check #G <= C max_r #pi_r(G)^alpha on an instance file");
    verify->add_option("--input", o.input, "instance JSON")->required();
    verify->add_option("--alpha", o.alpha, "exponent")->capture_default_str();
    verify->add_option("--C", o.constant, "constant")->capture_default_str();
    shared_flags(verify, o);

    auto* search = app.add_subcommand("sd-search", "largest configuration with every projection below a cap");
    search->add_option("--p", o.p, "prime modulus")->required();
    search->add_option("--slopes", o.slopes, "comma separated slopes, inf allowed")->required();
    search->add_option("--cap", o.cap, "projection cap")->required();
    search->add_option("--mode", o.mode)->check(CLI::IsMember({"exhaustive", "branch_and_bound"}))->capture_default_str();
    shared_flags(search, o);

    auto* pipe = app.add_subcommand("sd-pipeline", "replay a pipeline on a configuration with exact counts");
    pipe->add_option("--which", o.which)
        ->check(CLI::IsMember({"012inf", "conviviality", "substructure", "iterate", "advanced"}))
        ->capture_default_str();
    pipe->add_option("--input", o.input, "configuration or instance JSON")->required();
    pipe->add_option("--nu", o.nu, "r0,r_inf,s");
    pipe->add_option("--slopes", o.slopes, "pipeline slopes");
    pipe->add_option("--M", o.M, "slope tree depth")->capture_default_str();
    pipe->add_option("--inner-alpha", o.inner_alpha, "inner exponent")->capture_default_str();
    pipe->add_option("--C", o.constant, "inner constant")->capture_default_str();
    shared_flags(pipe, o);

    auto* gv = app.add_subcommand("grid-validate", "family separation and cap counts, shading statistics");
    grid_flags(gv, o, true);
    shared_flags(gv, o);
    auto* gb = app.add_subcommand("grid-bush", "two-slice lower bound certificate");
    grid_flags(gb, o, true);
    shared_flags(gb, o);
    auto* gs = app.add_subcommand("grid-sixslices", "six-slice reduction to a slope instance");
    grid_flags(gs, o, true);
    shared_flags(gs, o);
    auto* gm = app.add_subcommand("grid-maximal", "union size against the maximal-function bounds");
    grid_flags(gm, o, true);
    shared_flags(gm, o);

    std::vector<std::string> argv_store{"kakeya_lab"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out.text = app.help();
        return out;
    } catch (const CLI::ParseError& e) {
        out.exit_code = kInvalid;
        const auto subs = app.get_subcommands();
        out.diagnostics = std::string(e.what()) + "\n" + (subs.empty() ? app.help() : subs.front()->help());
        return out;
    }

    auto* sub = app.get_subcommands().front();
    out.report.command = sub->get_name();
    out.report.config = echo_config(sub);
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto& name = out.report.command;
        if (name == "exponents") run_exponents(o, out);
        else if (name == "sd-verify") run_sd_verify(o, out);
        else if (name == "sd-search") run_sd_search(o, out);
        else if (name == "sd-pipeline") run_sd_pipeline(o, out);
        else if (name == "grid-validate") run_grid_validate(o, out);
        else if (name == "grid-bush") run_grid_bush(o, out);
        else if (name == "grid-sixslices") run_grid_sixslices(o, out);
        else run_grid_maximal(o, out);
    } catch (const InvalidInput& e) {
        out.exit_code = kInvalid;
        out.report.error = e.what();
    } catch (const TwoEndsFailed& e) {
        out.exit_code = kRefuted;
        out.report.error = e.what();
    } catch (const PigeonholeEmpty& e) {
        out.exit_code = kRefuted;
        out.report.error = e.what();
    } catch (const Error& e) {
        out.exit_code = kInvalid;
        out.report.error = e.what();
    }
    out.report.exit_code = out.exit_code;
    out.report.wall_clock_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (!out.report.error.empty()) out.diagnostics = out.report.error + "\n";
    if (out.text.empty())
        out.text = o.format == "csv" ? flat_csv(out.report.result) : io::dump(out.report.to_json());
    if (!o.output.empty()) {
        try {
            io::write_text(o.output, out.text);
        } catch (const std::runtime_error& e) {
            out.exit_code = kInvalid;
            out.diagnostics += std::string(e.what()) + "\n";
        }
    }
    return out;
}

}  // namespace kakeya::cli
