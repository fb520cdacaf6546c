#pragma once

// JSON and CSV forms of configurations, instances, certificates, search
// results, line families and shadings, plus the report envelope used by the
// command-line tool.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kakeya/exponents.hpp"
#include "kakeya/kakeya_grid.hpp"
#include "kakeya/sd_engine.hpp"

namespace kakeya::io {

using json = nlohmann::json;

/// Recorded in every report next to the seed.
inline constexpr const char* kPrng = "mt19937_64";
inline constexpr int kSchemaVersion = 1;

/// Schema and file errors carry the offending field path.
inline InvalidInput schema_error(const std::string& where, const std::string& what) {
    return InvalidInput(where + ": " + what);
}

namespace detail {

inline const json& field(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object()) throw schema_error(where, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw schema_error(where, "missing field '" + key + "'");
    return *it;
}

inline std::int64_t as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw schema_error(where, "expected an integer, got " + j.dump());
    return j.get<std::int64_t>();
}

inline std::uint64_t as_uint(const json& j, const std::string& where) {
    const auto v = as_int(j, where);
    if (v < 0) throw schema_error(where, "expected a non-negative integer, got " + std::to_string(v));
    return static_cast<std::uint64_t>(v);
}

inline const json& as_array(const json& j, const std::string& where) {
    if (!j.is_array()) throw schema_error(where, "expected an array");
    return j;
}

inline std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

}  // namespace detail

// ---- scalars

/// Non-integral doubles that JSON cannot hold become "inf", "-inf" or "nan".
inline json number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

inline json rational_to_json(const Rational& q) {
    if (q.denominator() == 1) return q.numerator();
    return to_string(q);
}

/// Integers or "a/b" strings.
inline Rational rational_from_json(const json& j, const std::string& where) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (!j.is_string()) throw schema_error(where, "expected an integer or an \"a/b\" string");
    const auto s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const auto v = std::stoll(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return Rational(v);
        }
        const auto num = std::stoll(s.substr(0, slash), &used);
        if (used != slash) throw std::invalid_argument(s);
        const auto rest = s.substr(slash + 1);
        const auto den = std::stoll(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(s);
        if (den == 0) throw schema_error(where, "zero denominator in '" + s + "'");
        return Rational(num, den);
    } catch (const std::logic_error&) {
        throw schema_error(where, "cannot read '" + s + "' as a rational");
    }
}

inline json slope_to_json(const Slope& r) {
    if (r.is_infinite()) return "inf";
    return r.value().value();
}

/// An integer (reduced mod p) or the string "inf".
inline Slope slope_from_json(const json& j, std::uint64_t p, const std::string& where) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return slope_inf();
        throw schema_error(where, "slope must be an integer or \"inf\", got " + j.dump());
    }
    return slope_of(detail::as_int(j, where), p);
}

/// Comma separated slope list such as "0,1,2,inf".
inline std::vector<Slope> parse_slopes(const std::string& text, std::uint64_t p) {
    std::vector<Slope> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw InvalidInput("empty slope in list '" + text + "'");
        if (tok == "inf") {
            out.push_back(slope_inf());
            continue;
        }
        try {
            std::size_t used = 0;
            const auto v = std::stoll(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(slope_of(v, p));
        } catch (const std::logic_error&) {
            throw InvalidInput("cannot read slope '" + tok + "'");
        }
    }
    return out;
}

// ---- configurations and instances

inline json zelem_to_json(const Space& z, ZElem x) {
    if (z.d() == 1) return x.code;
    return z.digits(x);
}

inline ZElem zelem_from_json(const Space& z, const json& j, const std::string& where) {
    if (z.d() == 1) return z.make(detail::as_int(j, where));
    detail::as_array(j, where);
    if (j.size() != z.d())
        throw schema_error(where, "expected " + std::to_string(z.d()) + " coordinates, got " + std::to_string(j.size()));
    std::vector<std::int64_t> digits;
    for (std::size_t i = 0; i < j.size(); ++i) digits.push_back(detail::as_int(j[i], detail::at(where, i)));
    return z.make(digits);
}

inline json config_to_json(const Config& G) {
    const auto& z = G.space();
    json pts = json::array();
    for (const auto& g : G.points()) pts.push_back(json::array({zelem_to_json(z, g.a), zelem_to_json(z, g.b)}));
    return {{"p", z.p()}, {"d", z.d()}, {"points", pts}};
}

/// Re-runs the Config invariants; a pi_{-1} collision names both points.
inline Config config_from_json(const json& j) {
    const auto p = detail::as_uint(detail::field(j, "p", "config"), "config.p");
    unsigned d = 1;
    if (j.contains("d")) d = static_cast<unsigned>(detail::as_uint(j["d"], "config.d"));
    const Space z(p, d);
    const auto& pts = detail::as_array(detail::field(j, "points", "config"), "config.points");
    std::vector<Point> points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto where = detail::at("config.points", i);
        if (!pts[i].is_array() || pts[i].size() != 2) throw schema_error(where, "expected a pair [a, b]");
        points.push_back(Point{zelem_from_json(z, pts[i][0], where + "[0]"), zelem_from_json(z, pts[i][1], where + "[1]")});
    }
    return Config(z, std::move(points));
}

inline json instance_to_json(const SdInstance& inst) {
    auto j = config_to_json(inst.G);
    json slopes = json::array();
    for (const auto& r : inst.R) slopes.push_back(slope_to_json(r));
    j["slopes"] = slopes;
    if (inst.cap) j["cap"] = *inst.cap;
    return j;
}

inline SdInstance instance_from_json(const json& j) {
    SdInstance inst;
    inst.G = config_from_json(j);
    const auto p = inst.G.space().p();
    const auto& slopes = detail::as_array(detail::field(j, "slopes", "instance"), "instance.slopes");
    for (std::size_t i = 0; i < slopes.size(); ++i)
        inst.R.push_back(slope_from_json(slopes[i], p, detail::at("instance.slopes", i)));
    if (j.contains("cap") && !j["cap"].is_null()) inst.cap = detail::as_uint(j["cap"], "instance.cap");
    inst.validate();
    return inst;
}

// ---- certificates and search results

inline json monomial_to_json(const Monomial& m) {
    json out = json::array();
    for (const auto& f : m.factors()) {
        json e = {{"exponent", rational_to_json(f.exponent)}};
        if (f.count.empty())
            e["constant"] = f.constant.str();
        else
            e["count"] = f.count;
        out.push_back(e);
    }
    return out;
}

inline json step_to_json(const Step& s) {
    json j = {{"id", s.id},
              {"desc", s.desc},
              {"counts", s.counts},
              {"relation", relation_symbol(s.relation)},
              {"inequality", s.inequality()},
              {"lhs", monomial_to_json(s.lhs)},
              {"rhs", monomial_to_json(s.rhs)},
              {"constant", number(s.constant)},
              {"ok", s.ok}};
    if (!s.note.empty()) j["note"] = s.note;
    return j;
}

inline json certificate_to_json(const Certificate& c) {
    json steps = json::array();
    for (const auto& s : c.steps()) steps.push_back(step_to_json(s));
    json j = {{"name", c.name()},
              {"valid", c.valid()},
              {"steps", steps},
              {"results", c.results()},
              {"notes", c.notes()}};
    if (!c.valid()) {
        const auto* s = c.find(c.failing_step());
        j["failing_step"] = c.failing_step();
        if (s) {
            j["failing_inequality"] = s->inequality();
            j["failing_constant"] = number(s->constant);
        }
    }
    return j;
}

inline json search_result_to_json(const SearchResult& r) {
    json slopes = json::array();
    for (const auto& s : r.searched_slopes) slopes.push_back(slope_to_json(s));
    return {{"max_size", r.max_size},
            {"witness", config_to_json(r.witness)},
            {"exhaustive", r.exhaustive},
            {"nodes_explored", r.nodes_explored},
            {"mode", to_string(r.mode)},
            {"searched_slopes", slopes}};
}

// ---- exponent table

inline const std::vector<std::string>& table_columns() {
    static const std::vector<std::string> cols{"n",    "minkowski",    "hausdorff",    "maximal_p",          "maximal_q",
                                               "wolff", "kt_minkowski", "kt_hausdorff", "bourgain_hausdorff", "best"};
    return cols;
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

inline std::vector<double> table_values(const exponents::BoundRow& r) {
    return {static_cast<double>(r.n), r.minkowski, r.hausdorff, r.maximal_p, r.maximal_q, r.wolff, r.kt_minkowski,
            r.kt_hausdorff, r.bourgain_hausdorff, r.best};
}

/// Header line always present, one row per dimension.
inline std::string table_csv(const exponents::BoundTable& t) {
    std::string out;
    const auto& cols = table_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += "\n";
    for (const auto& r : t.rows) {
        const auto v = table_values(r);
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + (i == 0 ? std::to_string(r.n) : fmt(v[i]));
        out += "\n";
    }
    return out;
}

inline json table_to_json(const exponents::BoundTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        json row;
        const auto v = table_values(r);
        for (std::size_t i = 0; i < v.size(); ++i) row[table_columns()[i]] = v[i];
        row["n"] = r.n;
        row["new_minkowski"] = r.new_minkowski;
        row["new_hausdorff"] = r.new_hausdorff;
        row["new_maximal"] = r.new_maximal;
        rows.push_back(row);
    }
    return {{"rows", rows}, {"hausdorff_minkowski_crossover", t.hausdorff_minkowski_crossover}};
}

// ---- line families and shadings

inline json family_to_json(const grid::LineFamily& F) {
    json lines = json::array();
    for (const auto& T : F.lines) {
        json base = json::array(), dir = json::array();
        for (const auto& q : T.base) base.push_back(rational_to_json(q));
        for (const auto& q : T.direction) dir.push_back(rational_to_json(q));
        lines.push_back({{"base", base}, {"dir", dir}});
    }
    const auto& g = F.params;
    return {{"n", g.n}, {"N", g.N}, {"c_ball", g.c_ball}, {"c_line", g.c_line}, {"lines", lines}};
}

/// Every line is rebuilt, so membership, cap and cardinality checks rerun.
inline grid::LineFamily family_from_json(const json& j) {
    grid::GridParams g;
    g.n = static_cast<int>(detail::as_int(detail::field(j, "n", "family"), "family.n"));
    g.N = detail::as_int(detail::field(j, "N", "family"), "family.N");
    if (j.contains("c_ball")) g.c_ball = detail::as_int(j["c_ball"], "family.c_ball");
    if (j.contains("c_line")) g.c_line = detail::as_int(j["c_line"], "family.c_line");
    g.validate();
    const auto& lines = detail::as_array(detail::field(j, "lines", "family"), "family.lines");
    std::vector<grid::DLine> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto where = detail::at("family.lines", i);
        grid::RVec base, dir;
        const auto& b = detail::as_array(detail::field(lines[i], "base", where), where + ".base");
        const auto& d = detail::as_array(detail::field(lines[i], "dir", where), where + ".dir");
        if (b.size() != static_cast<std::size_t>(g.n) || d.size() != static_cast<std::size_t>(g.n))
            throw schema_error(where, "base and dir need " + std::to_string(g.n) + " coordinates");
        for (std::size_t k = 0; k < b.size(); ++k) base.push_back(rational_from_json(b[k], detail::at(where + ".base", k)));
        for (std::size_t k = 0; k < d.size(); ++k) dir.push_back(rational_from_json(d[k], detail::at(where + ".dir", k)));
        try {
            out.push_back(grid::make_line(g, std::move(base), std::move(dir)));
        } catch (const InvalidInput& e) {
            throw schema_error(where, e.what());
        }
    }
    return grid::make_family(g, std::move(out));
}

/// {"0": [point indices], "1": [...], ...}; lines without a key are unshaded.
inline json shading_to_json(const grid::Shading& Y) {
    json j = json::object();
    for (std::size_t i = 0; i < Y.chosen.size(); ++i) j[std::to_string(i)] = Y.chosen[i];
    return j;
}

inline grid::Shading shading_from_json(const json& j, const grid::LineFamily& F) {
    if (!j.is_object()) throw schema_error("shading", "expected an object keyed by line index");
    grid::Shading Y;
    Y.chosen.assign(F.size(), {});
    for (const auto& [key, val] : j.items()) {
        const auto where = "shading." + key;
        std::size_t idx = 0;
        try {
            std::size_t used = 0;
            idx = std::stoul(key, &used);
            if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::logic_error&) {
            throw schema_error(where, "key is not a line index");
        }
        if (idx >= F.size()) throw schema_error(where, "family has only " + std::to_string(F.size()) + " lines");
        detail::as_array(val, where);
        for (std::size_t k = 0; k < val.size(); ++k) Y.chosen[idx].push_back(detail::as_uint(val[k], detail::at(where, k)));
    }
    grid::validate_shading(F, Y);
    return Y;
}

inline json family_report_to_json(const grid::FamilyReport& r) {
    json rows = json::array();
    for (const auto& a : r.angle_rows)
        rows.push_back({{"theta", rational_to_json(a.theta)}, {"max_count", a.max_count}, {"constant", number(a.constant)}});
    return {{"count", r.count},
            {"capacity_constant", number(r.capacity_constant)},
            {"capacity_ok", r.capacity_ok},
            {"min_separation", number(r.min_separation)},
            {"separation_ok", r.separation_ok},
            {"angle_rows", rows},
            {"angle_constant", number(r.angle_constant)},
            {"angle_ok", r.angle_ok},
            {"ok", r.ok}};
}

inline json shading_stats_to_json(const grid::ShadingStats& st) {
    json hist = json::object();
    for (const auto& [m, c] : st.mu_histogram) hist[std::to_string(m)] = c;
    return {{"mean_density", number(st.mean_density)},
            {"min_density", number(st.min_density)},
            {"max_density", number(st.max_density)},
            {"mass", st.mass},
            {"cells", st.cells},
            {"union_size", st.union_size},
            {"mu_histogram", hist},
            {"saturated", st.saturated}};
}

inline json two_ends_to_json(const grid::TwoEndsReport& r, const grid::TwoEndsParams& params) {
    json j = {{"sigma", params.sigma}, {"slack", params.slack}, {"max_ratio", number(r.max_ratio)}, {"pass", r.pass}};
    if (!r.lines.empty()) {
        const auto& w = r.lines[r.worst_line];
        j["worst_line"] = r.worst_line;
        j["worst_radius"] = rational_to_json(w.radius);
        j["worst_center"] = w.center.x;
    }
    return j;
}

inline json grid_instance_to_json(const grid::GridSdInstance& inst) {
    json pts = json::array(), slopes = json::array();
    for (const auto& [a, b] : inst.points) pts.push_back(json::array({a, b}));
    for (std::size_t i = 0; i < inst.slopes.size(); ++i)
        slopes.push_back({{"name", i < inst.slope_names.size() ? inst.slope_names[i] : std::to_string(i)},
                          {"value", inst.slopes[i] ? rational_to_json(*inst.slopes[i]) : json("inf")}});
    return {{"n", inst.n}, {"N", inst.N}, {"points", pts}, {"slopes", slopes}, {"s", rational_to_json(inst.s)}};
}

inline json maximal_to_json(const grid::MaximalReport& r) {
    return {{"union_size", r.union_size},
            {"count", r.count},
            {"N", r.N},
            {"n", r.n},
            {"lambda", number(r.lambda)},
            {"rhs_rwt", number(r.rhs_rwt)},
            {"rhs_final", number(r.rhs_final)},
            {"ratio_rwt", number(r.ratio_rwt)},
            {"ratio_final", number(r.ratio_final)}};
}

// ---- files and reports

inline json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput(path + ": cannot open");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

/// Sorted keys (nlohmann objects are ordered maps), two-space indent, trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << text;
    if (!out) throw std::runtime_error(path + ": write failed");
}

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline std::string config_hash(const json& config) { return fnv1a(config.dump()); }

/// The echoed config and the payload are deterministic; only wall_clock_ms varies between runs.
struct Report {
    std::string command;
    json config = json::object();
    json result = json::object();
    int exit_code = 0;
    std::string error;
    double wall_clock_ms = 0;

    json to_json() const {
        json j = {{"command", command},
                  {"config", config},
                  {"config_hash", config_hash(config)},
                  {"prng", kPrng},
                  {"schema_version", kSchemaVersion},
                  {"result", result},
                  {"exit_code", exit_code},
                  {"wall_clock_ms", wall_clock_ms}};
        if (!error.empty()) j["error"] = error;
        return j;
    }
};

}  // namespace kakeya::io
