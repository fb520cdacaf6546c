#pragma once

// Shadings of line families, the two-ends check, the two-slice (bush) bound
// and the maximal-function ratio experiment.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kakeya/certificate.hpp"
#include "kakeya/grid/geometry.hpp"

namespace kakeya::grid {

/// Y(T) as sorted indices into T.members, one list per line of the family.
struct Shading {
    std::vector<std::vector<std::size_t>> chosen;
};

inline void validate_shading(const LineFamily& F, const Shading& Y) {
    if (Y.chosen.size() != F.size())
        throw InvalidInput("shading covers " + std::to_string(Y.chosen.size()) + " lines, family has " +
                           std::to_string(F.size()));
    for (std::size_t i = 0; i < F.size(); ++i) {
        const auto& c = Y.chosen[i];
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (c[j] >= F.lines[i].size())
                throw InvalidInput("Y(T) is not contained in T: line " + std::to_string(i) + " has no point " +
                                   std::to_string(c[j]));
            if (j > 0 && c[j - 1] >= c[j])
                throw InvalidInput("shading of line " + std::to_string(i) + " is not strictly increasing");
        }
    }
}

inline Shading shading_where(const LineFamily& F, const std::function<bool(std::size_t, const GridPoint&)>& keep) {
    Shading Y;
    for (std::size_t i = 0; i < F.size(); ++i) {
        Y.chosen.emplace_back();
        for (std::size_t j = 0; j < F.lines[i].size(); ++j)
            if (keep(i, F.lines[i].members[j])) Y.chosen.back().push_back(j);
    }
    return Y;
}

inline Shading full_shading(const LineFamily& F) {
    return shading_where(F, [](std::size_t, const GridPoint&) { return true; });
}

/// Every other member point of each line, starting with the first.
inline Shading alternate_shading(const LineFamily& F) {
    Shading Y;
    for (const auto& T : F.lines) {
        Y.chosen.emplace_back();
        for (std::size_t j = 0; j < T.size(); j += 2) Y.chosen.back().push_back(j);
    }
    return Y;
}

/// Keeps each point independently with probability fill.
inline Shading random_shading(const LineFamily& F, double fill, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::uint64_t cut =
        fill >= 1.0 ? ~std::uint64_t{0} : static_cast<std::uint64_t>(std::max(fill, 0.0) * 18446744073709551616.0);
    return shading_where(F, [&](std::size_t, const GridPoint&) { return fill >= 1.0 || rng() < cut; });
}

/// Member points whose height h satisfies lo <= h <= hi (scaled units).
inline Shading height_band_shading(const LineFamily& F, std::int64_t lo, std::int64_t hi) {
    return shading_where(F, [=](std::size_t, const GridPoint& p) { return p.height() >= lo && p.height() <= hi; });
}

using CountingFunction = std::map<GridPoint, std::int64_t>;

inline CountingFunction counting_function(const LineFamily& F, const Shading& Y) {
    CountingFunction mu;
    for (std::size_t i = 0; i < F.size(); ++i)
        for (auto j : Y.chosen[i]) ++mu[F.lines[i].members[j]];
    return mu;
}

struct ShadingStats {
    std::vector<double> density;  // #Y(T) / #T
    double mean_density = 0;      // mass / sum #T
    double min_density = 0;
    double max_density = 0;
    std::int64_t mass = 0;
    std::int64_t cells = 0;  // sum #T
    std::int64_t union_size = 0;
    std::map<std::int64_t, std::int64_t> mu_histogram;  // multiplicity -> number of points
    bool saturated = false;
};

/// Saturated means mass >= N #F / 4; the upper side mass <= sum #T always holds.
inline ShadingStats shading_stats(const LineFamily& F, const Shading& Y) {
    validate_shading(F, Y);
    ShadingStats st;
    for (std::size_t i = 0; i < F.size(); ++i) {
        const auto y = static_cast<std::int64_t>(Y.chosen[i].size());
        const auto t = static_cast<std::int64_t>(F.lines[i].size());
        st.density.push_back(static_cast<double>(y) / static_cast<double>(t));
        st.mass += y;
        st.cells += t;
    }
    if (!st.density.empty()) {
        st.min_density = *std::min_element(st.density.begin(), st.density.end());
        st.max_density = *std::max_element(st.density.begin(), st.density.end());
    }
    st.mean_density = st.cells ? static_cast<double>(st.mass) / static_cast<double>(st.cells) : 0.0;
    const auto mu = counting_function(F, Y);
    st.union_size = static_cast<std::int64_t>(mu.size());
    for (const auto& [x, m] : mu) ++st.mu_histogram[m];
    st.saturated = st.mass > 0 && 4 * st.mass >= F.params.N * static_cast<std::int64_t>(F.size());
    return st;
}

struct TwoEndsParams {
    double sigma = 0.125;
    /// allowed ratio; a factor-2 window
    double slack = 2.0;

    void validate() const {
        if (!(sigma > 0)) throw InvalidInput("two-ends exponent sigma must be positive");
        if (!(slack > 0)) throw InvalidInput("two-ends slack must be positive");
    }
};

struct TwoEndsLine {
    double max_ratio = 0;
    Rational radius = 0;  // where the maximum is attained
    GridPoint center;
    bool pass = true;
};

struct TwoEndsReport {
    std::vector<TwoEndsLine> lines;
    double max_ratio = 0;
    std::size_t worst_line = 0;
    bool pass = true;
};

/// For each line: max over dyadic r in [1/N, 1] and centers x in Y(T) of
/// #(Y(T) ∩ B(x, r)) / (r^sigma #Y(T)). The normalization lambda N of the
/// two-ends condition is #Y(T) itself.
inline TwoEndsReport two_ends_check(const LineFamily& F, const Shading& Y, const TwoEndsParams& params = {}) {
    params.validate();
    validate_shading(F, Y);
    const auto N = F.params.N;
    TwoEndsReport rep;
    for (std::size_t i = 0; i < F.size(); ++i) {
        TwoEndsLine L;
        std::vector<const GridPoint*> pts;
        for (auto j : Y.chosen[i]) pts.push_back(&F.lines[i].members[j]);
        const double y = static_cast<double>(pts.size());
        for (std::int64_t rs = 1; rs <= N; rs *= 2) {
            const double r = static_cast<double>(rs) / static_cast<double>(N);
            const double denom = std::pow(r, params.sigma) * y;
            // members are sorted by first coordinate, so scan all; lines are short
            for (const auto* c : pts) {
                std::int64_t cnt = 0;
                for (const auto* q : pts)
                    if (std::abs(q->height() - c->height()) <= rs && dist2(*c, *q) <= rs * rs) ++cnt;
                const double ratio = static_cast<double>(cnt) / denom;
                if (ratio > L.max_ratio) {
                    L.max_ratio = ratio;
                    L.radius = Rational(rs, N);
                    L.center = *c;
                }
            }
        }
        L.pass = L.max_ratio <= params.slack;
        if (L.max_ratio > rep.max_ratio) {
            rep.max_ratio = L.max_ratio;
            rep.worst_line = i;
        }
        rep.pass = rep.pass && L.pass;
        rep.lines.push_back(std::move(L));
    }
    return rep;
}

namespace detail {

inline std::int64_t i64(std::size_t n) { return static_cast<std::int64_t>(n); }

/// Distinct heights of Y(T), sorted.
inline std::vector<std::int64_t> shaded_heights(const DLine& T, const std::vector<std::size_t>& chosen) {
    std::set<std::int64_t> h;
    for (auto j : chosen) h.insert(T.members[j].height());
    return {h.begin(), h.end()};
}

/// |a - b| >= gap, heights scaled by N.
inline bool far(std::int64_t a, std::int64_t b, std::int64_t N, const Rational& gap) {
    return !(Rational(std::abs(a - b), N) < gap);
}

}  // namespace detail

struct BushParams {
    TwoEndsParams two_ends;
    /// separation window for the pair of slices
    Rational gap{1, 4};
    /// predicted-order window
    std::int64_t slack = 16;
};

/// The two-slice argument with exact counts. Throws TwoEndsFailed when the
/// shading concentrates.
inline Certificate bush_certificate(const LineFamily& F, const Shading& Y, const BushParams& params = {}) {
    const auto st = shading_stats(F, Y);
    const auto te = two_ends_check(F, Y, params.two_ends);
    if (!te.pass)
        throw TwoEndsFailed("two-ends ratio " + std::to_string(te.max_ratio) + " on line " +
                            std::to_string(te.worst_line) + " exceeds " + std::to_string(params.two_ends.slack));
    const auto& g = F.params;
    const auto N = g.N;
    Certificate cert("bush");
    cert.record("two-ends", "max over lines, radii and centers of #(Y(T) ∩ B(x,r)) / (r^sigma #Y(T))", {}, {}, {},
                "ratio " + std::to_string(te.max_ratio) + " within slack " + std::to_string(params.two_ends.slack));

    std::vector<std::vector<std::int64_t>> H(F.size());
    std::int64_t triples = 0, h2 = 0;
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> pair_lines;
    for (std::size_t i = 0; i < F.size(); ++i) {
        H[i] = detail::shaded_heights(F.lines[i], Y.chosen[i]);
        h2 += detail::i64(H[i].size() * H[i].size());
        for (auto a : H[i])
            for (auto b : H[i])
                if (detail::far(a, b, N, params.gap)) {
                    ++triples;
                    ++pair_lines[{a, b}];
                }
    }
    cert.check("easy-two-ends", "#{(T, t1, t2) : t1, t2 in heights of Y(T), |t1 - t2| >= gap} >= sum_T #heights^2 / slack",
               {{"triples", triples}, {"h2", h2}, {"slack", params.slack}}, Monomial::count("triples").times("slack"),
               Relation::ge, Monomial::count("h2"));

    if (pair_lines.empty()) throw PigeonholeEmpty("pigeonhole-t1t2", "no line has two separated shaded heights");
    std::pair<std::int64_t, std::int64_t> best{};
    std::int64_t m = -1;
    for (const auto& [pr, c] : pair_lines)
        if (c > m) {
            m = c;
            best = pr;
        }
    const auto [t1, t2] = best;
    const auto mu = counting_function(F, Y);
    std::set<std::int64_t> heights;
    std::int64_t e1 = 0, e2 = 0;
    for (const auto& [x, c] : mu) {
        heights.insert(x.height());
        e1 += x.height() == t1;
        e2 += x.height() == t2;
    }
    const auto slices = detail::i64(heights.size());
    cert.check("pigeonhole-t1t2", "the chosen slice pair carries at least the average: m #S^2 >= triples",
               {{"m", m}, {"S", slices}, {"triples", triples}}, Monomial::count("m").times("S", 2), Relation::ge,
               Monomial::count("triples"));

    // multiplicity of a point pair among the lines shaded at both slices
    std::map<std::pair<GridPoint, GridPoint>, std::int64_t> mult;
    for (std::size_t i = 0; i < F.size(); ++i) {
        if (!std::binary_search(H[i].begin(), H[i].end(), t1) || !std::binary_search(H[i].begin(), H[i].end(), t2))
            continue;
        const auto& T = F.lines[i];
        for (auto a : Y.chosen[i])
            if (T.members[a].height() == t1)
                for (auto b : Y.chosen[i])
                    if (T.members[b].height() == t2) ++mult[{T.members[a], T.members[b]}];
    }
    std::int64_t M = 0, bound = 0;
    for (const auto& [pr, c] : mult)
        if (c > M) {
            M = c;
            bound = pair_line_bound(F, pr.first, pr.second);
        }
    cert.check("euclid", "lines through a point pair at the chosen slices <= packing bound",
               {{"multiplicity", M}, {"bound", bound}}, Monomial::count("multiplicity"), Relation::le,
               Monomial::count("bound"));
    cert.check("two-slices", "m <= multiplicity #E(t1) #E(t2)", {{"m", m}, {"multiplicity", M}, {"E1", e1}, {"E2", e2}},
               Monomial::count("m"), Relation::le, Monomial::count("multiplicity").times("E1").times("E2"));
    const auto E = detail::i64(mu.size());
    cert.check("union-square", "multiplicity #E^2 >= m", {{"E", E}, {"multiplicity", M}, {"m", m}},
               Monomial::count("multiplicity").times("E", 2), Relation::ge, Monomial::count("m"));
    const auto count = detail::i64(F.size());
    cert.check("final", "#E >= lambda N #F^{1/2} / slack with lambda = mass / sum #T",
               {{"E", E}, {"cells", st.cells}, {"mass", st.mass}, {"N", N}, {"F", count}, {"slack", params.slack}},
               Monomial::count("E").times("cells").times("slack"), Relation::ge,
               Monomial::count("mass").times("N").times("F", Rational(1, 2)));

    const double lambda = st.mean_density;
    const double c = static_cast<double>(E) / (lambda * static_cast<double>(N) * std::sqrt(static_cast<double>(count)));
    const bool small = lambda <= std::pow(static_cast<double>(N), -0.125);
    cert.set_result("t1", std::to_string(t1) + "/" + std::to_string(N));
    cert.set_result("t2", std::to_string(t2) + "/" + std::to_string(N));
    cert.set_result("E", std::to_string(E));
    cert.set_result("lambda", std::to_string(lambda));
    cert.set_result("realized_c", std::to_string(c));
    cert.set_result("small_lambda", small ? "true" : "false");
    if (small) cert.note("lambda <= N^{-1/8}: this bound alone gives the restricted weak-type estimate");
    return cert;
}

struct MaximalReport {
    std::int64_t union_size = 0;
    std::int64_t count = 0;
    std::int64_t N = 0;
    int n = 2;
    double lambda = 0;
    double rhs_rwt = 0;    // lambda^{(4n+3)/7} N #F^{4/7}
    double rhs_final = 0;  // N lambda^{(2n+14)/7} #F^{4/7}
    double ratio_rwt = 0;
    double ratio_final = 0;
};

inline MaximalReport maximal_experiment(const LineFamily& F, const Shading& Y) {
    const auto st = shading_stats(F, Y);
    MaximalReport r;
    r.union_size = st.union_size;
    r.count = detail::i64(F.size());
    r.N = F.params.N;
    r.n = F.params.n;
    r.lambda = st.mean_density;
    const double n = r.n, N = static_cast<double>(r.N), f = static_cast<double>(r.count);
    r.rhs_rwt = std::pow(r.lambda, (4 * n + 3) / 7) * N * std::pow(f, 4.0 / 7);
    r.rhs_final = N * std::pow(r.lambda, (2 * n + 14) / 7) * std::pow(f, 4.0 / 7);
    const double e = static_cast<double>(r.union_size);
    r.ratio_rwt = r.rhs_rwt > 0 ? e / r.rhs_rwt : std::numeric_limits<double>::infinity();
    r.ratio_final = r.rhs_final > 0 ? e / r.rhs_final : std::numeric_limits<double>::infinity();
    return r;
}

}  // namespace kakeya::grid
