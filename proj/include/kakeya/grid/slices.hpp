#pragma once

// Horizontal slices of the union: dyadic slice extraction, slice slopes, and
// the six-slices reduction from a shaded family to a configuration on two
// slices with six slopes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kakeya/certificate.hpp"
#include "kakeya/grid/shading.hpp"

namespace kakeya::grid {

using Counts = std::map<std::string, std::int64_t>;

struct SliceStructure {
    std::vector<GridPoint> e_prime;  // sorted
    int mu_level = 0;                // E' = {x : 2^mu_level <= mu(x) < 2^{mu_level + 1}}
    int k = 0;
    std::vector<std::int64_t> S;                       // scaled heights
    std::map<std::int64_t, std::int64_t> slice_count;  // #(E' ∩ slice) for t in S
    std::int64_t mass = 0;
    std::int64_t mass_prime = 0;  // mass carried by E'
    /// N + 1, the number of slices a unit line meets
    std::int64_t scale = 0;
    std::int64_t slack = 4;
    double s_size_ratio = 0;  // |S| 2^k / scale
    double slice_ratio_min = 0;
    double slice_ratio_max = 0;  // c_t scale / (2^k #E')
    bool s_size_ok = false;
    bool slice_ok = false;

    bool windows_ok() const noexcept { return s_size_ok && slice_ok; }
    bool contains(std::int64_t h) const { return std::binary_search(S.begin(), S.end(), h); }
};

namespace detail {

inline int dyadic_level(std::int64_t v) {
    int j = 0;
    while ((v >> 1) >= (std::int64_t{1} << j)) ++j;
    return j;
}

}  // namespace detail

/// E' is the dyadic level set of mu carrying the most mass; S is the dyadic
/// class of slice sizes of E' carrying the most points. Ties go to the lower level.
inline SliceStructure slice_extract(const CountingFunction& mu, std::int64_t N, std::int64_t slack = 4) {
    if (mu.empty()) throw InvalidInput("slice extraction needs a nonempty set");
    if (N < 1) throw InvalidInput("scale N must be positive");
    SliceStructure ss;
    ss.scale = N + 1;
    ss.slack = slack;
    std::map<int, std::int64_t> level_mass;
    for (const auto& [x, m] : mu) {
        if (m < 1) throw InvalidInput("counting function must be positive on its support");
        ss.mass += m;
        level_mass[detail::dyadic_level(m)] += m;
    }
    std::int64_t best = -1;
    for (const auto& [lvl, m] : level_mass)
        if (m > best) {
            best = m;
            ss.mu_level = lvl;
        }
    ss.mass_prime = best;
    std::map<std::int64_t, std::int64_t> per_slice;
    for (const auto& [x, m] : mu)
        if (detail::dyadic_level(m) == ss.mu_level) {
            ss.e_prime.push_back(x);
            ++per_slice[x.height()];
        }
    std::map<int, std::int64_t> size_mass;
    for (const auto& [h, c] : per_slice) size_mass[detail::dyadic_level(c)] += c;
    int chosen = 0;
    best = -1;
    for (const auto& [lvl, m] : size_mass)
        if (m > best) {
            best = m;
            chosen = lvl;
        }
    std::int64_t in_s = 0;
    for (const auto& [h, c] : per_slice)
        if (detail::dyadic_level(c) == chosen) {
            ss.S.push_back(h);
            ss.slice_count[h] = c;
            in_s += c;
        }
    const auto e = static_cast<double>(ss.e_prime.size());
    const double mean = static_cast<double>(in_s) / static_cast<double>(ss.S.size());
    ss.k = std::max(0, static_cast<int>(std::lround(std::log2(mean * static_cast<double>(ss.scale) / e))));

    const std::int64_t two_k = std::int64_t{1} << ss.k;
    const auto s_card = static_cast<std::int64_t>(ss.S.size());
    const auto e_card = static_cast<std::int64_t>(ss.e_prime.size());
    ss.s_size_ratio = static_cast<double>(s_card * two_k) / static_cast<double>(ss.scale);
    ss.s_size_ok = slack * s_card * two_k >= ss.scale && s_card * two_k <= slack * ss.scale;
    ss.slice_ok = true;
    ss.slice_ratio_min = std::numeric_limits<double>::infinity();
    for (const auto& [h, c] : ss.slice_count) {
        const double r = static_cast<double>(c * ss.scale) / static_cast<double>(two_k * e_card);
        ss.slice_ratio_min = std::min(ss.slice_ratio_min, r);
        ss.slice_ratio_max = std::max(ss.slice_ratio_max, r);
        ss.slice_ok = ss.slice_ok && slack * c * ss.scale >= two_k * e_card && c * ss.scale <= slack * two_k * e_card;
    }
    return ss;
}

/// r(t) = (t - t1) / (t2 - t). Throws when t is within min_gap of t1 or t2, or t = t2.
inline Rational slice_slope(const Rational& t, const Rational& t1, const Rational& t2, const Rational& min_gap = 0) {
    auto dist = [](const Rational& a, const Rational& b) { return a < b ? b - a : a - b; };
    if (t == t2) throw InvalidInput("slice slope is undefined at t = t2");
    if (min_gap > Rational(0) && (dist(t, t1) < min_gap || dist(t, t2) < min_gap))
        throw InvalidInput("t = " + to_string(t) + " lies outside the separation window around t1, t2");
    return (t - t1) / (t2 - t);
}

/// r(t) + r(t) / r(t') before rounding.
inline Rational s_exact(const Rational& t, const Rational& tp, const Rational& t1, const Rational& t2,
                        const Rational& min_gap = 0) {
    const Rational r = slice_slope(t, t1, t2, min_gap);
    const Rational rp = slice_slope(tp, t1, t2, min_gap);
    if (rp.numerator() == 0) throw InvalidInput("s is undefined when r(t') = 0");
    return r + r / rp;
}

/// x rounded to the nearest point of N^{-1} Z, ties toward the lower point.
inline Rational round_to_grid(const Rational& x, std::int64_t N) {
    return Rational(ceil_q(x * N - Rational(1, 2)), N);
}

inline Rational s_value(const Rational& t, const Rational& tp, const Rational& t1, const Rational& t2, std::int64_t N,
                        const Rational& min_gap = 0) {
    return round_to_grid(s_exact(t, tp, t1, t2, min_gap), N);
}

/// A configuration of pairs (a, b) of horizontal positions on two slices,
/// with the six slopes (0, r1, r2, r1', r2', inf); nullopt is the infinite slope.
struct GridSdInstance {
    int n = 2;
    std::int64_t N = 0;
    std::vector<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>> points;
    std::vector<std::optional<Rational>> slopes;
    std::vector<std::string> slope_names;
    Rational s = 0;
};

using RationalPoint = std::vector<Rational>;

inline RationalPoint grid_project(const std::optional<Rational>& r, const std::vector<std::int64_t>& a,
                                  const std::vector<std::int64_t>& b) {
    RationalPoint out;
    for (std::size_t i = 0; i < a.size(); ++i)
        out.push_back(r ? Rational(a[i]) + *r * Rational(b[i]) : Rational(b[i]));
    return out;
}

struct GridSdReport {
    std::int64_t max_fiber = 0;  // largest pi_{-1} fiber
    bool injective_within_tolerance = true;
    std::vector<std::int64_t> projection_counts;  // per slope
    std::int64_t max_projection = 0;
};

/// The verifier in tolerance mode: pi_{-1} fibers of size <= multiplicity
/// count as single-valued.
inline GridSdReport verify_grid_sd(const GridSdInstance& inst, std::int64_t multiplicity = 4) {
    GridSdReport rep;
    std::map<RationalPoint, std::int64_t> fib;
    for (const auto& [a, b] : inst.points) ++fib[grid_project(Rational(-1), a, b)];
    for (const auto& [v, c] : fib) rep.max_fiber = std::max(rep.max_fiber, c);
    rep.injective_within_tolerance = rep.max_fiber <= multiplicity;
    for (const auto& r : inst.slopes) {
        std::set<RationalPoint> img;
        for (const auto& [a, b] : inst.points) img.insert(grid_project(r, a, b));
        rep.projection_counts.push_back(static_cast<std::int64_t>(img.size()));
        rep.max_projection = std::max(rep.max_projection, rep.projection_counts.back());
    }
    return rep;
}

struct SixSlicesParams {
    TwoEndsParams two_ends;
    /// "|t_i - t_j| ≈ 1" is read as |t_i - t_j| >= gap, and as >= endpoint_gap for t1, t2
    Rational gap{1, 8};
    Rational endpoint_gap{1, 2};
    std::int64_t slice_slack = 4;
    /// window between each pigeonholed count and its predicted order
    std::int64_t order_slack = 16;
    /// allowed pi_{-1} fiber size
    std::int64_t multiplicity = 4;
    /// near-dual tolerance is dual_slack / N
    std::int64_t dual_slack = 4;
};

struct SixSlicesResult {
    std::array<std::int64_t, 6> heights{};  // t1..t6 scaled by N
    int k = 0;
    Rational d = 0;
    SliceStructure slices;
    GridSdInstance instance;
    Certificate cert;
};

namespace detail {

using Quad = std::array<std::int64_t, 4>;

inline Monomial mul(Monomial a, const Monomial& b) {
    for (const auto& f : b.factors()) {
        if (f.count.empty())
            a.times_const(f.constant, f.exponent);
        else
            a.times(f.count, f.exponent);
    }
    return a;
}

/// actual within a factor `slack` of pred_num / pred_den, as two exact steps.
inline void order_window(Certificate& cert, const std::string& id, const std::string& desc, Counts counts,
                         const Monomial& actual, const Monomial& pred_num, const Monomial& pred_den,
                         std::int64_t slack) {
    counts["slack"] = slack;
    cert.check(id + "-lower", desc + " (lower side)", counts, mul(mul(Monomial::count("slack"), actual), pred_den),
               Relation::ge, pred_num);
    cert.check(id + "-upper", desc + " (upper side)", counts, mul(actual, pred_den), Relation::le,
               mul(Monomial::count("slack"), pred_num));
}

/// The member of T at height h nearest the ideal segment; ties go to the least point.
inline const GridPoint& nearest_member(const DLine& T, std::int64_t N, std::int64_t h) {
    const GridPoint* best = nullptr;
    Rational best_d = 0;
    for (const auto& p : T.members) {
        if (p.height() != h) continue;
        const Rational d = T.offset2(N, p);
        if (!best || d < best_d) {
            best = &p;
            best_d = d;
        }
    }
    if (!best) throw InvalidInput("line has no member at height " + std::to_string(h));
    return *best;
}

inline std::vector<std::int64_t> horizontal(const GridPoint& p) { return {p.x.begin(), p.x.end() - 1}; }

inline Rational abs_q(const Rational& q) { return q < Rational(0) ? -q : q; }

}  // namespace detail

inline SixSlicesResult six_slices_to_sd(const LineFamily& F, const Shading& Y, std::uint64_t seed = 0,
                                        const SixSlicesParams& params = {}) {
    const auto st = shading_stats(F, Y);
    const auto& g = F.params;
    const auto N = g.N;
    const double threshold = std::pow(static_cast<double>(N), -0.125);
    if (st.mean_density < threshold)
        throw BushBranchApplies("density " + std::to_string(st.mean_density) + " is below N^{-1/8} = " +
                                std::to_string(threshold) + "; use the two-slice bound");
    const auto te = two_ends_check(F, Y, params.two_ends);
    if (!te.pass)
        throw TwoEndsFailed("two-ends ratio " + std::to_string(te.max_ratio) + " on line " +
                            std::to_string(te.worst_line));

    SixSlicesResult res;
    Certificate& cert = res.cert;
    cert = Certificate("six-slices");
    cert.set_result("seed", std::to_string(seed));
    const auto count = detail::i64(F.size());
    const auto far = [&](std::int64_t a, std::int64_t b) { return detail::far(a, b, N, params.gap); };
    const auto far_ends = [&](std::int64_t a, std::int64_t b) { return detail::far(a, b, N, params.endpoint_gap); };

    // E', S and the refined shading Y'
    const auto mu = counting_function(F, Y);
    res.slices = slice_extract(mu, N, params.slice_slack);
    const auto& ss = res.slices;
    res.k = ss.k;
    const std::int64_t four_k = std::int64_t{1} << (2 * ss.k);
    const std::set<GridPoint> eprime(ss.e_prime.begin(), ss.e_prime.end());
    cert.check("E'-mass", "the chosen level set carries at least an average share: mass(E') #levels >= mass",
               {{"mass_prime", ss.mass_prime},
                {"levels", detail::dyadic_level(std::max_element(mu.begin(), mu.end(), [](auto& a, auto& b) {
                                                    return a.second < b.second;
                                                })->second) + 1},
                {"mass", ss.mass}},
               Monomial::count("mass_prime").times("levels"), Relation::ge, Monomial::count("mass"));
    cert.check("s-size", "|S| 2^k within the slice window of N + 1",
               {{"S", detail::i64(ss.S.size())}, {"ok", ss.s_size_ok ? 1 : 0}}, Monomial::count("ok"), Relation::eq,
               Monomial::constant(1), "ratio " + std::to_string(ss.s_size_ratio));
    cert.check("slice", "every slice in S holds 2^k #E' / (N + 1) points up to the window",
               {{"ok", ss.slice_ok ? 1 : 0}}, Monomial::count("ok"), Relation::eq, Monomial::constant(1),
               "ratios in [" + std::to_string(ss.slice_ratio_min) + ", " + std::to_string(ss.slice_ratio_max) + "]");

    std::vector<std::vector<std::int64_t>> H(F.size());
    std::int64_t hsum_all = 0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        std::set<std::int64_t> hs;
        for (auto j : Y.chosen[i]) {
            const auto& p = F.lines[i].members[j];
            if (ss.contains(p.height()) && eprime.count(p)) hs.insert(p.height());
        }
        H[i] = {hs.begin(), hs.end()};
        hsum_all += detail::i64(H[i].size());
    }
    // T': lines whose refined height count is at least half the average
    std::vector<std::size_t> t1_lines;
    for (std::size_t i = 0; i < F.size(); ++i)
        if (!H[i].empty() && 2 * detail::i64(H[i].size()) * count >= hsum_all) t1_lines.push_back(i);
    if (t1_lines.empty()) throw PigeonholeEmpty("T'", "no line keeps a shaded height in E' over S");
    std::int64_t hsum = 0;
    for (auto i : t1_lines) hsum += detail::i64(H[i].size());
    const auto lines = detail::i64(t1_lines.size());
    const std::int64_t scale = N + 1;
    // lambda = hsum / (lines scale); lambda N is read as the mean refined height count
    const double lambda = static_cast<double>(hsum) / static_cast<double>(lines * scale);
    detail::order_window(cert, "T'", "#T' against #T", {{"T1", lines}, {"F", count}}, Monomial::count("T1"),
                         Monomial::count("F"), Monomial::one(), params.order_slack);

    // P(T) and the pigeonhole over (t1, t2)
    const double q_threshold = std::pow(static_cast<double>(hsum) / static_cast<double>(lines), 2) / 16.0;
    auto q_count = [&](const std::vector<std::int64_t>& hs, std::int64_t a, std::int64_t b) {
        std::vector<std::int64_t> c;
        for (auto t : hs)
            if (far(t, a) && far(t, b)) c.push_back(t);
        std::int64_t q = 0;
        for (auto x : c)
            for (auto y : c)
                if (far(x, y)) ++q;
        return q;
    };
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> p_lines;
    std::int64_t p_total = 0, four_ends = 0, h4 = 0;
    for (auto i : t1_lines) {
        const auto hn = detail::i64(H[i].size());
        h4 += hn * hn * hn * hn;
        for (auto a : H[i])
            for (auto b : H[i]) {
                if (!far_ends(a, b)) continue;
                const auto q = q_count(H[i], a, b);
                four_ends += q;
                if (static_cast<double>(q) >= q_threshold) {
                    ++p_lines[{a, b}];
                    ++p_total;
                }
            }
    }
    cert.record("four-ends", "separated 4-tuples of refined heights, against sum_T #heights^4",
                {{"tuples", four_ends}, {"h4", h4}}, Monomial::count("tuples"), Monomial::count("h4"));
    if (p_lines.empty()) throw PigeonholeEmpty("tpppp-card", "every P(T) is empty");
    std::pair<std::int64_t, std::int64_t> pick{};
    std::int64_t m = -1;
    for (const auto& [pr, c] : p_lines) {
        const auto gap = std::abs(pr.first - pr.second);
        const auto best_gap = std::abs(pick.first - pick.second);
        if (c > m || (c == m && gap > best_gap)) {
            m = c;
            pick = pr;
        }
    }
    const auto [t1, t2] = pick;
    std::vector<std::size_t> t2_lines;
    for (auto i : t1_lines) {
        const auto& hs = H[i];
        if (std::binary_search(hs.begin(), hs.end(), t1) && std::binary_search(hs.begin(), hs.end(), t2) &&
            static_cast<double>(q_count(hs, t1, t2)) >= q_threshold)
            t2_lines.push_back(i);
    }
    const auto s_card = detail::i64(ss.S.size());
    cert.check("tpppp-pigeonhole", "#T'' #S^2 >= sum_T #P(T)", {{"T2", m}, {"S", s_card}, {"P", p_total}},
               Monomial::count("T2").times("S", 2), Relation::ge, Monomial::count("P"));
    detail::order_window(cert, "tpppp-card", "#T'' against 2^{2k} lambda^2 #T",
                         {{"T2", m}, {"four_k", four_k}, {"hsum", hsum}, {"F", count}, {"lines", lines}, {"H", scale}},
                         Monomial::count("T2"), Monomial::count("four_k").times("hsum", 2).times("F"),
                         Monomial::count("lines", 2).times("H", 2), params.order_slack);

    // s on S' x S' and the congruence classes of Q(T)
    std::vector<std::int64_t> s_prime;
    for (auto t : ss.S)
        if (far(t, t1) && far(t, t2)) s_prime.push_back(t);
    const Rational rt1(t1, N), rt2(t2, N);
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> s_index;  // (t3, t4) -> N s
    auto s_of = [&](std::int64_t a, std::int64_t b) {
        auto key = std::make_pair(a, b);
        auto it = s_index.find(key);
        if (it != s_index.end()) return it->second;
        const Rational s = s_value(Rational(a, N), Rational(b, N), rt1, rt2, N);
        const auto v = (s * N).numerator();
        s_index.emplace(key, v);
        return v;
    };
    auto q_pairs = [&](const std::vector<std::int64_t>& hs) {
        std::vector<std::pair<std::int64_t, std::int64_t>> out;
        std::vector<std::int64_t> c;
        for (auto t : hs)
            if (far(t, t1) && far(t, t2)) c.push_back(t);
        for (auto x : c)
            for (auto y : c)
                if (far(x, y)) out.emplace_back(x, y);
        return out;
    };
    const double min_sep = lambda * lambda / 4.0;
    auto distinct4 = [](std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t e) {
        return a != c && a != e && b != c && b != e;
    };
    auto bucket_of = [&](std::int64_t a, std::int64_t b) -> int {
        // j with |t3 - t5| in [2^{-j}, 2^{1-j}); -1 when below the lambda^2 floor
        const auto diff = std::abs(a - b);
        if (diff == 0 || static_cast<double>(diff) < min_sep * static_cast<double>(N)) return -1;
        int j = 0;
        while (diff * (std::int64_t{1} << j) < N) ++j;
        return j;
    };
    std::int64_t cauchy_bad = 0;
    std::vector<std::map<int, std::int64_t>> per_bucket(F.size());
    std::vector<std::map<std::int64_t, std::vector<std::pair<std::int64_t, std::int64_t>>>> classes(F.size());
    for (auto i : t2_lines) {
        const auto Q = q_pairs(H[i]);
        for (const auto& pr : Q) classes[i][s_of(pr.first, pr.second)].push_back(pr);
        std::int64_t congruent = 0;
        for (const auto& [s, cls] : classes[i]) {
            congruent += detail::i64(cls.size() * cls.size());
            for (const auto& x : cls)
                for (const auto& y : cls) {
                    const int j = bucket_of(x.first, y.first);
                    if (j >= 0 && distinct4(x.first, x.second, y.first, y.second)) ++per_bucket[i][j];
                }
        }
        const auto q = detail::i64(Q.size());
        if (congruent * detail::i64(classes[i].size()) < q * q) ++cauchy_bad;
    }
    cert.check("cauchy-s", "per line: #{s-congruent pairs of Q} #s-values >= #Q^2", {{"violations", cauchy_bad}},
               Monomial::count("violations"), Relation::eq, Monomial::constant(0));

    std::map<int, std::int64_t> bucket_total;
    for (auto i : t2_lines)
        for (const auto& [j, c] : per_bucket[i]) bucket_total[j] += c;
    if (bucket_total.empty()) throw PigeonholeEmpty("d-bucket", "no s-congruent pair has |t3 - t5| above lambda^2 / 4");
    int jd = 0;
    std::int64_t best_total = -1, all_total = 0;
    for (const auto& [j, c] : bucket_total) {
        all_total += c;
        if (c > best_total) {
            best_total = c;
            jd = j;
        }
    }
    res.d = Rational(1, std::int64_t{1} << jd);
    cert.check("d-pigeonhole", "the chosen dyadic d carries at least the average: count #buckets >= total",
               {{"count", best_total}, {"buckets", detail::i64(bucket_total.size())}, {"total", all_total}},
               Monomial::count("count").times("buckets"), Relation::ge, Monomial::count("total"));

    // T''': popularity in the chosen bucket
    std::vector<std::size_t> t3_lines;
    for (auto i : t2_lines) {
        const auto c = per_bucket[i].count(jd) ? per_bucket[i].at(jd) : 0;
        if (c > 0 && 2 * c * detail::i64(t2_lines.size()) >= best_total) t3_lines.push_back(i);
    }
    detail::order_window(cert, "T'''", "#T''' against #T''", {{"T3", detail::i64(t3_lines.size())}, {"T2", m}},
                         Monomial::count("T3"), Monomial::count("T2"), Monomial::one(), params.order_slack);

    // pigeonhole over (t3, t4, t5, t6)
    std::map<detail::Quad, std::int64_t> quad_lines;
    std::int64_t quad_sum = 0;
    for (auto i : t3_lines)
        for (const auto& [s, cls] : classes[i])
            for (const auto& x : cls)
                for (const auto& y : cls)
                    if (bucket_of(x.first, y.first) == jd && distinct4(x.first, x.second, y.first, y.second)) {
                        ++quad_lines[{x.first, x.second, y.first, y.second}];
                        ++quad_sum;
                    }
    if (quad_lines.empty()) throw PigeonholeEmpty("t5-card", "T''' carries no quadruple");
    detail::Quad quad{};
    std::int64_t m4 = -1;
    for (const auto& [q, c] : quad_lines)
        if (c > m4) {
            m4 = c;
            quad = q;
        }
    // Delta over S'^4
    std::int64_t delta = 0;
    {
        std::map<std::int64_t, std::vector<std::pair<std::int64_t, std::int64_t>>> by_s;
        for (auto x : s_prime)
            for (auto y : s_prime)
                if (far(x, y)) by_s[s_of(x, y)].emplace_back(x, y);
        for (const auto& [s, xs] : by_s)
            for (const auto& a : xs)
                for (const auto& b : xs)
                    if (bucket_of(a.first, b.first) == jd && distinct4(a.first, a.second, b.first, b.second)) ++delta;
    }
    cert.check("t5-pigeonhole", "#T'''' #Delta >= sum over T''' of quadruple counts",
               {{"T4", m4}, {"Delta", delta}, {"sum", quad_sum}}, Monomial::count("T4").times("Delta"), Relation::ge,
               Monomial::count("sum"));
    const std::int64_t two_j = std::int64_t{1} << jd;
    const std::int64_t sixteen_k = four_k * four_k;
    cert.check("Delta-upper", "#Delta <= slack (2^{-k} N)^2 d N",
               {{"Delta", delta}, {"N", N}, {"four_k", four_k}, {"two_j", two_j}, {"slack", params.order_slack}},
               Monomial::count("Delta").times("four_k").times("two_j"), Relation::le,
               Monomial::count("slack").times("N", 3));
    const Counts t5_counts{{"T4", m4}, {"sixteen_k", sixteen_k}, {"two_j", two_j}, {"hsum", hsum},
                           {"F", count}, {"lines", lines}, {"H", scale}};
    detail::order_window(cert, "t5-card", "#T'''' against lambda^6 2^{4k} #T / d", t5_counts, Monomial::count("T4"),
                         Monomial::count("sixteen_k").times("two_j").times("hsum", 6).times("F"),
                         Monomial::count("lines", 6).times("H", 6), params.order_slack);

    const auto [t3, t4, t5, t6] = quad;
    res.heights = {t1, t2, t3, t4, t5, t6};

    // G: one pair per surviving line, the members nearest the ideal segment at t1 and t2
    auto& inst = res.instance;
    inst.n = g.n;
    inst.N = N;
    std::set<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>> G;
    std::int64_t t4_count = 0;
    for (auto i : t3_lines) {
        const auto Q = q_pairs(H[i]);
        const bool has34 = std::find(Q.begin(), Q.end(), std::make_pair(t3, t4)) != Q.end();
        const bool has56 = std::find(Q.begin(), Q.end(), std::make_pair(t5, t6)) != Q.end();
        if (!has34 || !has56) continue;
        ++t4_count;
        const auto& T = F.lines[i];
        G.insert({detail::horizontal(detail::nearest_member(T, N, t1)),
                  detail::horizontal(detail::nearest_member(T, N, t2))});
    }
    inst.points.assign(G.begin(), G.end());
    const Rational r1 = slice_slope(Rational(t3, N), rt1, rt2), r2 = slice_slope(Rational(t5, N), rt1, rt2);
    const Rational r1p = slice_slope(Rational(t4, N), rt1, rt2), r2p = slice_slope(Rational(t6, N), rt1, rt2);
    inst.s = Rational(s_of(t3, t4), N);
    inst.slopes = {Rational(0), r1, r2, r1p, r2p, std::nullopt};
    inst.slope_names = {"0", "r(t3)", "r(t5)", "r(t4)", "r(t6)", "inf"};

    const auto gsize = detail::i64(inst.points.size());
    cert.check("g-lines", "each line of T'''' contributes one pair: #G <= #T''''", {{"G", gsize}, {"T4", t4_count}},
               Monomial::count("G"), Relation::le, Monomial::count("T4"));
    Counts g_counts = t5_counts;
    g_counts.erase("T4");
    g_counts["G"] = gsize;
    detail::order_window(cert, "g-card", "#G against lambda^6 2^{4k} #T / d", g_counts, Monomial::count("G"),
                         Monomial::count("sixteen_k").times("two_j").times("hsum", 6).times("F"),
                         Monomial::count("lines", 6).times("H", 6), params.order_slack);

    auto dual_step = [&](const std::string& id, const Rational& r, const Rational& rp) {
        const Rational err = detail::abs_q(inst.s / r - Rational(1) / rp - 1);
        cert.check(id, "|s / r - 1 / r' - 1| <= dual_slack / N",
                   {{"num", err.numerator()}, {"den", err.denominator()}, {"N", N}, {"dual_slack", params.dual_slack}},
                   Monomial::count("num").times("N"), Relation::le, Monomial::count("dual_slack").times("den"),
                   "error " + to_string(err));
    };
    dual_step("near-dual-1", r1, r1p);
    dual_step("near-dual-2", r2, r2p);

    const auto rep = verify_grid_sd(inst, params.multiplicity);
    cert.check("pi-1-multiplicity", "every pi_{-1} fiber of G has at most `multiplicity` elements",
               {{"fiber", rep.max_fiber}, {"multiplicity", params.multiplicity}}, Monomial::count("fiber"),
               Relation::le, Monomial::count("multiplicity"));
    {
        const Rational sep = detail::abs_q(r1 - r2);
        cert.record("r-separation", "|r1 - r2| against d", {{"num", sep.numerator()}, {"den", sep.denominator()},
                                                             {"two_j", two_j}},
                    Monomial::count("num").times("two_j"), Monomial::count("den"));
    }
    for (std::size_t i = 0; i < inst.slopes.size(); ++i)
        cert.record("projection-" + inst.slope_names[i], "#pi_r(G) against 2^k #E / N",
                    {{"image", rep.projection_counts[i]}, {"two_k", std::int64_t{1} << ss.k},
                     {"E", detail::i64(mu.size())}, {"N", N}},
                    Monomial::count("image").times("N"), Monomial::count("two_k").times("E"));

    const double loss = std::pow(to_double(res.d), (1.0 - g.n) / 4.0);
    cert.note("the parameterization of V by two double projections holds up to d^{(1-n)/4} in the final bound");
    auto h = [&](std::int64_t v) { return to_string(Rational(v, N)); };
    cert.set_result("t1", h(t1));
    cert.set_result("t2", h(t2));
    cert.set_result("t3", h(t3));
    cert.set_result("t4", h(t4));
    cert.set_result("t5", h(t5));
    cert.set_result("t6", h(t6));
    cert.set_result("k", std::to_string(ss.k));
    cert.set_result("d", to_string(res.d));
    cert.set_result("s", to_string(inst.s));
    cert.set_result("lambda", std::to_string(lambda));
    cert.set_result("G", std::to_string(gsize));
    cert.set_result("max_pi_minus_one_fiber", std::to_string(rep.max_fiber));
    cert.set_result("multiplicity_loss", std::to_string(loss));
    return res;
}

}  // namespace kakeya::grid
