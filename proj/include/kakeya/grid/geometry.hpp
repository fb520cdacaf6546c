#pragma once

// Discretized geometry on the lattice N^{-1} Z^n inside a ball: points, unit
// line segments near vertical, and separated line families.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "kakeya/errors.hpp"
#include "kakeya/exact.hpp"

namespace kakeya::grid {

using kakeya::to_string;

struct GridParams {
    int n = 2;
    std::int64_t N = 32;
    std::int64_t c_ball = 2;
    std::int64_t c_line = 2;
    /// largest angle between a line direction and e_n
    double angle_cap = std::numbers::pi / 8;

    void validate() const {
        if (n < 2) throw InvalidInput("ambient dimension must be at least 2");
        if (N < 2) throw InvalidInput("scale N must be at least 2");
        if (c_ball < 1 || c_line < 1) throw InvalidInput("ball and line constants must be positive");
        if (!(angle_cap > 0 && angle_cap < std::numbers::pi / 2)) throw InvalidInput("angle cap must lie in (0, pi/2)");
        // the ball holds about (2 c_ball N)^n lattice points
        if (std::pow(2.0 * static_cast<double>(c_ball * N) + 1, n) > 1e8)
            throw InvalidInput("grid too large: (2 c_ball N + 1)^n exceeds 1e8 points");
    }
    /// N^{n-1}
    std::int64_t capacity() const {
        std::int64_t c = 1;
        for (int i = 1; i < n; ++i) c *= N;
        return c;
    }
};

/// A lattice point; coordinates are integers in units of 1/N, the last one is the height.
struct GridPoint {
    std::vector<std::int64_t> x;

    std::int64_t height() const { return x.back(); }
    std::size_t dim() const noexcept { return x.size(); }
    auto operator<=>(const GridPoint&) const = default;
};

inline std::string to_string(const GridPoint& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.x.size(); ++i) s += (i ? "," : "") + std::to_string(p.x[i]);
    return s + ")";
}

inline std::int64_t norm2(const GridPoint& p) {
    std::int64_t s = 0;
    for (auto c : p.x) s += c * c;
    return s;
}

inline std::int64_t dist2(const GridPoint& a, const GridPoint& b) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.x.size(); ++i) s += (a.x[i] - b.x[i]) * (a.x[i] - b.x[i]);
    return s;
}

inline bool in_ball(const GridParams& g, const GridPoint& p) {
    return norm2(p) <= g.c_ball * g.c_ball * g.N * g.N;
}

inline std::int64_t floor_q(const Rational& q) {
    const auto n = q.numerator(), d = q.denominator();
    return n >= 0 ? n / d : -((-n + d - 1) / d);
}

inline std::int64_t ceil_q(const Rational& q) { return -floor_q(-q); }

using RVec = std::vector<Rational>;

/// The segment {base + tau (w, 1) : 0 <= tau <= 1} thickened to every lattice
/// point whose horizontal offset from it, at its own height, is at most c_line/N.
struct DLine {
    RVec base;       // actual coordinates
    RVec direction;  // as given
    RVec slope;      // horizontal part of the direction divided by its vertical part
    std::vector<GridPoint> members;  // sorted

    /// Scaled horizontal position of the ideal segment at scaled height h.
    RVec center(std::int64_t N, std::int64_t h) const {
        RVec c(slope.size());
        const Rational rise = Rational(h, N) - base.back();
        for (std::size_t i = 0; i < slope.size(); ++i) c[i] = (base[i] + rise * slope[i]) * N;
        return c;
    }
    /// Squared scaled horizontal offset of p from the ideal segment.
    Rational offset2(std::int64_t N, const GridPoint& p) const {
        const auto c = center(N, p.height());
        Rational s = 0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const Rational d = Rational(p.x[i]) - c[i];
            s += d * d;
        }
        return s;
    }
    std::int64_t lowest(std::int64_t N) const { return ceil_q(base.back() * N); }
    std::int64_t highest(std::int64_t N) const { return floor_q((base.back() + 1) * N); }
    bool contains(const GridPoint& p) const { return std::binary_search(members.begin(), members.end(), p); }
    std::size_t size() const noexcept { return members.size(); }
};

/// Bounds c1 N <= #T <= c2 N on line cardinality.
inline std::int64_t line_card_min(const GridParams& g) { return g.N; }
inline std::int64_t line_card_max(const GridParams& g) {
    std::int64_t w = 1;
    for (int i = 1; i < g.n; ++i) w *= 2 * g.c_line + 1;
    return 2 * w * g.N;
}

inline double slope_angle(const RVec& slope) {
    double s = 0;
    for (const auto& w : slope) s += to_double(w) * to_double(w);
    return std::atan(std::sqrt(s));
}

namespace detail {

inline void enumerate_box(const RVec& c, std::int64_t radius, std::size_t i, std::vector<std::int64_t>& cur,
                          std::vector<std::vector<std::int64_t>>& out) {
    if (i == c.size()) {
        out.push_back(cur);
        return;
    }
    for (std::int64_t v = ceil_q(c[i] - radius); v <= floor_q(c[i] + radius); ++v) {
        cur.push_back(v);
        enumerate_box(c, radius, i + 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace detail

inline DLine make_line(const GridParams& g, RVec base, RVec direction) {
    g.validate();
    const auto n = static_cast<std::size_t>(g.n);
    if (base.size() != n || direction.size() != n) throw InvalidInput("base and direction must have n coordinates");
    Rational vertical = direction.back();
    if (vertical.numerator() == 0) throw InvalidInput("direction is horizontal");
    DLine line;
    line.base = std::move(base);
    line.direction = std::move(direction);
    for (std::size_t i = 0; i + 1 < n; ++i) line.slope.push_back(line.direction[i] / vertical);
    if (slope_angle(line.slope) > g.angle_cap)
        throw InvalidInput("direction makes angle " + std::to_string(slope_angle(line.slope)) +
                           " with the vertical, above the cap " + std::to_string(g.angle_cap));

    const Rational tol2 = Rational(g.c_line * g.c_line);
    for (std::int64_t h = line.lowest(g.N); h <= line.highest(g.N); ++h) {
        std::vector<std::vector<std::int64_t>> cand;
        std::vector<std::int64_t> cur;
        detail::enumerate_box(line.center(g.N, h), g.c_line, 0, cur, cand);
        for (auto& c : cand) {
            c.push_back(h);
            GridPoint p{std::move(c)};
            if (in_ball(g, p) && !(tol2 < line.offset2(g.N, p))) line.members.push_back(std::move(p));
        }
    }
    std::sort(line.members.begin(), line.members.end());
    const auto card = static_cast<std::int64_t>(line.members.size());
    if (card < line_card_min(g) || card > line_card_max(g))
        throw InvalidInput("line has " + std::to_string(card) + " points, outside [" +
                           std::to_string(line_card_min(g)) + ", " + std::to_string(line_card_max(g)) + "]");
    return line;
}

/// Integer convenience: base and direction in units of 1/N.
inline DLine make_line_scaled(const GridParams& g, const std::vector<std::int64_t>& base,
                              const std::vector<std::int64_t>& direction) {
    RVec b, d;
    for (auto v : base) b.emplace_back(v, g.N);
    for (auto v : direction) d.emplace_back(v, g.N);
    return make_line(g, std::move(b), std::move(d));
}

struct LineFamily {
    GridParams params;
    std::vector<DLine> lines;
    bool separated = false;

    std::size_t size() const noexcept { return lines.size(); }
};

/// Squared distance between horizontal slopes, scaled by N^2.
inline Rational slope_dist2_scaled(std::int64_t N, const DLine& a, const DLine& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.slope.size(); ++i) {
        const Rational d = (a.slope[i] - b.slope[i]) * N;
        s += d * d;
    }
    return s;
}

inline bool directions_separated(const LineFamily& F) {
    for (std::size_t i = 0; i < F.lines.size(); ++i)
        for (std::size_t j = i + 1; j < F.lines.size(); ++j)
            if (slope_dist2_scaled(F.params.N, F.lines[i], F.lines[j]) < Rational(1)) return false;
    return true;
}

inline LineFamily make_family(const GridParams& g, std::vector<DLine> lines) {
    LineFamily F{g, std::move(lines), false};
    F.separated = directions_separated(F);
    return F;
}

enum class FamilyKind { random, bush, hairbrush, maximal_separated };

inline std::string to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::random: return "random";
        case FamilyKind::bush: return "bush";
        case FamilyKind::hairbrush: return "hairbrush";
        case FamilyKind::maximal_separated: return "maximal_separated";
    }
    return "?";
}

inline FamilyKind family_kind_from_string(const std::string& s) {
    if (s == "random") return FamilyKind::random;
    if (s == "bush") return FamilyKind::bush;
    if (s == "hairbrush") return FamilyKind::hairbrush;
    if (s == "maximal_separated") return FamilyKind::maximal_separated;
    throw InvalidInput("unknown family kind '" + s + "'");
}

/// Lattice slopes j/N (j in Z^{n-1}) inside the angle cap, in lexicographic order.
inline std::vector<std::vector<std::int64_t>> cap_directions(const GridParams& g) {
    const double t = std::tan(g.angle_cap) * static_cast<double>(g.N);
    const auto m = static_cast<std::int64_t>(std::floor(t));
    std::vector<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> cur(static_cast<std::size_t>(g.n - 1), -m);
    while (true) {
        double s = 0;
        for (auto v : cur) s += static_cast<double>(v * v);
        // exact boundary: compare the angle itself
        if (std::atan(std::sqrt(s) / static_cast<double>(g.N)) <= g.angle_cap) out.push_back(cur);
        std::size_t i = cur.size();
        while (i > 0 && cur[i - 1] == m) cur[--i] = -m;
        if (i == 0) break;
        ++cur[i - 1];
    }
    return out;
}

namespace detail {

/// Uniform draw in [0, m) from the raw mt19937_64 stream; kept explicit so
/// families do not depend on the standard library's distribution code.
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t m) { return rng() % m; }

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw(rng, i)]);
}

}  // namespace detail

/// Deterministic test families. All lines start at height 0 and rise one unit.
/// random: distinct cap directions, random bases in [-1/2, 1/2]^{n-1}.
/// bush: every line through the origin.
/// hairbrush: every line crosses the stem {x_1 axis} x {1/2}.
/// maximal_separated: every cap direction once (count is not used).
inline LineFamily generate_family(FamilyKind kind, const GridParams& g, std::size_t count, std::uint64_t seed) {
    g.validate();
    const auto cap = static_cast<std::size_t>(g.capacity());
    if (count > cap)
        throw InvalidInput("count " + std::to_string(count) + " exceeds the N^{n-1} capacity " + std::to_string(cap));
    auto dirs = cap_directions(g);
    std::mt19937_64 rng(seed);
    if (kind != FamilyKind::maximal_separated) {
        if (count > dirs.size())
            throw InvalidInput("count " + std::to_string(count) + " exceeds the " + std::to_string(dirs.size()) +
                               " separated directions inside the angle cap");
        detail::shuffle(dirs, rng);
        dirs.resize(count);
        std::sort(dirs.begin(), dirs.end());
    }
    const auto h = static_cast<std::size_t>(g.n - 1);
    auto random_coord = [&] {
        return Rational(static_cast<std::int64_t>(detail::draw(rng, static_cast<std::uint64_t>(g.N + 1))) - g.N / 2,
                        g.N);
    };
    std::vector<DLine> lines;
    for (const auto& j : dirs) {
        RVec dir, base(h + 1, Rational(0));
        for (auto v : j) dir.emplace_back(v, g.N);
        dir.emplace_back(1);
        switch (kind) {
            case FamilyKind::bush: break;
            case FamilyKind::random:
            case FamilyKind::maximal_separated:
                for (std::size_t i = 0; i < h; ++i) base[i] = random_coord();
                break;
            case FamilyKind::hairbrush: {
                const Rational c = random_coord();
                for (std::size_t i = 0; i < h; ++i) base[i] = (i == 0 ? c : Rational(0)) - dir[i] / 2;
                break;
            }
        }
        lines.push_back(make_line(g, std::move(base), std::move(dir)));
    }
    return make_family(g, std::move(lines));
}

struct AngleRow {
    Rational theta;  // cap radius in slope space
    std::int64_t max_count = 0;
    double constant = 0;  // max_count / (N theta)^{n-1}
};

struct FamilyReport {
    std::int64_t count = 0;
    double capacity_constant = 0;  // #F / N^{n-1}
    bool capacity_ok = true;
    double min_separation = 0;  // N times the least slope distance; infinity for fewer than two lines
    bool separation_ok = true;
    std::vector<AngleRow> angle_rows;
    double angle_constant = 0;
    bool angle_ok = true;
    bool ok = true;
};

/// Separation, the θ-cap counts #{T : direction within θ of a given one} <= C (Nθ)^{n-1}
/// over dyadic θ, and #F <= C N^{n-1}.
inline FamilyReport validate_family(const LineFamily& F, double capacity_C = 1.0, double angle_C = 16.0) {
    const auto& g = F.params;
    FamilyReport rep;
    rep.count = static_cast<std::int64_t>(F.size());
    rep.capacity_constant = static_cast<double>(rep.count) / static_cast<double>(g.capacity());
    rep.capacity_ok = rep.capacity_constant <= capacity_C;

    Rational least = -1;
    const auto m = F.lines.size();
    std::vector<std::vector<Rational>> d2(m, std::vector<Rational>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            d2[i][j] = d2[j][i] = slope_dist2_scaled(g.N, F.lines[i], F.lines[j]);
            if (least < Rational(0) || d2[i][j] < least) least = d2[i][j];
        }
    rep.min_separation = least < Rational(0) ? std::numeric_limits<double>::infinity() : std::sqrt(to_double(least));
    rep.separation_ok = !(Rational(0) <= least && least < Rational(1));

    const double top = 2 * std::tan(g.angle_cap);
    for (Rational theta(1, g.N); to_double(theta) <= top; theta *= 2) {
        AngleRow row{theta, 0, 0};
        const Rational t2 = theta * theta * g.N * g.N;
        for (std::size_t i = 0; i < m; ++i) {
            std::int64_t c = 1;
            for (std::size_t j = 0; j < m; ++j)
                if (j != i && !(t2 < d2[i][j])) ++c;
            row.max_count = std::max(row.max_count, c);
        }
        const double scale = std::pow(to_double(theta) * static_cast<double>(g.N), g.n - 1);
        row.constant = m == 0 ? 0.0 : static_cast<double>(row.max_count) / scale;
        rep.angle_constant = std::max(rep.angle_constant, row.constant);
        rep.angle_rows.push_back(row);
    }
    rep.angle_ok = rep.angle_constant <= angle_C;
    rep.ok = rep.capacity_ok && rep.separation_ok && rep.angle_ok;
    return rep;
}

inline std::int64_t lines_through_pair(const LineFamily& F, const GridPoint& x1, const GridPoint& x2) {
    if (x1 == x2) throw InvalidInput("coincident points " + to_string(x1));
    std::int64_t c = 0;
    for (const auto& T : F.lines)
        if (T.contains(x1) && T.contains(x2)) ++c;
    return c;
}

/// Packing bound for a separated family: a line through both points has slope
/// within 2 c_line / (N |dh|) of (x2' - x1') / dh, and 1/N-separated slopes in a
/// ball of radius rho number at most (2 rho N + 1)^{n-1}.
inline std::int64_t pair_line_bound(const LineFamily& F, const GridPoint& x1, const GridPoint& x2) {
    const auto& g = F.params;
    const auto total = static_cast<std::int64_t>(F.size());
    const std::int64_t dh = std::abs(x1.height() - x2.height());
    if (dh == 0) return total;
    const Rational side = Rational(4 * g.c_line * g.N, dh) + 1;
    // exact on an interval; a volume comparison in higher dimensions
    const double b = g.n == 2 ? static_cast<double>(floor_q(side)) : std::floor(std::pow(to_double(side), g.n - 1));
    if (b >= static_cast<double>(total)) return total;
    return static_cast<std::int64_t>(b);
}

}  // namespace kakeya::grid
