#pragma once

// Finite configurations G in Z x Z with pi_{-1} injective, fiber partitions,
// the popularity refinements X^{<f>} and X^{<<f>>}, segments and corners, and
// the maps nu and mu evaluated on them.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "kakeya/errors.hpp"
#include "kakeya/exact.hpp"
#include "kakeya/field.hpp"
#include "kakeya/slope.hpp"

namespace kakeya {

inline Slope minus_one(std::uint64_t p) { return slope_of(-1, p); }

inline std::string to_string(const Space& z, const Point& g) {
    auto vec = [&](ZElem x) {
        const auto ds = z.digits(x);
        if (ds.size() == 1) return std::to_string(ds[0]);
        std::string s = "(";
        for (std::size_t i = 0; i < ds.size(); ++i) s += (i ? "," : "") + std::to_string(ds[i]);
        return s + ")";
    };
    return "(" + vec(g.a) + "," + vec(g.b) + ")";
}

/// A finite G in Z x Z on which pi_{-1} is one-to-one. Points are kept sorted.
class Config {
public:
    Config() = default;
    Config(Space z, std::vector<Point> points) : space_(z), points_(std::move(points)) {
        std::sort(points_.begin(), points_.end());
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (!z.contains(points_[i].a) || !z.contains(points_[i].b))
                throw InvalidInput("point " + std::to_string(i) + " lies outside F_p^d");
            if (i > 0 && points_[i] == points_[i - 1])
                throw InvalidInput("duplicate point " + to_string(z, points_[i]));
        }
        const Slope m1 = minus_one(z.p());
        std::map<ZElem, std::size_t> seen;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const ZElem key = project(z, m1, points_[i]);
            auto [it, fresh] = seen.emplace(key, i);
            if (!fresh)
                throw InjectivityViolation("pi_{-1} collision between " + to_string(z, points_[it->second]) +
                                           " and " + to_string(z, points_[i]));
        }
    }

    const Space& space() const noexcept { return space_; }
    const std::vector<Point>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const Point& operator[](std::size_t i) const { return points_[i]; }

    std::set<ZElem> projection(const Slope& r) const {
        std::set<ZElem> out;
        for (const auto& g : points_) out.insert(project(space_, r, g));
        return out;
    }
    std::size_t projection_count(const Slope& r) const { return projection(r).size(); }

    /// max over rs of #pi_r(G)
    std::size_t max_projection(std::span<const Slope> rs) const {
        std::size_t n = 0;
        for (const auto& r : rs) n = std::max(n, projection_count(r));
        return n;
    }

    /// Sub-configuration on the given (sorted or unsorted) point indices.
    Config subset(std::span<const std::size_t> idx) const {
        std::vector<Point> pts;
        pts.reserve(idx.size());
        for (auto i : idx) pts.push_back(points_.at(i));
        return Config(space_, std::move(pts));
    }

    bool operator==(const Config&) const = default;

private:
    Space space_;
    std::vector<Point> points_;
};

/// The fibers [x]_f of a map on a finite domain, indexed by f-value in
/// increasing order. Each fiber lists domain positions in increasing order.
template <class Key>
struct Partition {
    std::map<Key, std::vector<std::size_t>> fibers;
    std::size_t domain_size = 0;

    std::size_t image_size() const noexcept { return fibers.size(); }
    const std::vector<std::size_t>& fiber_of(const Key& k) const { return fibers.at(k); }
};

template <class T, class F>
auto partition(std::span<const T> xs, F&& f) {
    using Key = std::decay_t<std::invoke_result_t<F&, const T&>>;
    Partition<Key> out;
    out.domain_size = xs.size();
    for (std::size_t i = 0; i < xs.size(); ++i) out.fibers[f(xs[i])].push_back(i);
    return out;
}

template <class T, class F>
auto partition(const std::vector<T>& xs, F&& f) {
    return partition(std::span<const T>(xs), std::forward<F>(f));
}

namespace detail {
template <class T>
std::vector<T> take_flags(std::span<const T> xs, const std::vector<char>& keep) {
    std::vector<T> out;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (keep[i]) out.push_back(xs[i]);
    return out;
}
}  // namespace detail

/// X^{<f>} = { x : #[x]_f >= #X / (2 #Y) }, with #Y the nominal codomain size.
template <class T, class F>
std::vector<T> popular_refine(std::span<const T> xs, F&& f, std::uint64_t codomain_size) {
    const auto part = partition(xs, f);
    if (codomain_size < part.image_size())
        throw InvalidInput("codomain size " + std::to_string(codomain_size) + " is smaller than the image (" +
                           std::to_string(part.image_size()) + ")");
    std::vector<char> keep(xs.size(), 0);
    for (const auto& [key, fiber] : part.fibers) {
        // 2 #Y #fiber >= #X, ties kept
        if (2 * codomain_size * fiber.size() >= xs.size())
            for (auto i : fiber) keep[i] = 1;
    }
    return detail::take_flags(xs, keep);
}

template <class T, class F>
std::vector<T> popular_refine(const std::vector<T>& xs, F&& f, std::uint64_t codomain_size) {
    return popular_refine(std::span<const T>(xs), std::forward<F>(f), codomain_size);
}

/// True iff #fiber >= N^{-100/M} #X / #Y, decided exactly.
inline bool strong_threshold_met(std::uint64_t fiber, std::uint64_t domain, std::uint64_t codomain, std::uint64_t N,
                                 std::uint64_t M) {
    // (fiber * #Y)^M * N^100 >= #X^M
    const std::vector<PowerTerm> lhs{{BigRational(fiber) * codomain, Rational(static_cast<std::int64_t>(M))},
                                     {BigRational(N), Rational(100)}};
    const std::vector<PowerTerm> rhs{{BigRational(domain), Rational(static_cast<std::int64_t>(M))}};
    return compare_products(lhs, rhs) >= 0;
}

/// X^{<<f>>} = { x : #[x]_f >= N^{-100/M} #X / #Y }.
template <class T, class F>
std::vector<T> strong_refine(std::span<const T> xs, F&& f, std::uint64_t N, std::uint64_t M,
                             std::uint64_t codomain_size) {
    if (N < 2) throw InvalidInput("strong refinement needs N >= 2");
    if (M < 1) throw InvalidInput("strong refinement needs M >= 1");
    const auto part = partition(xs, f);
    if (codomain_size < part.image_size()) throw InvalidInput("codomain size is smaller than the image");
    std::vector<char> keep(xs.size(), 0);
    for (const auto& [key, fiber] : part.fibers)
        if (strong_threshold_met(fiber.size(), xs.size(), codomain_size, N, M))
            for (auto i : fiber) keep[i] = 1;
    return detail::take_flags(xs, keep);
}

template <class T, class F>
std::vector<T> strong_refine(const std::vector<T>& xs, F&& f, std::uint64_t N, std::uint64_t M,
                             std::uint64_t codomain_size) {
    return strong_refine(std::span<const T>(xs), std::forward<F>(f), N, M, codomain_size);
}

/// #{(x1, x2) : f(x1) = f(x2)}; at least #X^2 / #Y by Cauchy-Schwarz.
template <class T, class F>
std::uint64_t count_congruent_pairs(std::span<const T> xs, F&& f) {
    const auto part = partition(xs, f);
    std::uint64_t n = 0;
    for (const auto& [key, fiber] : part.fibers) n += static_cast<std::uint64_t>(fiber.size()) * fiber.size();
    return n;
}

template <class T, class F>
std::uint64_t count_congruent_pairs(const std::vector<T>& xs, F&& f) {
    return count_congruent_pairs(std::span<const T>(xs), std::forward<F>(f));
}

/// True iff every joint fiber of fs lies inside a fiber of F.
template <class T, class Fn, class... Fs>
bool check_determined(std::span<const T> xs, Fn&& F, Fs&&... fs) {
    using Joint = std::tuple<std::decay_t<std::invoke_result_t<Fs&, const T&>>...>;
    using Val = std::decay_t<std::invoke_result_t<Fn&, const T&>>;
    std::map<Joint, Val> seen;
    for (const auto& x : xs) {
        Joint key{fs(x)...};
        Val v = F(x);
        auto [it, fresh] = seen.emplace(std::move(key), v);
        if (!fresh && !(it->second == v)) return false;
    }
    return true;
}

template <class T, class Fn, class... Fs>
bool check_determined(const std::vector<T>& xs, Fn&& F, Fs&&... fs) {
    return check_determined(std::span<const T>(xs), std::forward<Fn>(F), std::forward<Fs>(fs)...);
}

/// An ordered pair (g, g') of configuration indices.
struct Segment {
    std::uint32_t first;
    std::uint32_t second;
    auto operator<=>(const Segment&) const = default;
};

/// V^{r0} = {(g, g') in G^2 : pi_{r0}(g) = pi_{r0}(g')}, diagonal pairs included.
struct SegmentFamily {
    Slope r0;
    std::vector<Segment> segments;
    std::size_t size() const noexcept { return segments.size(); }
};

inline SegmentFamily build_segments(const Config& G, const Slope& r0) {
    if (!r0.is_proper()) throw InvalidInput("segment slope must be proper");
    const auto& pts = G.points();
    const auto part = partition(pts, [&](const Point& g) { return project(G.space(), r0, g); });
    SegmentFamily V{r0, {}};
    for (const auto& [key, fiber] : part.fibers)
        for (auto i : fiber)
            for (auto j : fiber) V.segments.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    std::sort(V.segments.begin(), V.segments.end());
    return V;
}

struct Corner {
    std::uint32_t g1;
    std::uint32_t g2;
    std::uint32_t g3;
    auto operator<=>(const Corner&) const = default;
};

/// C^{r1,r2} = {(g1, g2, g3) : g1 ~_{pi_r1} g2 ~_{pi_r2} g3}.
struct CornerFamily {
    Slope r1;
    Slope r2;
    std::vector<Corner> corners;
    std::size_t size() const noexcept { return corners.size(); }
};

inline CornerFamily build_corners(const Config& G, const Slope& r1, const Slope& r2) {
    if (!r1.is_proper() || !r2.is_proper()) throw InvalidInput("corner slopes must be proper");
    if (r1 == r2) throw InvalidInput("corner slopes must differ");
    const auto& pts = G.points();
    const auto& z = G.space();
    const auto p1 = partition(pts, [&](const Point& g) { return project(z, r1, g); });
    const auto p2 = partition(pts, [&](const Point& g) { return project(z, r2, g); });
    CornerFamily C{r1, r2, {}};
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const auto& f1 = p1.fiber_of(project(z, r1, pts[j]));
        const auto& f2 = p2.fiber_of(project(z, r2, pts[j]));
        for (auto i : f1)
            for (auto k : f2)
                C.corners.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                     static_cast<std::uint32_t>(k)});
    }
    std::sort(C.corners.begin(), C.corners.end());
    return C;
}

/// nu(g, g') = s pi_{r_inf}(g) + pi_{-1}(g')
inline ZElem eval_nu(const Space& z, const NuParams& nu, const Point& g, const Point& gp) {
    if (nu.s.modulus() != z.p()) throw ModulusMismatch(nu.s.modulus(), z.p());
    return z.add(z.scale(nu.s, project(z, nu.r_inf, g)), project(z, minus_one(z.p()), gp));
}

inline ZElem eval_nu(const Config& G, const NuParams& nu, const Segment& v) {
    return eval_nu(G.space(), nu, G[v.first], G[v.second]);
}

/// mu(g1, g2, g3) = pi_{r3}(g1) + pi_{-1}(g3)
inline ZElem eval_mu(const Space& z, const Slope& r3, const Point& g1, const Point& /*g2*/, const Point& g3) {
    return z.add(project(z, r3, g1), project(z, minus_one(z.p()), g3));
}

inline ZElem eval_mu(const Config& G, const Slope& r3, const Corner& c) {
    return eval_mu(G.space(), r3, G[c.g1], G[c.g2], G[c.g3]);
}

/// The linear map on Z x Z induced by L^{-1}: the returned configuration H
/// satisfies #pi_{L(r)}(H) = #pi_r(G) for every slope r, and keeps pi_{-1}
/// injective whenever L fixes -1.
inline Config transform_config(const Moebius& L, const Config& G) {
    if (!L.fixes_minus_one()) throw InvalidInput("transform requires a map fixing -1");
    const auto& z = G.space();
    const Moebius inv = L.inverse();
    std::vector<Point> out;
    out.reserve(G.size());
    for (const auto& g : G.points()) {
        // column action of [[d, b], [c, a]] for the map (a r + b) / (c r + d)
        const ZElem na = z.axpby(inv.d, g.a, inv.b, g.b);
        const ZElem nb = z.axpby(inv.c, g.a, inv.a, g.b);
        out.push_back({na, nb});
    }
    return Config(z, std::move(out));
}

}  // namespace kakeya
