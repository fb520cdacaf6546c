#pragma once

// Slopes in K u {inf}, the projections pi_r(a, b) = a + r b, dual slopes with
// respect to a map nu, and fractional linear maps fixing -1. Everything is
// templated on the scalar K so the same code serves F_p (configurations) and
// the rationals (grid slopes).

#include <algorithm>
#include <compare>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kakeya/errors.hpp"
#include "kakeya/exact.hpp"
#include "kakeya/field.hpp"

namespace kakeya {

inline FieldElem one_like(const FieldElem& x) { return FieldElem(1, x.modulus()); }
inline FieldElem zero_like(const FieldElem& x) { return FieldElem(0, x.modulus()); }
inline bool is_zero(const FieldElem& x) { return x.is_zero(); }
inline Rational one_like(const Rational&) { return Rational(1); }
inline Rational zero_like(const Rational&) { return Rational(0); }
inline bool is_zero(const Rational& q) { return q.numerator() == 0; }

/// An element of K u {inf}. Infinity is a tag, never an in-band value.
template <class K>
class BasicSlope {
public:
    BasicSlope() = default;
    static BasicSlope finite(K v) {
        BasicSlope s;
        s.value_ = std::move(v);
        return s;
    }
    static BasicSlope infinity() { return BasicSlope{}; }

    bool is_infinite() const noexcept { return !value_.has_value(); }
    bool is_finite() const noexcept { return value_.has_value(); }
    const K& value() const {
        if (!value_) throw InvalidInput("infinite slope has no finite value");
        return *value_;
    }

    /// proper iff the slope is not -1
    bool is_proper() const {
        if (!value_) return true;
        return !(*value_ == -one_like(*value_));
    }

    bool operator==(const BasicSlope& o) const { return value_ == o.value_; }
    /// finite slopes first (by value), infinity last
    std::strong_ordering operator<=>(const BasicSlope& o) const {
        if (!value_ || !o.value_) return o.value_.has_value() <=> value_.has_value();
        if (*value_ == *o.value_) return std::strong_ordering::equal;
        return *value_ < *o.value_ ? std::strong_ordering::less : std::strong_ordering::greater;
    }

private:
    std::optional<K> value_;
};

using Slope = BasicSlope<FieldElem>;
using QSlope = BasicSlope<Rational>;

inline Slope slope_of(std::int64_t v, std::uint64_t p) { return Slope::finite(FieldElem(v, p)); }
inline Slope slope_inf() { return Slope::infinity(); }

inline std::string to_string(const Slope& s) { return s.is_infinite() ? "inf" : to_string(s.value()); }
inline std::string to_string(const QSlope& s) { return s.is_infinite() ? "inf" : to_string(s.value()); }

/// Linear functional (a, b) -> c0 a + c1 b. pi_r corresponds to (1, r), pi_inf to (0, 1).
template <class K>
struct LinearForm {
    K c0;
    K c1;
};

template <class K>
LinearForm<K> form_of(const BasicSlope<K>& r, const K& like) {
    if (r.is_infinite()) return {zero_like(like), one_like(like)};
    return {one_like(like), r.value()};
}

/// Slope of a nonzero form (the projective point [c0 : c1]).
template <class K>
BasicSlope<K> slope_of_form(const LinearForm<K>& f) {
    if (is_zero(f.c0)) {
        if (is_zero(f.c1)) throw ExceptionalSlope("zero linear form has no slope");
        return BasicSlope<K>::infinity();
    }
    return BasicSlope<K>::finite(f.c1 / f.c0);
}

namespace detail {
inline void require_modulus(const Space& z, const Slope& r) {
    if (r.is_finite() && r.value().modulus() != z.p()) throw ModulusMismatch(r.value().modulus(), z.p());
}
}  // namespace detail

/// pi_r(a, b) = a + r b, and pi_inf(a, b) = b.
inline ZElem project(const Space& z, const Slope& r, const Point& g) {
    detail::require_modulus(z, r);
    if (!z.contains(g.a) || !z.contains(g.b)) throw InvalidInput("point outside the ambient space");
    if (r.is_infinite()) return g.b;
    return z.axpby(z.scalar(1), g.a, r.value(), g.b);
}

/// pi_{r (x) r2}(g, g') = (pi_r(g), pi_r2(g')).
inline std::pair<ZElem, ZElem> project_pair(const Space& z, const Slope& r, const Slope& r2,
                                            const std::pair<Point, Point>& gg) {
    return {project(z, r, gg.first), project(z, r2, gg.second)};
}

/// The unique g with pi_r(g) = x and pi_r2(g) = y (r != r2).
inline Point solve_coord(const Space& z, const Slope& r, const Slope& r2, ZElem x, ZElem y) {
    detail::require_modulus(z, r);
    detail::require_modulus(z, r2);
    if (r == r2) throw InvalidInput("solve_coord needs two distinct slopes");
    const FieldElem like = z.scalar(0);
    const auto u = form_of(r, like);
    const auto v = form_of(r2, like);
    const FieldElem det = u.c0 * v.c1 - u.c1 * v.c0;
    const FieldElem inv = det.inverse();
    // [u0 u1; v0 v1] (a, b)^T = (x, y)^T
    const ZElem a = z.axpby(v.c1 * inv, x, -(u.c1 * inv), y);
    const ZElem b = z.axpby(-(v.c0 * inv), x, u.c0 * inv, y);
    return Point{a, b};
}

/// Parameters of nu(g, g') = s pi_{r_inf}(g) + pi_{-1}(g') on segments of slope r0.
template <class K>
struct BasicNuParams {
    BasicSlope<K> r0;
    BasicSlope<K> r_inf;
    K s;

    void validate() const {
        if (!r0.is_proper() || !r_inf.is_proper()) throw InvalidInput("nu slopes must be proper");
        if (r0 == r_inf) throw InvalidInput("nu requires r0 != r_inf");
        if (is_zero(s)) throw InvalidInput("nu requires s != 0");
    }
};

using NuParams = BasicNuParams<FieldElem>;
using QNuParams = BasicNuParams<Rational>;

/// nu = x pi_r(g) + y pi_{r'}(g') + z (pi_{r0}(g) - pi_{r0}(g')), all coefficients nonzero.
template <class K>
struct DualIdentity {
    K x;
    K y;
    K z;
    BasicSlope<K> dual;
};

template <class K>
DualIdentity<K> dual_identity(const BasicNuParams<K>& nu, const BasicSlope<K>& r) {
    nu.validate();
    if (!r.is_proper()) throw ExceptionalSlope("slope -1 has no dual");
    if (r == nu.r0 || r == nu.r_inf) throw ExceptionalSlope("slope coincides with r0 or r_inf");
    const K& like = nu.s;
    const auto lr = form_of(r, like);
    const auto l0 = form_of(nu.r0, like);
    const auto linf = form_of(nu.r_inf, like);
    const K t0 = nu.s * linf.c0;
    const K t1 = nu.s * linf.c1;
    // s l_inf = x l_r + z l_0
    const K det = lr.c0 * l0.c1 - l0.c0 * lr.c1;
    if (is_zero(det)) throw ExceptionalSlope("slope coincides with r0");
    const K x = (t0 * l0.c1 - l0.c0 * t1) / det;
    const K z = (lr.c0 * t1 - t0 * lr.c1) / det;
    // y l_{r'} = l_{-1} + z l_0
    const K w0 = one_like(like) + z * l0.c0;
    const K w1 = -one_like(like) + z * l0.c1;
    if (is_zero(w0) && is_zero(w1)) throw ExceptionalSlope("dual form vanishes");
    const auto dual = slope_of_form(LinearForm<K>{w0, w1});
    const K y = is_zero(w0) ? w1 : w0;
    if (is_zero(x) || is_zero(y) || is_zero(z)) throw ExceptionalSlope("dual identity has a vanishing coefficient");
    return {x, y, z, dual};
}

/// The dual slope r' of r with respect to r0 and nu.
template <class K>
BasicSlope<K> dual_slope(const BasicNuParams<K>& nu, const BasicSlope<K>& r) {
    return dual_identity(nu, r).dual;
}

/// Fractional linear map r -> (a r + b) / (c r + d).
template <class K>
struct BasicMoebius {
    K a, b, c, d;

    K det() const { return a * d - b * c; }
    bool nondegenerate() const { return !is_zero(det()); }

    BasicSlope<K> apply(const BasicSlope<K>& r) const {
        if (!nondegenerate()) throw InvalidInput("degenerate fractional linear map");
        if (r.is_infinite()) {
            if (is_zero(c)) return BasicSlope<K>::infinity();
            return BasicSlope<K>::finite(a / c);
        }
        const K num = a * r.value() + b;
        const K den = c * r.value() + d;
        if (is_zero(den)) return BasicSlope<K>::infinity();
        return BasicSlope<K>::finite(num / den);
    }

    /// (this o other)(r) = this(other(r))
    BasicMoebius compose(const BasicMoebius& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    BasicMoebius inverse() const { return {d, -b, -c, a}; }

    bool fixes_minus_one() const {
        const K m1 = -one_like(a);
        return apply(BasicSlope<K>::finite(m1)) == BasicSlope<K>::finite(m1);
    }

    static BasicMoebius identity(const K& like) {
        return {one_like(like), zero_like(like), zero_like(like), one_like(like)};
    }
};

using Moebius = BasicMoebius<FieldElem>;

template <class K>
BasicSlope<K> moebius_apply(const BasicMoebius<K>& L, const BasicSlope<K>& r) {
    return L.apply(r);
}

/// The map conjugate to u -> alpha u + beta under r -> 1/(r+1), which sends -1
/// to infinity. As (alpha, beta) range over K* x K these are exactly the maps
/// fixing -1.
template <class K>
BasicMoebius<K> moebius_fixing_minus_one(const K& alpha, const K& beta) {
    if (is_zero(alpha)) throw InvalidInput("alpha must be nonzero");
    const K one = one_like(alpha);
    return {one - beta, one - alpha - beta, beta, alpha + beta};
}

/// All p(p-1) maps fixing -1 over F_p, in (alpha, beta) lexicographic order.
inline std::vector<Moebius> all_moebius_fixing_minus_one(std::uint64_t p) {
    std::vector<Moebius> out;
    out.reserve(p * (p - 1));
    for (std::uint64_t al = 1; al < p; ++al)
        for (std::uint64_t be = 0; be < p; ++be)
            out.push_back(moebius_fixing_minus_one(FieldElem(static_cast<std::int64_t>(al), p),
                                                   FieldElem(static_cast<std::int64_t>(be), p)));
    return out;
}

/// Outcome of checking that {r0, r_inf, r_1..r_k, r'_1..r'_k} are proper and pairwise distinct.
template <class K>
struct GenericSlopeReport {
    bool ok = false;
    std::vector<BasicSlope<K>> duals;
    std::string violation;
};

template <class K>
GenericSlopeReport<K> check_generic_slopes(const BasicNuParams<K>& nu, const std::vector<BasicSlope<K>>& rs) {
    GenericSlopeReport<K> rep;
    try {
        nu.validate();
    } catch (const InvalidInput& e) {
        rep.violation = e.what();
        return rep;
    }
    std::vector<std::pair<std::string, BasicSlope<K>>> named{{"r0", nu.r0}, {"r_inf", nu.r_inf}};
    for (std::size_t i = 0; i < rs.size(); ++i) named.emplace_back("r" + std::to_string(i + 1), rs[i]);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (!rs[i].is_proper()) {
            rep.violation = "r" + std::to_string(i + 1) + " is not proper";
            return rep;
        }
        try {
            rep.duals.push_back(dual_slope(nu, rs[i]));
        } catch (const ExceptionalSlope& e) {
            rep.violation = "r" + std::to_string(i + 1) + " = " + to_string(rs[i]) + ": " + e.what();
            return rep;
        }
        named.emplace_back("r" + std::to_string(i + 1) + "'", rep.duals.back());
    }
    for (std::size_t i = 0; i < named.size(); ++i) {
        if (!named[i].second.is_proper()) {
            rep.violation = named[i].first + " = -1 is not proper";
            return rep;
        }
    }
    for (std::size_t j = 0; j < named.size(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (named[i].second == named[j].second) {
                rep.violation = named[j].first + " = " + named[i].first + " = " + to_string(named[i].second) +
                                " (not disjoint)";
                return rep;
            }
    rep.ok = true;
    return rep;
}

}  // namespace kakeya
