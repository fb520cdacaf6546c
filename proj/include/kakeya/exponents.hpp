#pragma once

// Exponent recursions and the dimension / maximal-function bounds they yield.
// Closed forms that are rational are evaluated in exact arithmetic; the cubic
// fixed point is bracketed by bisection in long double.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "kakeya/errors.hpp"
#include "kakeya/exact.hpp"

namespace kakeya::exponents {

namespace detail {
inline void require_beta(double beta) {
    if (!(beta > 1.0 && beta <= 2.0)) throw InvalidInput("beta must lie in (1, 2]");
}
inline void require_beta(const Rational& beta) {
    if (!(beta > 1 && beta <= 2)) throw InvalidInput("beta must lie in (1, 2]");
}
}  // namespace detail

/// beta -> (4 beta - 1) / (2 beta)
inline Rational basic_map(const Rational& beta) {
    detail::require_beta(beta);
    return (4 * beta - 1) / (2 * beta);
}
inline double basic_map(double beta) {
    detail::require_beta(beta);
    return (4.0 * beta - 1.0) / (2.0 * beta);
}

/// Fixed point of basic_map, 1 + sqrt(2)/2.
inline double basic_fixed() { return static_cast<double>(1.0L + std::sqrt(2.0L) / 2.0L); }

/// beta -> (3 beta^2 + 2 beta - 2) / (beta^2 + 3 beta - 2)
inline Rational advanced_map(const Rational& beta) {
    detail::require_beta(beta);
    return (3 * beta * beta + 2 * beta - 2) / (beta * beta + 3 * beta - 2);
}
inline double advanced_map(double beta) {
    detail::require_beta(beta);
    const long double b = beta;
    return static_cast<double>((3 * b * b + 2 * b - 2) / (b * b + 3 * b - 2));
}

inline long double advanced_cubic(long double a) { return a * a * a - 4 * a + 2; }

struct Bracket {
    long double lo;
    long double hi;
};

/// Bisection bracket for the root of a^3 - 4a + 2 in (1, 2); the cubic is
/// negative at lo and positive at hi throughout.
inline Bracket advanced_fixed_bracket(long double width = 1e-15L) {
    Bracket b{1.0L, 2.0L};
    while (b.hi - b.lo > width) {
        const long double mid = (b.lo + b.hi) / 2;
        if (advanced_cubic(mid) < 0)
            b.lo = mid;
        else
            b.hi = mid;
        if (mid == b.lo && mid == b.hi) break;
    }
    return b;
}

/// The unique root of a^3 - 4a + 2 = 0 in (1, 2), i.e. the fixed point of advanced_map.
inline double advanced_fixed() {
    const auto b = advanced_fixed_bracket();
    return static_cast<double>((b.lo + b.hi) / 2);
}

/// Same fixed point reached by iterating advanced_map from beta = 2.
inline double advanced_fixed_by_iteration(double tol = 1e-13, int max_iter = 100000) {
    double beta = 2.0;
    for (int i = 0; i < max_iter; ++i) {
        const double next = advanced_map(beta);
        if (std::abs(next - beta) < tol) return next;
        beta = next;
    }
    return beta;
}

/// Exponents of the maximal estimate at dimension n: p = (4n+3)/7, p' = p/(p-1),
/// q = (n-1) p'. q equals n + 3/4 identically.
struct MaximalExponents {
    Rational p;
    Rational p_conjugate;
    Rational q;
};

inline MaximalExponents maximal_exponents(const Rational& n) {
    if (n < 2) throw InvalidInput("dimension must be at least 2");
    const Rational p = (4 * n + 3) / 7;
    const Rational pc = p / (p - 1);
    return {p, pc, (n - 1) * pc};
}

struct DimensionRow {
    double n = 0;
    double minkowski = 0;
    double hausdorff = 0;
    double maximal_p = 0;
    double maximal_q = 0;
};

inline DimensionRow dimension_bounds(double n) {
    if (!(n >= 2)) throw InvalidInput("dimension must be at least 2");
    const double alpha = advanced_fixed();
    const double p = (4 * n + 3) / 7;
    DimensionRow row;
    row.n = n;
    row.minkowski = (n + alpha - 1) / alpha;
    row.hausdorff = (2 - std::sqrt(2.0)) * (n - 4) + 3;
    row.maximal_p = p;
    row.maximal_q = (n - 1) * p / (p - 1);
    return row;
}

/// (a, b) -> ((a^2 + 2) / 4, b (a + 1) / 2)
inline std::pair<double, double> hausdorff_recursion(double a, double b) {
    if (a < 0 || b < 0) throw InvalidInput("hausdorff recursion needs a, b >= 0");
    return {(a * a + 2) / 4, b * (a + 1) / 2};
}
inline std::pair<Rational, Rational> hausdorff_recursion(const Rational& a, const Rational& b) {
    if (a < 0 || b < 0) throw InvalidInput("hausdorff recursion needs a, b >= 0");
    return {(a * a + 2) / 4, b * (a + 1) / 2};
}

/// Fixed point 2 - sqrt(2) of a -> (a^2 + 2) / 4.
inline double hausdorff_fixed() { return static_cast<double>(2.0L - std::sqrt(2.0L)); }

/// Iterates the recursion from (a, b) until a moves less than tol; returns the
/// final pair and the number of steps.
struct HausdorffIteration {
    double a;
    double b;
    int steps;
};
inline HausdorffIteration iterate_hausdorff(double a, double b, double tol = 1e-12, int max_steps = 1000) {
    int steps = 0;
    while (steps < max_steps) {
        const auto [na, nb] = hausdorff_recursion(a, b);
        ++steps;
        const bool done = std::abs(na - a) < tol;
        a = na;
        b = nb;
        if (done) break;
    }
    return {a, b, steps};
}

/// K(n, d) and K(d+1, d') give K(n, (2n + 1 + d') / 4).
inline double kakeya_recursion(double n, double d, double dprime) {
    if (!(d > 0 && d < n)) throw InvalidInput("kakeya recursion needs 0 < d < n");
    if (!(dprime > 0)) throw InvalidInput("kakeya recursion needs d' > 0");
    return (2 * n + 1 + dprime) / 4;
}

struct BoundRow {
    int n = 0;
    double minkowski = 0;
    double hausdorff = 0;
    double maximal_p = 0;
    double maximal_q = 0;
    double wolff = 0;               // (n+2)/2
    double kt_minkowski = 0;        // (4n+3)/7, the alpha = 7/4 Minkowski bound
    double kt_hausdorff = 0;        // (6n+5)/11
    double bourgain_hausdorff = 0;  // (13n+12)/25
    double best = 0;
    bool new_minkowski = false;
    bool new_hausdorff = false;
    bool new_maximal = false;
};

struct BoundTable {
    std::vector<BoundRow> rows;
    /// Real n where the Hausdorff and Minkowski lower bounds coincide.
    double hausdorff_minkowski_crossover = 0;
};

inline double hausdorff_minkowski_crossover() {
    const double alpha = advanced_fixed();
    const double c = 2 - std::sqrt(2.0);
    // c (n - 4) + 3 = (n + alpha - 1) / alpha
    return ((alpha - 1) / alpha + 4 * c - 3) / (c - 1 / alpha);
}

inline BoundRow bound_row(int n) {
    const auto dims = dimension_bounds(n);
    BoundRow r;
    r.n = n;
    r.minkowski = dims.minkowski;
    r.hausdorff = dims.hausdorff;
    r.maximal_p = dims.maximal_p;
    r.maximal_q = to_double(maximal_exponents(Rational(n)).q);
    r.wolff = (n + 2) / 2.0;
    r.kt_minkowski = (4 * n + 3) / 7.0;
    r.kt_hausdorff = (6 * n + 5) / 11.0;
    r.bourgain_hausdorff = (13 * n + 12) / 25.0;
    r.best = std::max({r.minkowski, r.hausdorff, r.maximal_p});
    r.new_minkowski = r.minkowski > r.wolff && r.minkowski > r.kt_minkowski && r.minkowski > r.bourgain_hausdorff;
    r.new_hausdorff = r.hausdorff > r.wolff && r.hausdorff > r.kt_hausdorff && r.hausdorff > r.bourgain_hausdorff;
    r.new_maximal = r.maximal_p > r.wolff && r.maximal_p > r.bourgain_hausdorff;
    return r;
}

inline BoundTable comparison_table(int n_min, int n_max) {
    if (n_min < 2 || n_max < n_min) throw InvalidInput("comparison table needs 2 <= n_min <= n_max");
    BoundTable t;
    for (int n = n_min; n <= n_max; ++n) t.rows.push_back(bound_row(n));
    t.hausdorff_minkowski_crossover = hausdorff_minkowski_crossover();
    return t;
}

}  // namespace kakeya::exponents
