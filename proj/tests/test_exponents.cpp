#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "kakeya/exponents.hpp"

using namespace kakeya;
using namespace kakeya::exponents;

namespace {

// Newton's method on a^3 - 4a + 2 from a = 1.5, in long double.
long double newton_root() {
    long double a = 1.5L;
    for (int i = 0; i < 60; ++i) a -= (a * a * a - 4 * a + 2) / (3 * a * a - 4);
    return a;
}

}  // namespace

TEST(BasicMap, ExactValues) {
    EXPECT_EQ(basic_map(Rational(2)), Rational(7, 4));
    EXPECT_EQ(basic_map(Rational(7, 4)), Rational(12, 7));
    EXPECT_DOUBLE_EQ(basic_map(2.0), 1.75);
    EXPECT_THROW(basic_map(1.0), InvalidInput);
    EXPECT_THROW(basic_map(Rational(5, 2)), InvalidInput);
}

TEST(BasicMap, FixedPoint) {
    EXPECT_NEAR(basic_fixed(), 1.0 + std::sqrt(2.0) / 2.0, 1e-12);
    EXPECT_NEAR(basic_map(basic_fixed()), basic_fixed(), 1e-12);
}

TEST(AdvancedMap, ExactValues) {
    EXPECT_EQ(advanced_map(Rational(2)), Rational(7, 4));
    EXPECT_THROW(advanced_map(0.5), InvalidInput);
}

TEST(AdvancedMap, FixedPointMatchesIndependentRoot) {
    const auto start = std::chrono::steady_clock::now();
    const double a = advanced_fixed();
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1.0);
    EXPECT_NEAR(a, 1.67513, 1e-4);
    EXPECT_LT(std::abs(advanced_cubic(a)), 1e-12L);
    EXPECT_NEAR(a, static_cast<double>(newton_root()), 1e-12);
    EXPECT_NEAR(a, advanced_fixed_by_iteration(), 1e-10);
    EXPECT_NEAR(advanced_map(a), a, 1e-12);
}

TEST(Maps, MonotoneIntoTheIntervalAndAdvancedImproves) {
    const int steps = 10000;
    double prev_basic = 0, prev_adv = 0;
    for (int i = 1; i <= steps; ++i) {
        const double beta = 1.0 + static_cast<double>(i) / steps;
        const double b = basic_map(beta), a = advanced_map(beta);
        EXPECT_GT(b, 1.0);
        EXPECT_LE(b, 2.0);
        EXPECT_GT(a, 1.0);
        EXPECT_LE(a, 2.0);
        EXPECT_GT(b, prev_basic);
        EXPECT_GT(a, prev_adv);
        if (i < steps) {
            EXPECT_LT(a, b) << "beta=" << beta;
        }
        prev_basic = b;
        prev_adv = a;
    }
}

TEST(MaximalExponents, ConjugateIdentity) {
    for (int n = 2; n <= 50; ++n) {
        const auto m = maximal_exponents(Rational(n));
        EXPECT_EQ(m.p, Rational(4 * n + 3, 7));
        EXPECT_EQ((n - 1) * m.p_conjugate, Rational(4 * n + 3, 4));
        EXPECT_EQ(m.q, Rational(n) + Rational(3, 4));
    }
    EXPECT_THROW(maximal_exponents(Rational(1)), InvalidInput);
}

TEST(DimensionBounds, Examples) {
    EXPECT_NEAR(dimension_bounds(7).minkowski, (7 + 0.675130870566646) / 1.675130870566646, 1e-9);
    EXPECT_NEAR(dimension_bounds(7).minkowski, 4.5818, 1e-4);
    EXPECT_NEAR(dimension_bounds(5).hausdorff, 3.58579, 1e-5);
    EXPECT_DOUBLE_EQ(dimension_bounds(4).hausdorff, 3.0);
    EXPECT_NEAR(dimension_bounds(9).maximal_q, 9.75, 1e-12);
    EXPECT_THROW(dimension_bounds(1.5), InvalidInput);
}

TEST(HausdorffRecursion, Examples) {
    EXPECT_EQ(hausdorff_recursion(Rational(1), Rational(0)), std::make_pair(Rational(3, 4), Rational(0)));
    EXPECT_EQ(hausdorff_recursion(Rational(0), Rational(0)), std::make_pair(Rational(1, 2), Rational(0)));
    const double f = hausdorff_fixed();
    EXPECT_NEAR(hausdorff_recursion(f, 0.0).first, f, 1e-15);
    EXPECT_THROW(hausdorff_recursion(-1.0, 0.0), InvalidInput);
}

TEST(HausdorffRecursion, ConvergesFromOne) {
    double a = 1, b = 0;
    int steps = 0;
    while (std::abs(a - (2 - std::sqrt(2.0))) >= 1e-6 && steps < 50) {
        std::tie(a, b) = hausdorff_recursion(a, b);
        ++steps;
    }
    EXPECT_LE(steps, 50);
    EXPECT_NEAR(a, 2 - std::sqrt(2.0), 1e-6);
    const auto it = iterate_hausdorff(1.0, 0.0);
    EXPECT_NEAR(it.a, hausdorff_fixed(), 1e-6);
}

TEST(KakeyaRecursion, Examples) {
    EXPECT_DOUBLE_EQ(kakeya_recursion(5, 3.5, 3.25), 3.5625);
    EXPECT_DOUBLE_EQ(kakeya_recursion(5, 3.5, 3), 3.5);
    EXPECT_DOUBLE_EQ(kakeya_recursion(6, 4, 2 * 6 - 1), 6.0);
    EXPECT_THROW(kakeya_recursion(5, 6, 3), InvalidInput);
}

TEST(ComparisonTable, FirstDimensionsBeatingTheWolffBound) {
    const auto table = comparison_table(2, 40);
    int first_mink = 0, first_haus = 0;
    for (const auto& r : table.rows) {
        const double wolff = (r.n + 2) / 2.0;
        EXPECT_DOUBLE_EQ(r.wolff, wolff);
        if (!first_mink && r.minkowski > wolff) first_mink = r.n;
        if (!first_haus && r.hausdorff > wolff) first_haus = r.n;
        EXPECT_EQ(r.maximal_p > wolff, r.n > 8) << r.n;
        EXPECT_DOUBLE_EQ(r.maximal_q, r.n + 0.75);
        EXPECT_DOUBLE_EQ(r.best, std::max({r.minkowski, r.hausdorff, r.maximal_p}));
    }
    EXPECT_EQ(first_mink, 7);
    EXPECT_EQ(first_haus, 5);
}

TEST(ComparisonTable, Flags) {
    EXPECT_TRUE(bound_row(7).new_minkowski);
    EXPECT_FALSE(bound_row(6).new_minkowski);
    EXPECT_TRUE(bound_row(9).new_maximal);
    EXPECT_FALSE(bound_row(8).new_maximal);
    EXPECT_NEAR(bound_row(9).maximal_p, 39.0 / 7.0, 1e-12);
    EXPECT_THROW(comparison_table(5, 4), InvalidInput);
}

TEST(ComparisonTable, HausdorffMinkowskiCrossover) {
    const double x = comparison_table(2, 30).hausdorff_minkowski_crossover;
    EXPECT_GE(x, 22.6);
    EXPECT_LE(x, 22.8);
    // at the crossover both bounds agree
    EXPECT_NEAR(dimension_bounds(x).minkowski, dimension_bounds(x).hausdorff, 1e-9);
    // at n = 23 the Minkowski bound is already the larger one
    EXPECT_GT(bound_row(23).minkowski, bound_row(23).hausdorff);
    EXPECT_LT(bound_row(22).minkowski, bound_row(22).hausdorff);
}
