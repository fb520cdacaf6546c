#pragma once

// Exact arithmetic helpers: small rationals for slopes and exponents, big
// integers for threshold comparisons that involve large powers.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "kakeya/errors.hpp"

namespace kakeya {

// Mixed comparisons such as q == 0 recurse forever under C++20 with Boost 1.74;
// compare against Rational(...) or numerator() instead.
using Rational = boost::rational<std::int64_t>;
using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Rational& q) {
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

inline double to_double(const Rational& q) {
    return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

inline BigInt big_pow(BigInt base, std::uint64_t exp) {
    BigInt out = 1;
    while (exp) {
        if (exp & 1U) out *= base;
        base *= base;
        exp >>= 1U;
    }
    return out;
}

inline BigRational big_pow(const BigRational& base, std::int64_t exp) {
    if (exp < 0) {
        if (base == 0) throw InvalidInput("zero raised to a negative power");
        return big_pow(BigRational(1) / base, -exp);
    }
    BigRational out = 1;
    BigRational b = base;
    auto e = static_cast<std::uint64_t>(exp);
    while (e) {
        if (e & 1U) out *= b;
        b *= b;
        e >>= 1U;
    }
    return out;
}

/// One factor base^exponent of a positive monomial; base >= 0, exponent rational.
struct PowerTerm {
    BigRational base;
    Rational exponent;
};

/// Exact three-way comparison of prod(lhs) against prod(rhs), where each side is
/// a product of rational bases raised to rational exponents. Both sides are
/// raised to the common denominator of all exponents so the test is exact.
inline int compare_products(const std::vector<PowerTerm>& lhs, const std::vector<PowerTerm>& rhs) {
    auto zero_state = [](const std::vector<PowerTerm>& side) {
        // 0: positive finite, 1: zero, 2: infinite
        bool zero = false;
        bool inf = false;
        for (const auto& t : side) {
            if (t.base < 0) throw InvalidInput("negative base in monomial comparison");
            if (t.base == 0) {
                if (t.exponent > 0) zero = true;
                if (t.exponent < 0) inf = true;
            }
        }
        if (inf && zero) throw InvalidInput("indeterminate 0 * infinity in monomial");
        return inf ? 2 : (zero ? 1 : 0);
    };
    const int ls = zero_state(lhs);
    const int rs = zero_state(rhs);
    if (ls != 0 || rs != 0) {
        auto rank = [](int s) { return s == 1 ? 0 : (s == 0 ? 1 : 2); };
        if (ls == 1 && rs == 1) return 0;
        if (ls == rs) throw InvalidInput("indeterminate monomial comparison");
        return rank(ls) < rank(rs) ? -1 : (rank(ls) > rank(rs) ? 1 : 0);
    }
    // Decide from logarithms when the gap is far above rounding error.
    double llog = 0;
    double rlog = 0;
    double scale = 0;
    for (const auto& t : lhs) {
        if (t.exponent.numerator() == 0) continue;
        const double v = static_cast<double>(t.exponent.numerator()) / static_cast<double>(t.exponent.denominator()) *
                         std::log(t.base.convert_to<double>());
        llog += v;
        scale += std::abs(v);
    }
    for (const auto& t : rhs) {
        if (t.exponent.numerator() == 0) continue;
        const double v = static_cast<double>(t.exponent.numerator()) / static_cast<double>(t.exponent.denominator()) *
                         std::log(t.base.convert_to<double>());
        rlog += v;
        scale += std::abs(v);
    }
    if (std::isfinite(llog) && std::isfinite(rlog)) {
        const double margin = 1e-9 * (scale + 1.0);
        if (llog < rlog - margin) return -1;
        if (llog > rlog + margin) return 1;
    }
    std::int64_t denom = 1;
    for (const auto* side : {&lhs, &rhs})
        for (const auto& t : *side) denom = std::lcm(denom, t.exponent.denominator());
    BigRational l = 1;
    BigRational r = 1;
    for (const auto& t : lhs) {
        if (t.exponent.numerator() == 0) continue;
        l *= big_pow(t.base, (t.exponent * denom).numerator());
    }
    for (const auto& t : rhs) {
        if (t.exponent.numerator() == 0) continue;
        r *= big_pow(t.base, (t.exponent * denom).numerator());
    }
    if (l < r) return -1;
    if (l > r) return 1;
    return 0;
}

inline double big_to_double(const BigRational& q) { return q.convert_to<double>(); }

}  // namespace kakeya
