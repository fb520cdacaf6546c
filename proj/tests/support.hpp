#pragma once

// Shared generators for the test suites.

#include <algorithm>
#include <numeric>
#include <random>

#include "kakeya/config.hpp"

namespace kakeya::testing {

/// A random configuration of the given size over F_p: distinct pi_{-1} values
/// are drawn first, then a random b for each.
inline Config random_config(std::uint64_t p, std::size_t size, std::mt19937_64& rng) {
    const Space z(p);
    std::vector<std::uint64_t> fibers(p);
    std::iota(fibers.begin(), fibers.end(), 0);
    std::shuffle(fibers.begin(), fibers.end(), rng);
    size = std::min<std::size_t>(size, p);
    std::vector<Point> pts;
    for (std::size_t i = 0; i < size; ++i) {
        const std::uint64_t b = rng() % p;
        // a - b = fiber
        pts.push_back({ZElem{(fibers[i] + b) % p}, ZElem{b}});
    }
    return Config(z, std::move(pts));
}

/// A random configuration whose projections onto the given slopes stay small:
/// points are drawn from a product set {x : pi_r(x) in A, pi_r2(x) in B}.
inline Config random_structured_config(std::uint64_t p, std::size_t side, std::mt19937_64& rng) {
    const Space z(p);
    std::vector<std::uint64_t> vals(p);
    std::iota(vals.begin(), vals.end(), 0);
    std::shuffle(vals.begin(), vals.end(), rng);
    const std::uint64_t base = rng() % p;
    std::vector<Point> pts;
    std::set<std::uint64_t> used;
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j) {
            const std::uint64_t a = (base + i) % p, b = vals[j];
            const std::uint64_t key = (a + p - b) % p;
            if (!used.insert(key).second) continue;
            pts.push_back({ZElem{a}, ZElem{b}});
        }
    return Config(z, std::move(pts));
}

}  // namespace kakeya::testing
