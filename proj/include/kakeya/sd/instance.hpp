#pragma once

// An SD instance: a configuration, a slope set R and an optional cap N on
// every projection #pi_r(G), r in R.

#include <cmath>
#include <optional>
#include <vector>

#include "kakeya/config.hpp"

namespace kakeya {

struct SdInstance {
    Config G;
    std::vector<Slope> R;
    std::optional<std::uint64_t> cap;

    /// Throws InvalidInput naming the first offending slope.
    void validate() const {
        const auto p = G.space().p();
        for (const auto& r : R) {
            if (r.is_finite() && r.value().modulus() != p) throw ModulusMismatch(r.value().modulus(), p);
            if (!r.is_proper()) throw InvalidInput("slope " + to_string(r) + " is not proper");
        }
        if (cap) {
            for (const auto& r : R) {
                const auto n = G.projection_count(r);
                if (n > *cap)
                    throw InvalidInput("projection onto slope " + to_string(r) + " has " + std::to_string(n) +
                                       " values, above the cap " + std::to_string(*cap));
            }
        }
    }

    std::size_t max_projection() const { return G.max_projection(R); }
};

/// log #G / log max_r #pi_r(G)
inline double empirical_exponent(const SdInstance& inst) {
    const auto n = inst.max_projection();
    if (n <= 1) throw DegenerateInstance("largest projection has at most one value");
    return std::log(static_cast<double>(inst.G.size())) / std::log(static_cast<double>(n));
}

/// #G <= C (max_r #pi_r(G))^alpha
inline bool verify_sd(const SdInstance& inst, double alpha, double C) {
    const double n = static_cast<double>(inst.max_projection());
    const double g = static_cast<double>(inst.G.size());
    if (g == 0) return true;
    return std::log(g) <= std::log(C) + alpha * std::log(n) + 1e-12;
}

}  // namespace kakeya
