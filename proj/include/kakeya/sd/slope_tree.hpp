#pragma once

// The slope tree used by the advanced argument. Every triple (r1, r2, r3)
// carries a set R_{r1,r2,r3} = L(R0) of slopes r4, and every r4 carries a set
// R_{r1,r2,r3,r4} = L'(R0) of slopes r whose duals (for the nu attached to r4)
// exist and avoid everything else. Children of a triple are (r2, r, r').

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kakeya/config.hpp"

namespace kakeya {

struct SlopeTriple {
    Slope r1;
    Slope r2;
    Slope r3;
    auto operator<=>(const SlopeTriple&) const = default;
    bool operator==(const SlopeTriple&) const = default;
};

inline std::string to_string(const SlopeTriple& t) {
    return "(" + to_string(t.r1) + "," + to_string(t.r2) + "," + to_string(t.r3) + ")";
}

/// One r4 in R_{r1,r2,r3}: mu = lambda pi_{r4} o gamma_1 + nu o gamma_{2,3}
/// on corners, with nu on segments of slope r2.
struct SlopeBranch {
    Slope r4;
    NuParams nu;
    FieldElem lambda;
    Moebius map;
    std::vector<Slope> slopes;  // R_{r1,r2,r3,r4}
    std::vector<Slope> duals;
};

struct TripleData {
    SlopeTriple triple;
    Moebius map;  // R_{r1,r2,r3} = map(R0)
    std::vector<SlopeBranch> branches;

    std::vector<Slope> r4s() const {
        std::vector<Slope> out;
        for (const auto& b : branches) out.push_back(b.r4);
        return out;
    }

    /// T(r1, r2, r3)
    std::vector<SlopeTriple> children() const {
        std::vector<SlopeTriple> out;
        for (const auto& b : branches)
            for (std::size_t i = 0; i < b.slopes.size(); ++i) out.push_back({triple.r2, b.slopes[i], b.duals[i]});
        return out;
    }

    /// R*(r1, r2, r3)
    std::vector<Slope> star() const {
        std::set<Slope> s{triple.r1, triple.r2, triple.r3};
        for (const auto& b : branches) {
            s.insert(b.r4);
            s.insert(b.slopes.begin(), b.slopes.end());
            s.insert(b.duals.begin(), b.duals.end());
        }
        return {s.begin(), s.end()};
    }
};

struct SlopeTree {
    std::uint64_t p = 0;
    int M = 0;
    std::uint64_t seed = 0;
    std::vector<Slope> R0;
    std::vector<std::vector<SlopeTriple>> levels;  // T_0 .. T_M
    std::map<SlopeTriple, TripleData> data;
    std::vector<Rational> rho;  // rho_k = 100 (1 - k/M)

    const TripleData& at(const SlopeTriple& t) const {
        const auto it = data.find(t);
        if (it == data.end()) throw InvalidInput("triple " + to_string(t) + " is not in the tree");
        return it->second;
    }

    /// R: the union of R*(T_j) over all levels.
    std::vector<Slope> all_slopes() const {
        std::set<Slope> s;
        for (const auto& level : levels)
            for (const auto& t : level) {
                const auto st = at(t).star();
                s.insert(st.begin(), st.end());
            }
        return {s.begin(), s.end()};
    }
};

namespace detail {

inline std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t slope_code(const Slope& r, std::uint64_t p) { return r.is_infinite() ? p : r.value().value(); }

inline std::uint64_t triple_seed(std::uint64_t seed, const SlopeTriple& t, std::uint64_t p) {
    std::uint64_t h = splitmix(seed);
    for (const auto& r : {t.r1, t.r2, t.r3}) h = splitmix(h ^ slope_code(r, p));
    return h;
}

/// Solves l_{r3} = lambda l_{r4} + kappa l_{r1} as linear forms.
inline std::pair<FieldElem, FieldElem> mu_coefficients(const Slope& r1, const Slope& r3, const Slope& r4,
                                                        std::uint64_t p) {
    const FieldElem like(0, p);
    const auto l1 = form_of(r1, like), l3 = form_of(r3, like), l4 = form_of(r4, like);
    const FieldElem det = l4.c0 * l1.c1 - l1.c0 * l4.c1;
    if (det.is_zero()) throw ExceptionalSlope("r4 coincides with r1");
    const FieldElem lambda = (l3.c0 * l1.c1 - l1.c0 * l3.c1) / det;
    const FieldElem kappa = (l4.c0 * l3.c1 - l3.c0 * l4.c1) / det;
    return {lambda, kappa};
}

inline std::vector<Slope> image(const Moebius& L, const std::vector<Slope>& R0) {
    std::vector<Slope> out;
    for (const auto& r : R0) out.push_back(L.apply(r));
    return out;
}

/// Empty string when the branch (r4, L'(R0)) meets every constraint.
inline std::string branch_violation(const SlopeTriple& t, const SlopeBranch& b) {
    if (!b.r4.is_proper()) return "r4 is not proper";
    if (b.r4 == t.r1 || b.r4 == t.r2 || b.r4 == t.r3) return "r4 = " + to_string(b.r4) + " repeats the triple";
    const auto rep = check_generic_slopes(b.nu, b.slopes);
    if (!rep.ok) return rep.violation;
    if (rep.duals != b.duals) return "stored duals disagree with the dual-slope computation";
    for (std::size_t i = 0; i < b.slopes.size(); ++i)
        for (const auto& x : {b.slopes[i], b.duals[i]})
            if (x == t.r3 || x == b.r4) return "slope " + to_string(x) + " collides with r3 or r4";
    return {};
}

inline std::optional<SlopeBranch> make_branch(const SlopeTriple& t, const Slope& r4, const Moebius& Lp,
                                              const std::vector<Slope>& R0, std::uint64_t p) {
    if (!r4.is_proper() || r4 == t.r1 || r4 == t.r2 || r4 == t.r3) return std::nullopt;
    const auto [lambda, kappa] = mu_coefficients(t.r1, t.r3, r4, p);
    if (lambda.is_zero() || kappa.is_zero()) return std::nullopt;
    SlopeBranch b{r4, NuParams{t.r2, t.r1, kappa}, lambda, Lp, image(Lp, R0), {}};
    const auto rep = check_generic_slopes(b.nu, b.slopes);
    if (!rep.ok) return std::nullopt;
    b.duals = rep.duals;
    if (!branch_violation(t, b).empty()) return std::nullopt;
    return b;
}

constexpr int kRandomDraws = 64;

/// Random draws first, then every map in order.
template <class Try>
bool search_maps(const std::vector<Moebius>& maps, std::mt19937_64& rng, Try&& attempt) {
    std::uniform_int_distribution<std::size_t> pick(0, maps.size() - 1);
    for (int i = 0; i < kRandomDraws; ++i)
        if (attempt(maps[pick(rng)])) return true;
    for (const auto& L : maps)
        if (attempt(L)) return true;
    return false;
}

inline TripleData build_triple(const SlopeTriple& t, const std::vector<Slope>& R0, std::uint64_t p,
                               std::uint64_t seed, const std::vector<Moebius>& maps) {
    std::mt19937_64 rng(triple_seed(seed, t, p));
    TripleData out{t, Moebius::identity(FieldElem(0, p)), {}};
    const bool found = search_maps(maps, rng, [&](const Moebius& L) {
        std::vector<SlopeBranch> branches;
        for (const auto& r4 : image(L, R0)) {
            std::optional<SlopeBranch> got;
            if (!r4.is_proper() || r4 == t.r1 || r4 == t.r2 || r4 == t.r3) return false;
            search_maps(maps, rng, [&](const Moebius& Lp) {
                got = make_branch(t, r4, Lp, R0, p);
                return got.has_value();
            });
            if (!got) return false;
            branches.push_back(std::move(*got));
        }
        out.map = L;
        out.branches = std::move(branches);
        return true;
    });
    if (!found)
        throw FieldTooSmall("no admissible slope sets for triple " + to_string(t) + " over F_" + std::to_string(p));
    return out;
}

}  // namespace detail

/// T_0 = {(0, 1, 2)}, T_{j+1} = union of T(t) over t in T_j; slope data is
/// built for every triple on levels 0..M.
inline SlopeTree build_slope_tree(std::uint64_t p, int M, std::uint64_t seed, std::vector<Slope> R0 = {}) {
    if (M < 0) throw InvalidInput("depth M must be nonnegative");
    const Space z(p);
    if (R0.empty()) R0 = {slope_of(0, p), slope_inf()};
    for (const auto& r : R0) {
        if (r.is_finite() && r.value().modulus() != p) throw ModulusMismatch(r.value().modulus(), p);
        if (!r.is_proper()) throw InvalidInput("R0 slope " + to_string(r) + " is not proper");
    }
    const SlopeTriple root{slope_of(0, p), slope_of(1, p), slope_of(2, p)};
    if (!root.r3.is_proper()) throw FieldTooSmall("slope 2 is not proper over F_" + std::to_string(p));

    SlopeTree tree;
    tree.p = p;
    tree.M = M;
    tree.seed = seed;
    tree.R0 = R0;
    for (int k = 0; k <= M; ++k) tree.rho.push_back(M == 0 ? Rational(100) : Rational(100) * (1 - Rational(k, M)));

    const auto maps = all_moebius_fixing_minus_one(p);
    tree.levels.push_back({root});
    for (int j = 0; j <= M; ++j) {
        std::set<SlopeTriple> next;
        for (const auto& t : tree.levels[j]) {
            if (!tree.data.count(t)) tree.data.emplace(t, detail::build_triple(t, R0, p, seed, maps));
            if (j < M)
                for (const auto& c : tree.data.at(t).children()) next.insert(c);
        }
        if (j < M) tree.levels.emplace_back(next.begin(), next.end());
    }
    return tree;
}

/// Re-checks every constraint of the tree; returns the violations found.
inline std::vector<std::string> validate_slope_tree(const SlopeTree& tree) {
    std::vector<std::string> bad;
    const auto p = tree.p;
    if (tree.levels.empty() || tree.levels[0] != std::vector<SlopeTriple>{{slope_of(0, p), slope_of(1, p), slope_of(2, p)}})
        bad.push_back("T_0 is not {(0,1,2)}");
    if (static_cast<int>(tree.levels.size()) != tree.M + 1) bad.push_back("level count differs from M + 1");
    if (static_cast<int>(tree.rho.size()) != tree.M + 1) bad.push_back("rho has the wrong length");
    for (int k = 0; k < static_cast<int>(tree.rho.size()) && tree.M > 0; ++k)
        if (tree.rho[k] != Rational(100) * (1 - Rational(k, tree.M))) bad.push_back("rho_" + std::to_string(k));
    for (std::size_t j = 0; j < tree.levels.size(); ++j)
        for (const auto& t : tree.levels[j]) {
            const auto it = tree.data.find(t);
            if (it == tree.data.end()) {
                bad.push_back("missing data for " + to_string(t));
                continue;
            }
            const auto& d = it->second;
            const std::string where = "T_" + std::to_string(j) + " " + to_string(t) + ": ";
            if (!t.r1.is_proper() || !t.r2.is_proper() || !t.r3.is_proper()) bad.push_back(where + "improper slope");
            if (t.r1 == t.r2 || t.r2 == t.r3 || t.r1 == t.r3) bad.push_back(where + "repeated slope");
            if (d.r4s() != detail::image(d.map, tree.R0)) bad.push_back(where + "R_{r1,r2,r3} is not L(R0)");
            for (const auto& b : d.branches) {
                const auto v = detail::branch_violation(t, b);
                if (!v.empty()) bad.push_back(where + "r4 = " + to_string(b.r4) + ": " + v);
                if (b.slopes != detail::image(b.map, tree.R0))
                    bad.push_back(where + "R_{r1,r2,r3,r4} is not L'(R0)");
                const auto [lambda, kappa] = detail::mu_coefficients(t.r1, t.r3, b.r4, p);
                if (!(lambda == b.lambda) || !(kappa == b.nu.s)) bad.push_back(where + "mu coefficients disagree");
            }
        }
    for (std::size_t j = 0; j + 1 < tree.levels.size(); ++j) {
        std::set<SlopeTriple> expect;
        for (const auto& t : tree.levels[j])
            if (tree.data.count(t))
                for (const auto& c : tree.data.at(t).children()) expect.insert(c);
        if (std::vector<SlopeTriple>(expect.begin(), expect.end()) != tree.levels[j + 1])
            bad.push_back("T_" + std::to_string(j + 1) + " is not the union of T(T_" + std::to_string(j) + ")");
    }
    return bad;
}

}  // namespace kakeya
