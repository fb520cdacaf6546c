#pragma once

// The advanced segment argument on a slope tree: tilde-segment families,
// the k-uniform / k-chunky dichotomy with rho_k = 100 (1 - k/M), the descent
// through the tree levels, and the corner chain C, C', C'' and G''.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kakeya/certificate.hpp"
#include "kakeya/config.hpp"
#include "kakeya/exponents.hpp"
#include "kakeya/sd/pipelines.hpp"
#include "kakeya/sd/slope_tree.hpp"

namespace kakeya {

/// Outcome of the k-uniformity test on a triple (r1, r2, r3).
struct UniformityResult {
    bool uniform = false;
    std::int64_t total = 0;        // #tildeV^{(r1)}
    std::int64_t small_count = 0;  // segments whose pi_{r2 (x) r3}-fiber is below the threshold
    std::int64_t image = 0;        // #pi_{r2 (x) r3}(tildeV^{(r1)})
    /// the non-small segments; a chunky witness when !uniform
    std::vector<Segment> witness;
    std::int64_t witness_image = 0;
};

namespace detail {

inline auto segment_double_projection(const Config& G, const Slope& a, const Slope& b) {
    return pair_projection(G, a, b);
}

/// fiber < (#V / N^2) N^{rho_k}, raised to the M-th power:
/// (fiber N^2)^M < #V^M N^{100 (M - k)}
inline bool below_uniform_threshold(std::int64_t fiber, std::int64_t total, int k, int M, std::int64_t N) {
    const std::vector<PowerTerm> lhs{{BigRational(fiber), Rational(M)}, {BigRational(N), Rational(2 * M)}};
    const std::vector<PowerTerm> rhs{{BigRational(total), Rational(M)}, {BigRational(N), Rational(100 * (M - k))}};
    return compare_products(lhs, rhs) < 0;
}

}  // namespace detail

/// Classifies (r1, r2, r3) at level k: uniform iff the small segments number at
/// least N^{-1/M - k/M^2} #tildeV, i.e. small^{M^2} N^{M + k} >= #tildeV^{M^2}.
inline UniformityResult classify_uniformity(const Config& G, const std::vector<Segment>& tilde_v,
                                            const SlopeTriple& t, int k, int M, std::uint64_t N) {
    if (M < 1) throw InvalidInput("uniformity needs depth M >= 1");
    if (k < 0 || k > M) throw InvalidInput("level k must lie in [0, M]");
    if (N < 1) throw InvalidInput("N must be positive");
    UniformityResult out;
    out.total = detail::i64(tilde_v.size());
    const auto f = detail::segment_double_projection(G, t.r2, t.r3);
    const auto part = partition(tilde_v, f);
    out.image = detail::i64(part.image_size());
    std::set<detail::SegKey> witness_keys;
    for (const auto& [key, fib] : part.fibers) {
        if (detail::below_uniform_threshold(detail::i64(fib.size()), out.total, k, M, static_cast<std::int64_t>(N))) {
            out.small_count += detail::i64(fib.size());
        } else {
            witness_keys.insert(key);
            for (auto i : fib) out.witness.push_back(tilde_v[i]);
        }
    }
    std::sort(out.witness.begin(), out.witness.end());
    out.witness_image = detail::i64(witness_keys.size());
    if (out.total == 0) {
        out.uniform = true;
        return out;
    }
    const std::int64_t m2 = static_cast<std::int64_t>(M) * M;
    const std::vector<PowerTerm> lhs{{BigRational(out.small_count), Rational(m2)},
                                     {BigRational(static_cast<std::int64_t>(N)), Rational(M + k)}};
    const std::vector<PowerTerm> rhs{{BigRational(out.total), Rational(m2)}};
    out.uniform = compare_products(lhs, rhs) >= 0;
    return out;
}

/// G' and the tilde-segment families tildeV^{(r)} = {(g, g') : g in G', g' in X_{g,r}},
/// with X_{g,r} the first min(#fiber, ceil(#G / 2N)) points of [g]_{pi_r}.
class TildeSegments {
public:
    TildeSegments(const Config& G, std::vector<std::uint32_t> refined, std::uint64_t N)
        : G_(&G), refined_(std::move(refined)) {
        const std::uint64_t n = G.size();
        x_size_ = (n + 2 * N - 1) / (2 * N);
    }

    std::uint64_t x_size() const noexcept { return x_size_; }
    const std::vector<std::uint32_t>& refined() const noexcept { return refined_; }

    const std::vector<Segment>& of(const Slope& r) {
        auto it = cache_.find(r);
        if (it != cache_.end()) return it->second;
        const auto& pts = G_->points();
        const auto part = partition(pts, [&](const Point& g) { return project(G_->space(), r, g); });
        std::vector<Segment> out;
        for (auto gi : refined_) {
            const auto& fib = part.fiber_of(project(G_->space(), r, pts[gi]));
            const std::size_t take = std::min<std::size_t>(fib.size(), x_size_);
            for (std::size_t j = 0; j < take; ++j) out.push_back({gi, static_cast<std::uint32_t>(fib[j])});
        }
        std::sort(out.begin(), out.end());
        return cache_.emplace(r, std::move(out)).first->second;
    }

private:
    const Config* G_;
    std::vector<std::uint32_t> refined_;
    std::uint64_t x_size_ = 1;
    std::map<Slope, std::vector<Segment>> cache_;
};

/// Replays the advanced argument on G with every step decided on exact counts.
inline Certificate pipeline_advanced(const Config& G, const SlopeTree& tree, const Rational& inner_alpha,
                                     const Rational& inner_C) {
    detail::require_nonempty(G);
    if (G.space().p() != tree.p) throw ModulusMismatch(tree.p, G.space().p());
    if (tree.M < 1) throw InvalidInput("the descent needs depth M >= 1");
    if (inner_alpha <= Rational(1) || inner_alpha > Rational(2)) throw InvalidInput("inner exponent must lie in (1, 2]");
    if (!(inner_C > Rational(0))) throw InvalidInput("inner constant must be positive");
    const auto& z = G.space();
    const int M = tree.M;
    Certificate cert("advanced");
    const auto R = tree.all_slopes();
    const std::int64_t g = detail::i64(G.size());
    std::int64_t N = 0;
    for (const auto& r : R) N = std::max<std::int64_t>(N, detail::i64(G.projection_count(r)));
    const Rational target = exponents::advanced_map(inner_alpha);
    cert.set_result("target_exponent", to_string(target));
    cert.set_result("N", std::to_string(N));
    cert.set_result("G", std::to_string(g));
    cert.set_result("slopes", std::to_string(R.size()));
    cert.check("N", "#G <= N^2", {{"G", g}, {"N", N}}, Monomial::count("G"), Relation::le, Monomial::count("N", 2));
    if (N <= 1) {
        cert.note("N = 1 forces #G = 1; the descent is vacuous");
        cert.set_result("realized_exponent", "undefined");
        return cert;
    }
    const BigRational cin(BigInt(inner_C.numerator()), BigInt(inner_C.denominator()));

    // G' = G^{<r_1>, ..., <r_k>} over every slope of the tree
    std::vector<std::uint32_t> idx(G.size());
    for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (const auto& r : R) {
        auto next = popular_refine(idx, [&](std::uint32_t i) { return project(z, r, G[i]); },
                                   static_cast<std::uint64_t>(N));
        idx = std::move(next);
    }
    const std::int64_t gp = detail::i64(idx.size());
    cert.check("G'", "#G' >= 2^{-#R} #G", {{"G'", gp}, {"G", g}},
               Monomial::constant(big_pow(BigRational(2), detail::i64(R.size()))).times("G'"), Relation::ge,
               Monomial::count("G"));
    TildeSegments tv(G, idx, static_cast<std::uint64_t>(N));
    cert.set_result("X_size", std::to_string(tv.x_size()));

    // descent from level M - 1 to the first level with a uniform triple
    int k_found = -1;
    SlopeTriple chosen{};
    UniformityResult chosen_u;
    for (int k = M - 1; k >= 0 && k_found < 0; --k) {
        std::int64_t uniform_here = 0;
        for (const auto& t : tree.levels[k]) {
            const auto u = classify_uniformity(G, tv.of(t.r1), t, k, M, static_cast<std::uint64_t>(N));
            if (u.uniform) {
                ++uniform_here;
                if (k_found < 0) {
                    k_found = k;
                    chosen = t;
                    chosen_u = u;
                }
            }
        }
        cert.record("descent-" + std::to_string(k), "uniform triples on level " + std::to_string(k),
                    {{"uniform", uniform_here}, {"triples", detail::i64(tree.levels[k].size())}});
    }
    if (k_found < 0) throw PigeonholeEmpty("descent", "no level has a uniform triple");
    const int k = k_found;
    const Rational rho = tree.rho[k];
    const std::int64_t m2 = static_cast<std::int64_t>(M) * M;
    cert.set_result("k", std::to_string(k));
    cert.set_result("triple", to_string(chosen));
    cert.set_result("rho_k", to_string(rho));
    {
        const Counts c{{"small", chosen_u.small_count}, {"V1", chosen_u.total}, {"N", N}};
        cert.check("k-uniform", "#small^{M^2} N^{M+k} >= #tildeV1^{M^2}", c, Monomial::count("small", m2).times("N", M + k),
                   Relation::ge, Monomial::count("V1", m2));
    }
    const auto& V1 = tv.of(chosen.r1);
    const auto& V2 = tv.of(chosen.r2);
    const std::int64_t v1n = detail::i64(V1.size()), v2n = detail::i64(V2.size());
    cert.record("tvr-card", "#tildeV^{(r1)} ~ #G^2 / N", {{"V", v1n}, {"G", g}, {"N", N}},
                Monomial::count("V").times("N"), Monomial::count("G", 2));
    cert.record("tvr-card-2", "#tildeV^{(r2)} ~ #G^2 / N", {{"V", v2n}, {"G", g}, {"N", N}},
                Monomial::count("V").times("N"), Monomial::count("G", 2));

    // chunky witnesses for every child (r2, r, r') of the chosen triple
    const auto& data = tree.at(chosen);
    const auto children = data.children();
    std::set<Segment> vprime(V2.begin(), V2.end());
    std::vector<std::int64_t> witness_images;
    const Rational rho_next = tree.rho[k + 1];
    for (std::size_t i = 0; i < children.size(); ++i) {
        const auto& ch = children[i];
        std::vector<Segment> w;
        std::int64_t image = 0;
        if (k + 1 == M) {
            w = V2;
            image = detail::i64(partition(V2, detail::segment_double_projection(G, ch.r2, ch.r3)).image_size());
        } else {
            const auto u = classify_uniformity(G, V2, ch, k + 1, M, static_cast<std::uint64_t>(N));
            w = u.witness;
            image = u.witness_image;
            const Counts c{{"small", u.small_count}, {"V2", v2n}, {"N", N}};
            cert.check("chunky-" + std::to_string(i + 1), "child " + to_string(ch) + " is not (k+1)-uniform", c,
                       Monomial::count("small", m2).times("N", M + k + 1), Relation::lt, Monomial::count("V2", m2));
        }
        witness_images.push_back(std::max<std::int64_t>(image, 1));
        cert.check("v-smallproj-" + std::to_string(i + 1), "#pi_{r (x) r'}(witness) <= N^{2 - rho_{k+1}}",
                   {{"image", image}, {"N", N}}, Monomial::count("image"), Relation::le,
                   Monomial::count("N", Rational(2) - rho_next));
        std::set<Segment> ws(w.begin(), w.end());
        for (auto it = vprime.begin(); it != vprime.end();) it = ws.count(*it) ? std::next(it) : vprime.erase(it);
    }
    std::vector<Segment> V(vprime.begin(), vprime.end());
    cert.record("jump", "#(tildeV^{(r2)} \\ V')", {{"removed", v2n - detail::i64(V.size())}, {"V2", v2n}},
                Monomial::count("removed"), Monomial::count("V2"));

    // V'' by strong popularity along each child projection
    for (std::size_t i = 0; i < children.size(); ++i) {
        const auto f = detail::segment_double_projection(G, children[i].r2, children[i].r3);
        auto next = strong_refine(V, f, static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(M),
                                  static_cast<std::uint64_t>(witness_images[i]));
        const std::int64_t removed = detail::i64(V.size() - next.size());
        cert.check("strong-" + std::to_string(i + 1), "#(X \\ X^{<<f>>})^M N^{100} <= #X^M",
                   {{"removed", removed}, {"X", detail::i64(V.size())}, {"N", N}},
                   Monomial::count("removed", M).times("N", 100), Relation::le, Monomial::count("X", M));
        V = std::move(next);
    }
    const std::int64_t vpp = detail::i64(V.size());

    // V''' drops v whose nu-fiber in V'' shrank below half of its tildeV^{(r2)} fiber
    std::set<Segment> vppp(V.begin(), V.end());
    for (std::size_t bi = 0; bi < data.branches.size(); ++bi) {
        const auto& br = data.branches[bi];
        auto nu_of = [&](const Segment& s) { return eval_nu(G, br.nu, s); };
        for (std::size_t j = 0; j < br.slopes.size(); ++j) {
            const auto pj = detail::pair_projection(G, br.slopes[j], br.duals[j]);
            cert.check("nu-determined-" + std::to_string(bi + 1) + "." + std::to_string(j + 1),
                       "nu_{r4} is determined by pi_{r (x) r'} on tildeV^{(r2)}",
                       {{"conflicts", detail::determination_conflicts(V2, nu_of, pj)}}, Monomial::count("conflicts"),
                       Relation::eq, Monomial::constant(0));
        }
        std::map<ZElem, std::int64_t> full, kept;
        for (const auto& s : V2) ++full[nu_of(s)];
        for (const auto& s : V) ++kept[nu_of(s)];
        for (auto it = vppp.begin(); it != vppp.end();) {
            const auto key = nu_of(*it);
            it = 2 * kept[key] < full[key] ? vppp.erase(it) : std::next(it);
        }
    }
    const std::vector<Segment> V3(vppp.begin(), vppp.end());
    cert.record("jump-3", "#(tildeV^{(r2)} \\ V''')", {{"removed", v2n - detail::i64(V3.size())}, {"V2", v2n}},
                Monomial::count("removed"), Monomial::count("V2"));
    cert.set_result("V''", std::to_string(vpp));
    cert.set_result("V'''", std::to_string(V3.size()));
    if (V3.empty()) throw PigeonholeEmpty("V'''", "every segment was removed");

    // inner bound on the largest nu-class of V''' for each r4
    for (std::size_t bi = 0; bi < data.branches.size(); ++bi) {
        const auto& br = data.branches[bi];
        const auto part = partition(V3, [&](const Segment& s) { return eval_nu(G, br.nu, s); });
        const std::vector<std::size_t>* best = nullptr;
        for (const auto& [key, fib] : part.fibers)
            if (!best || fib.size() > best->size()) best = &fib;
        std::vector<Point> pts;
        for (auto i : *best) pts.push_back(G[V3[i].first]);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        const Config sub(z, pts);
        std::int64_t mp = 0;
        for (const auto& r : br.slopes) mp = std::max<std::int64_t>(mp, detail::i64(sub.projection_count(r)));
        cert.check("vppp-inner-" + std::to_string(bi + 1), "#G' <= C_in max_{r in R_{r1,r2,r3,r4}} #pi_r(G')^beta",
                   {{"G'", detail::i64(sub.size())}, {"maxproj", mp}}, Monomial::count("G'"), Relation::le,
                   Monomial::constant(cin).times("maxproj", inner_alpha), "inner exponent may be hypothetical");
        cert.record("vppp-nu-" + std::to_string(bi + 1), "#nu(V''')",
                    {{"image", detail::i64(part.image_size())}, {"V'''", detail::i64(V3.size())}});
    }

    // corners and C'
    std::map<std::uint32_t, std::vector<std::uint32_t>> v1_by_first;
    for (const auto& s : V1) v1_by_first[s.first].push_back(s.second);
    const auto f23 = detail::segment_double_projection(G, chosen.r2, chosen.r3);
    const auto p23 = partition(V1, f23);
    std::vector<Corner> C, Cp;
    for (const auto& s : V2) {
        const auto it = v1_by_first.find(s.first);
        if (it == v1_by_first.end()) continue;
        const bool in_v3 = vppp.count(s) > 0;
        for (auto g1 : it->second) {
            const Corner c{g1, s.first, s.second};
            C.push_back(c);
            if (!in_v3) continue;
            const Segment s21{s.first, g1};
            const auto fib = detail::i64(p23.fiber_of(f23(s21)).size());
            if (detail::below_uniform_threshold(fib, v1n, k, M, N)) Cp.push_back(c);
        }
    }
    std::sort(C.begin(), C.end());
    std::sort(Cp.begin(), Cp.end());
    const std::int64_t cn = detail::i64(C.size()), cpn = detail::i64(Cp.size());
    cert.record("cp-bound", "#C' against #G^3 / N^2", {{"C'", cpn}, {"C", cn}, {"G", g}, {"N", N}},
                Monomial::count("C'").times("N", 2), Monomial::count("G", 3));
    if (Cp.empty()) throw PigeonholeEmpty("C'", "no corner survives");

    auto mu_of = [&](const Corner& c) { return eval_mu(G, chosen.r3, c); };
    {
        // pi_{r2 (x) r3} o gamma_{2,1} is determined by mu and pi_{r3} o gamma_1
        auto key = [&](const Corner& c) { return std::pair{mu_of(c), project(z, chosen.r3, G[c.g1])}; };
        auto val = [&](const Corner& c) { return f23(Segment{c.g2, c.g1}); };
        cert.check("mu-determines", "pi_{r2 (x) r3} o gamma_{2,1} is determined by mu and pi_{r3} o gamma_1",
                   {{"conflicts", detail::determination_conflicts(C, val, key)}}, Monomial::count("conflicts"),
                   Relation::eq, Monomial::constant(0));
    }

    // C'' by popularity along f_{r4} = (pi_{r4} o gamma_1, nu o gamma_{2,3})
    std::vector<Corner> Cpp = Cp;
    std::vector<std::function<std::pair<ZElem, ZElem>(const Corner&)>> fs;
    for (std::size_t bi = 0; bi < data.branches.size(); ++bi) {
        const auto& br = data.branches[bi];
        fs.push_back([&G, &z, br](const Corner& c) {
            return std::pair{project(z, br.r4, G[c.g1]), eval_nu(z, br.nu, G[c.g2], G[c.g3])};
        });
        std::int64_t mismatches = 0;
        for (const auto& c : C) {
            const ZElem rhs = z.add(z.scale(br.lambda, project(z, br.r4, G[c.g1])), eval_nu(z, br.nu, G[c.g2], G[c.g3]));
            if (!(rhs == mu_of(c))) ++mismatches;
        }
        cert.check("mu-identity-" + std::to_string(bi + 1), "mu = lambda pi_{r4} o gamma_1 + nu o gamma_{2,3} on C",
                   {{"mismatches", mismatches}}, Monomial::count("mismatches"), Relation::eq, Monomial::constant(0));
    }
    for (std::size_t bi = 0; bi < fs.size(); ++bi) {
        std::set<std::pair<ZElem, ZElem>> image;
        for (const auto& c : Cp) image.insert(fs[bi](c));
        auto next = popular_refine(Cpp, fs[bi], image.size());
        cert.check("C''-" + std::to_string(bi + 1), "each popularity pass keeps at least half",
                   {{"after", detail::i64(next.size())}, {"before", detail::i64(Cpp.size())}},
                   Monomial::constant(2).times("after"), Relation::ge, Monomial::count("before"));
        Cpp = std::move(next);
    }
    const std::int64_t cppn = detail::i64(Cpp.size());
    const BigRational two_s = big_pow(BigRational(2), detail::i64(fs.size()));
    cert.check("C''", "2^s #C'' >= #C'", {{"C''", cppn}, {"C'", cpn}}, Monomial::constant(two_s).times("C''"),
               Relation::ge, Monomial::count("C'"));

    // the mu-class: largest C'-class keeping a 2^{-s} share in C'', least value on ties
    std::map<ZElem, std::int64_t> in_cp, in_cpp;
    for (const auto& c : Cp) ++in_cp[mu_of(c)];
    for (const auto& c : Cpp) ++in_cpp[mu_of(c)];
    bool found = false;
    ZElem mu0{};
    std::int64_t best = -1;
    for (const auto& [val, n] : in_cp) {
        const std::int64_t kept = in_cpp.count(val) ? in_cpp.at(val) : 0;
        if (kept == 0 || two_s * kept < n) continue;
        if (n > best) {
            best = n;
            mu0 = val;
            found = true;
        }
    }
    if (!found) throw PigeonholeEmpty("mu-class", "no class keeps a 2^-s share");
    std::vector<Corner> cls;
    for (const auto& c : Cpp)
        if (mu_of(c) == mu0) cls.push_back(c);
    std::vector<Point> gpp_pts;
    for (const auto& c : cls) gpp_pts.push_back(G[c.g1]);
    std::sort(gpp_pts.begin(), gpp_pts.end());
    gpp_pts.erase(std::unique(gpp_pts.begin(), gpp_pts.end()), gpp_pts.end());
    const Config Gpp(z, gpp_pts);
    const std::int64_t gpp = detail::i64(Gpp.size());
    cert.set_result("mu0", std::to_string(mu0.code));
    cert.set_result("G''", std::to_string(gpp));
    cert.check("mu-class", "2^s #[c]^{C''}_mu >= #[c]^{C'}_mu", {{"class", detail::i64(cls.size())}, {"C'class", best}},
               Monomial::constant(two_s).times("class"), Relation::ge, Monomial::count("C'class"));
    cert.check("flip-card", "#[c]^{C''}_mu = #G''", {{"class", detail::i64(cls.size())}, {"G''", gpp}},
               Monomial::count("class"), Relation::eq, Monomial::count("G''"));
    for (std::size_t bi = 0; bi < data.branches.size(); ++bi) {
        const auto& br = data.branches[bi];
        std::set<std::pair<ZElem, ZElem>> fimg;
        for (const auto& c : cls) fimg.insert(fs[bi](c));
        const std::int64_t proj = detail::i64(Gpp.projection_count(br.r4));
        cert.check("flip-" + std::to_string(bi + 1), "#f_{r4}([c]_mu) = #pi_{r4}(G'')",
                   {{"f", detail::i64(fimg.size())}, {"proj", proj}}, Monomial::count("f"), Relation::eq,
                   Monomial::count("proj"));
        std::int64_t mp = 0;
        for (const auto& r : br.slopes) mp = std::max<std::int64_t>(mp, detail::i64(Gpp.projection_count(r)));
        cert.check("inner-" + std::to_string(bi + 1), "#G'' <= C_in max_{r in R_{r1,r2,r3,r4}} #pi_r(G'')^beta",
                   {{"G''", gpp}, {"maxproj", mp}}, Monomial::count("G''"), Relation::le,
                   Monomial::constant(cin).times("maxproj", inner_alpha), "inner exponent may be hypothetical");
    }
    cert.check("upper", "#G'' <= N #tildeV^{(r1)} N^{rho_k - 2}", {{"G''", gpp}, {"V1", v1n}, {"N", N}},
               Monomial::count("G''"), Relation::le, Monomial::count("V1").times("N", rho - Rational(1)));
    cert.record("g-task", "#G against N^{target exponent}", {{"G", g}, {"N", N}}, Monomial::count("G"),
                Monomial::count("N", target));
    cert.note("exact counts replace the N^{C/M} slack; descent stopped at level " + std::to_string(k));
    cert.set_result("realized_exponent", detail::realized_exponent(G.size(), static_cast<std::size_t>(N)));
    return cert;
}

}  // namespace kakeya
