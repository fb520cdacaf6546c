#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "kakeya/sd/instance.hpp"
#include "kakeya/sd/pipelines.hpp"
#include "kakeya/sd/search.hpp"
#include "support.hpp"

using namespace kakeya;
using kakeya::testing::random_config;

namespace {

Point pt(const Space& z, std::int64_t a, std::int64_t b) { return {z.make(a), z.make(b)}; }

Config row(std::uint64_t p) {
    const Space z(p);
    std::vector<Point> pts;
    for (std::uint64_t a = 0; a < p; ++a) pts.push_back(pt(z, static_cast<std::int64_t>(a), 0));
    return Config(z, pts);
}

std::vector<Slope> slopes(std::uint64_t p, std::initializer_list<std::int64_t> finite, bool with_inf) {
    std::vector<Slope> out;
    for (auto r : finite) out.push_back(slope_of(r, p));
    if (with_inf) out.push_back(slope_inf());
    return out;
}

// Independent oracle: every choice of (none | b) per pi_{-1}-fiber.
std::size_t brute_max(std::uint64_t p, const std::vector<Slope>& R, std::uint64_t N) {
    const Space z(p);
    std::vector<std::uint64_t> digit(p, 0);  // 0 = empty, b + 1 otherwise
    std::size_t best = 0;
    while (true) {
        std::vector<Point> pts;
        for (std::uint64_t c = 0; c < p; ++c)
            if (digit[c]) {
                const std::uint64_t b = digit[c] - 1;
                pts.push_back({ZElem{(b + c) % p}, ZElem{b}});
            }
        if (pts.size() > best) {
            const Config g(z, pts);
            bool ok = true;
            for (const auto& r : R) ok = ok && g.projection_count(r) <= N;
            if (ok) best = pts.size();
        }
        std::uint64_t i = 0;
        while (i < p && ++digit[i] == p + 1) digit[i++] = 0;
        if (i == p) break;
    }
    return best;
}

bool within_caps(const Config& g, const std::vector<Slope>& R, std::uint64_t N) {
    for (const auto& r : R)
        if (g.projection_count(r) > N) return false;
    return true;
}

NuParams random_nu(std::uint64_t p, std::mt19937_64& rng) {
    return {slope_of(0, p), slope_inf(), FieldElem(static_cast<std::int64_t>(1 + rng() % (p - 2)), p)};
}

// k random slopes that pass the generic-slope check for nu.
std::vector<Slope> generic_slopes(const NuParams& nu, std::size_t k, std::mt19937_64& rng) {
    const std::uint64_t p = nu.s.modulus();
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<Slope> rs;
        for (std::size_t j = 0; j < k; ++j) rs.push_back(slope_of(static_cast<std::int64_t>(rng() % p), p));
        if (check_generic_slopes(nu, rs).ok) return rs;
    }
    ADD_FAILURE() << "no generic slopes for p=" << p;
    return {};
}

}  // namespace

TEST(EmpiricalExponent, Examples) {
    EXPECT_DOUBLE_EQ(empirical_exponent({row(5), slopes(5, {0}, true), {}}), 1.0);
    const Space z(5);
    EXPECT_THROW(empirical_exponent({Config(z, {pt(z, 1, 1)}), slopes(5, {0}, true), {}}), DegenerateInstance);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        const Config g = random_config(11, 2 + rng() % 10, rng);
        if (g.max_projection(slopes(11, {0}, true)) < 2) continue;
        EXPECT_LE(empirical_exponent({g, slopes(11, {0}, true), {}}), 2.0 + 1e-12);
    }
}

TEST(VerifySd, Examples) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
        const Config g = random_config(13, 1 + rng() % 13, rng);
        EXPECT_TRUE(verify_sd({g, slopes(13, {0, 3}, false), {}}, 2.0, 1.0));
    }
    EXPECT_FALSE(verify_sd({row(5), {slope_inf()}, {}}, 1.0, 1.0));
    const Space z(5);
    EXPECT_TRUE(verify_sd({Config(z, {pt(z, 2, 2)}), slopes(5, {0}, true), {}}, 0.0, 1.0));
}

TEST(SdInstance, ValidateRejectsCapAndImproperSlopes) {
    SdInstance inst{row(5), slopes(5, {0}, true), 4};
    EXPECT_THROW(inst.validate(), InvalidInput);
    inst.cap = 5;
    EXPECT_NO_THROW(inst.validate());
    inst.R.push_back(slope_of(4, 5));
    EXPECT_THROW(inst.validate(), InvalidInput);
}

TEST(ExtremalSearch, Examples) {
    EXPECT_EQ(extremal_search(5, slopes(5, {0}, true), 1).max_size, 1u);
    const auto full = extremal_search(5, slopes(5, {0}, true), 5);
    EXPECT_EQ(full.max_size, 5u);
    EXPECT_TRUE(full.exhaustive);
    const auto r = extremal_search(5, slopes(5, {0, 1, 2}, true), 2);
    EXPECT_GE(r.max_size, 2u);
    EXPECT_LE(r.max_size, 4u);
    EXPECT_THROW(extremal_search(5, slopes(5, {4}, false), 2), InvalidInput);
    EXPECT_THROW(extremal_search(5, slopes(5, {0}, false), 0), InvalidInput);
}

TEST(ExtremalSearch, MatchesBruteForceOracle) {
    for (std::uint64_t N = 1; N <= 4; ++N)
        for (const auto& R : {slopes(5, {0}, true), slopes(5, {0, 1, 2}, true), slopes(5, {1, 3}, false)}) {
            const auto oracle = brute_max(5, R, N);
            for (auto mode : {SearchMode::exhaustive, SearchMode::branch_and_bound}) {
                const auto res = extremal_search(5, R, N, mode);
                EXPECT_EQ(res.max_size, oracle) << "N=" << N << " mode=" << to_string(mode);
                EXPECT_EQ(res.witness.size(), res.max_size);
                EXPECT_TRUE(within_caps(res.witness, R, N));
            }
        }
}

TEST(ExtremalSearch, BoundsForZeroOneTwoInfinity) {
    const auto start = std::chrono::steady_clock::now();
    const auto R = slopes(5, {0, 1, 2}, true);
    for (std::uint64_t N = 1; N <= 4; ++N) {
        const auto res = extremal_search(5, R, N);
        EXPECT_TRUE(res.exhaustive);
        EXPECT_GE(res.max_size, N);
        EXPECT_LE(static_cast<double>(res.max_size), 4.0 * std::pow(static_cast<double>(N), 1.75));
    }
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 60.0);
}

TEST(ExtremalSearch, MoebiusInvariance) {
    std::mt19937_64 rng(17);
    const std::uint64_t p = 5;
    const auto maps = all_moebius_fixing_minus_one(p);
    const auto R = slopes(p, {0, 1, 2}, true);
    for (int t = 0; t < 20; ++t) {
        const auto& L = maps[rng() % maps.size()];
        std::vector<Slope> image;
        for (const auto& r : R) image.push_back(L.apply(r));
        for (std::uint64_t N = 1; N <= 4; ++N)
            EXPECT_EQ(extremal_search(p, image, N).max_size, extremal_search(p, R, N).max_size);
    }
}

TEST(ExtremalSearch, MonotoneAndCapped) {
    for (std::uint64_t p : {5u, 7u}) {
        const auto R = slopes(p, {0, 1}, true);
        std::size_t prev = 0;
        for (std::uint64_t N = 1; N <= p; ++N) {
            const auto res = extremal_search(p, R, N);
            EXPECT_GE(res.max_size, prev);
            EXPECT_LE(res.max_size, std::min<std::uint64_t>(p, N * N));
            prev = res.max_size;
        }
    }
}

TEST(ExtremalSearch, ThreadCountDoesNotChangeResult) {
    const auto R = slopes(7, {0, 1, 2}, true);
    for (auto mode : {SearchMode::exhaustive, SearchMode::branch_and_bound}) {
        const auto one = extremal_search(7, R, 3, mode, 0, 10'000'000, 1);
        const auto four = extremal_search(7, R, 3, mode, 0, 10'000'000, 4);
        EXPECT_EQ(one.max_size, four.max_size);
        EXPECT_EQ(one.witness.points(), four.witness.points());
        EXPECT_EQ(one.nodes_explored, four.nodes_explored);
    }
}

TEST(ExtremalSearch, BudgetExhaustionIsReported) {
    const auto res = extremal_search(11, slopes(11, {0, 1, 2}, true), 5, SearchMode::exhaustive, 0, 100);
    EXPECT_FALSE(res.exhaustive);
    EXPECT_TRUE(within_caps(res.witness, slopes(11, {0, 1, 2}, true), 5));
}

TEST(Pipeline012Inf, Examples) {
    const auto cert = pipeline_012inf(row(5));
    EXPECT_TRUE(cert.valid()) << cert.failing_step();
    const auto* seg = cert.find("segment-bound");
    ASSERT_NE(seg, nullptr);
    EXPECT_EQ(seg->counts.at("V"), 5);
    EXPECT_EQ(cert.results().at("target_exponent"), "7/4");

    const Space z(7);
    const auto single = pipeline_012inf(Config(z, {pt(z, 3, 2)}));
    EXPECT_TRUE(single.valid());
    for (const auto& s : single.steps())
        for (const auto& [name, v] : s.counts)
            if (name != "conflicts" && name != "collisions") {
                EXPECT_LE(v, 1) << s.id << "." << name;
            }

    EXPECT_THROW(pipeline_012inf(Config(Space(3), {})), InvalidInput);
    EXPECT_THROW(pipeline_012inf(Config(z, {})), DegenerateInstance);
}

TEST(Pipeline012Inf, RandomInstancesStayBelowSafeConstant) {
    std::mt19937_64 rng(31);
    const std::vector<std::uint64_t> primes{5, 7, 11, 13, 17, 19, 23, 29, 31};
    for (int t = 0; t < 200; ++t) {
        const std::uint64_t p = primes[rng() % primes.size()];
        const Config g = (t % 2) ? random_config(p, 1 + rng() % p, rng)
                                 : kakeya::testing::random_structured_config(p, 1 + rng() % 4, rng);
        const auto cert = pipeline_012inf(g);
        ASSERT_TRUE(cert.valid()) << "p=" << p << " failing " << cert.failing_step();
        EXPECT_EQ(cert.replay(), Verdict::valid);
        ASSERT_NE(cert.find("fiber-lower"), nullptr);
        ASSERT_NE(cert.find("fiber-upper"), nullptr);
        // #G <= 2 N^{7/4}  <=>  #G^4 <= 16 N^7
        std::uint64_t N = 0;
        for (const auto& r : slopes(p, {0, 1, 2}, true)) N = std::max<std::uint64_t>(N, g.projection_count(r));
        const auto G = static_cast<long double>(g.size());
        EXPECT_LE(G * G * G * G, 16.0L * std::pow(static_cast<long double>(N), 7));
    }
}

TEST(Pipeline012Inf, NotesTheSegmentExponent) {
    const auto cert = pipeline_012inf(row(7));
    bool found = false;
    for (const auto& n : cert.notes()) found = found || n.find("5/2") != std::string::npos;
    EXPECT_TRUE(found);
}

TEST(PipelineConviviality, Examples) {
    const NuParams nu{slope_of(0, 11), slope_inf(), FieldElem(3, 11)};
    std::mt19937_64 rng(4);
    for (int t = 0; t < 30; ++t) {
        const auto cert = pipeline_conviviality(random_config(11, 1 + rng() % 11, rng), nu, slope_of(1, 11),
                                                slope_of(4, 11));
        EXPECT_TRUE(cert.valid()) << cert.failing_step();
    }
    EXPECT_EQ(pipeline_conviviality(row(11), nu, slope_of(1, 11), slope_of(4, 11)).results().at("slopes"),
              "0,1,6,4,7,inf");
    const NuParams self_dual{slope_of(0, 11), slope_inf(), FieldElem(2, 11)};
    EXPECT_THROW(pipeline_conviviality(row(11), self_dual, slope_of(1, 11), slope_of(4, 11)), ExceptionalSlope);
    const Space z(11);
    EXPECT_TRUE(pipeline_conviviality(Config(z, {pt(z, 1, 1)}), nu, slope_of(1, 11), slope_of(4, 11)).valid());
}

TEST(PipelineConviviality, GeneralBaseSlopes) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 60; ++t) {
        const std::uint64_t p = 13;
        const auto u = [&] { return static_cast<std::int64_t>(rng() % (p - 1)); };
        const NuParams nu{slope_of(u(), p), rng() % 2 ? slope_inf() : slope_of(u(), p),
                          FieldElem(1 + static_cast<std::int64_t>(rng() % (p - 1)), p)};
        if (nu.r0 == nu.r_inf) continue;
        std::vector<Slope> rs;
        for (int a = 0; a < 200 && rs.empty(); ++a) {
            std::vector<Slope> cand{slope_of(u(), p), slope_of(u(), p)};
            if (check_generic_slopes(nu, cand).ok) rs = cand;
        }
        if (rs.empty()) continue;
        const auto cert = pipeline_conviviality(random_config(p, 1 + rng() % p, rng), nu, rs[0], rs[1]);
        EXPECT_TRUE(cert.valid()) << cert.failing_step();
    }
}

TEST(Substructure, Singleton) {
    const Space z(7);
    const NuParams nu{slope_of(0, 7), slope_inf(), FieldElem(2, 7)};
    const Config g(z, {pt(z, 4, 5)});
    const auto out = substructure(g, nu, {slope_of(3, 7)});
    EXPECT_EQ(out.sub.points(), g.points());
    EXPECT_EQ(out.N, 1);
    EXPECT_EQ(out.fiber, 1);
    EXPECT_DOUBLE_EQ(out.realized_constant, 1.0);
    EXPECT_TRUE(out.cert.valid());
}

TEST(Substructure, SmallExampleByEnumeration) {
    const Space z(7);
    const NuParams nu{slope_of(0, 7), slope_inf(), FieldElem(2, 7)};
    const Config g(z, {pt(z, 0, 0), pt(z, 0, 1), pt(z, 1, 0)});
    const auto out = substructure(g, nu, {slope_of(3, 7)});
    EXPECT_TRUE(out.cert.valid()) << out.cert.failing_step();

    // nu(g, g') = 2 b + (a' - b') on pairs with equal a
    std::map<std::uint64_t, int> fibers;
    for (const auto& a : g.points())
        for (const auto& b : g.points())
            if (a.a == b.a) ++fibers[(2 * a.b.code + b.a.code + 7 - b.b.code) % 7];
    int largest = 0;
    for (const auto& [v, n] : fibers) largest = std::max(largest, n);
    EXPECT_EQ(out.fiber, largest);
    std::uint64_t least = 7;
    for (const auto& [v, n] : fibers)
        if (n == largest) least = std::min(least, v);
    EXPECT_EQ(out.nu0.code, least);
    EXPECT_LE(out.fiber, out.N);
}

TEST(Substructure, RandomInstancesKeepTheBounds) {
    std::mt19937_64 rng(13);
    const std::uint64_t p = 13;
    for (int t = 0; t < 200; ++t) {
        const NuParams nu = random_nu(p, rng);
        const auto rs = generic_slopes(nu, 2, rng);
        ASSERT_EQ(rs.size(), 2u);
        const Config g = random_config(p, 1 + rng() % p, rng);
        const auto out = substructure(g, nu, rs);
        ASSERT_TRUE(out.cert.valid()) << out.cert.failing_step();
        const auto* gb = out.cert.find("g-bound");
        ASSERT_NE(gb, nullptr);
        EXPECT_LE(gb->counts.at("max_G_nu0"), out.N);
        EXPECT_LE(out.realized_constant, 8.0);
        // the refinement is a subset of the chosen fiber's first points
        for (const auto& x : out.sub.points())
            EXPECT_NE(std::find(g.points().begin(), g.points().end(), x), g.points().end());
    }
}

TEST(IterateOnce, ExponentsFromTheInnerBound) {
    std::mt19937_64 rng(21);
    const NuParams nu{slope_of(0, 11), slope_inf(), FieldElem(3, 11)};
    const std::vector<Slope> rs{slope_of(1, 11), slope_of(4, 11)};
    for (int t = 0; t < 40; ++t) {
        const Config g = random_config(11, 1 + rng() % 11, rng);
        const auto cert = iterate_once(g, nu, rs, Rational(2), Rational(1));
        EXPECT_TRUE(cert.valid()) << cert.failing_step();
        EXPECT_EQ(cert.results().at("final_exponent"), "7/4");
        EXPECT_EQ(cert.results().at("segment_exponent"), "5/2");
    }
    const auto c74 = iterate_once(row(11), nu, rs, Rational(7, 4), Rational(1));
    EXPECT_EQ(c74.results().at("final_exponent"), "12/7");
    const Space z(11);
    EXPECT_TRUE(iterate_once(Config(z, {pt(z, 0, 3)}), nu, rs, Rational(7, 4), Rational(1)).valid());
    EXPECT_THROW(iterate_once(row(11), nu, rs, Rational(1, 2), Rational(1)), InvalidInput);
}

TEST(IterateOnce, RefutedInnerBoundIsReported) {
    const NuParams nu{slope_of(0, 11), slope_inf(), FieldElem(3, 11)};
    std::mt19937_64 rng(5);
    bool refuted = false;
    for (int t = 0; t < 50 && !refuted; ++t) {
        const auto cert = iterate_once(random_config(11, 11, rng), nu, {slope_of(1, 11), slope_of(4, 11)},
                                       Rational(1), Rational(1, 100));
        refuted = !cert.valid();
        if (refuted) {
            EXPECT_EQ(cert.failing_step(), "inner");
        }
    }
    EXPECT_TRUE(refuted);
}
