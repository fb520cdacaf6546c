#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "kakeya/kakeya_grid.hpp"

using namespace kakeya;
using namespace kakeya::grid;

namespace {

GridParams params(int n, std::int64_t N) {
    GridParams g;
    g.n = n;
    g.N = N;
    return g;
}

// Integer form of the membership test for a line with scaled integer base b
// and direction (q, D): |D (x' - b') - (h - b_n) q|^2 <= c^2 D^2.
bool member_oracle(const std::vector<std::int64_t>& b, const std::vector<std::int64_t>& dir, std::int64_t c,
                   const std::vector<std::int64_t>& x) {
    const auto D = dir.back();
    const auto rise = x.back() - b.back();
    std::int64_t s = 0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const auto v = D * (x[i] - b[i]) - rise * dir[i];
        s += v * v;
    }
    return s <= c * c * D * D;
}

std::set<GridPoint> union_oracle(const LineFamily& F, const Shading& Y) {
    std::set<GridPoint> u;
    for (std::size_t i = 0; i < F.size(); ++i)
        for (auto j : Y.chosen[i]) u.insert(F.lines[i].members[j]);
    return u;
}

}  // namespace

TEST(DLine, VerticalThroughOrigin) {
    const auto g = params(2, 16);
    const auto T = make_line_scaled(g, {0, 0}, {0, 16});
    for (std::int64_t k = 0; k < 16; ++k) EXPECT_TRUE(T.contains(GridPoint{{0, k}})) << k;
    // five columns within 2/N, seventeen heights
    EXPECT_EQ(T.size(), 5u * 17u);
    EXPECT_FALSE(T.contains(GridPoint{{3, 4}}));
    EXPECT_FALSE(T.contains(GridPoint{{0, 17}}));
}

TEST(DLine, DirectionOutsideCapThrows) {
    const auto g = params(2, 16);
    EXPECT_THROW(make_line_scaled(g, {0, 0}, {16, 0}), InvalidInput);
    EXPECT_THROW(make_line_scaled(g, {0, 0}, {8, 16}), InvalidInput);  // angle atan(1/2) > pi/8
    EXPECT_NO_THROW(make_line_scaled(g, {0, 0}, {6, 16}));             // atan(3/8) < pi/8
}

TEST(DLine, MembershipMatchesIntegerOracle) {
    std::mt19937_64 rng(7);
    for (int n : {2, 3}) {
        const auto g = params(n, n == 2 ? 32 : 8);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<std::int64_t> b, dir;
            for (int i = 0; i + 1 < n; ++i) b.push_back(static_cast<std::int64_t>(rng() % (g.N + 1)) - g.N / 2);
            b.push_back(-static_cast<std::int64_t>(rng() % (g.N / 2)));
            const std::int64_t D = g.N;
            for (int i = 0; i + 1 < n; ++i) dir.push_back(static_cast<std::int64_t>(rng() % 7) - 3);
            dir.push_back(D);
            DLine T;
            try {
                T = make_line_scaled(g, b, dir);
            } catch (const InvalidInput&) {
                continue;  // angle cap
            }
            std::set<GridPoint> members(T.members.begin(), T.members.end());
            // every lattice point of a box around the segment, both directions of the test
            const std::int64_t R = g.c_ball * g.N;
            std::vector<std::int64_t> x(static_cast<std::size_t>(n), -R);
            std::size_t checked = 0;
            while (true) {
                GridPoint p{x};
                if (p.height() >= b.back() && p.height() <= b.back() + g.N && in_ball(g, p)) {
                    EXPECT_EQ(members.count(p) == 1, member_oracle(b, dir, g.c_line, x)) << to_string(p);
                    ++checked;
                }
                std::size_t i = 0;
                while (i < x.size() && x[i] == R) x[i++] = -R;
                if (i == x.size()) break;
                ++x[i];
            }
            EXPECT_GT(checked, 0u);
            EXPECT_GE(static_cast<std::int64_t>(T.size()), line_card_min(g));
            EXPECT_LE(static_cast<std::int64_t>(T.size()), line_card_max(g));
        }
    }
}

TEST(Family, MaximalSeparatedCountsCapDirections) {
    for (std::int64_t N : {16, 32}) {
        const auto g = params(2, N);
        const auto F = generate_family(FamilyKind::maximal_separated, g, 0, 3);
        // j with atan(|j| / N) <= pi/8
        std::size_t expect = 0;
        for (std::int64_t j = -N; j <= N; ++j)
            if (std::atan(std::abs(static_cast<double>(j)) / static_cast<double>(N)) <= std::numbers::pi / 8) ++expect;
        EXPECT_EQ(F.size(), expect);
        const auto rep = validate_family(F);
        EXPECT_TRUE(rep.ok);
        EXPECT_TRUE(F.separated);
        EXPECT_LE(rep.capacity_constant, 1.0);
        EXPECT_DOUBLE_EQ(rep.min_separation, 1.0);
    }
    EXPECT_EQ(generate_family(FamilyKind::maximal_separated, params(2, 16), 0, 0).size(), 13u);
}

TEST(Family, DuplicateDirectionBreaksSeparation) {
    const auto g = params(2, 32);
    std::vector<DLine> lines{make_line_scaled(g, {0, 0}, {1, 32}), make_line_scaled(g, {4, 0}, {1, 32}),
                             make_line_scaled(g, {-4, 0}, {5, 32})};
    const auto F = make_family(g, lines);
    EXPECT_FALSE(F.separated);
    const auto rep = validate_family(F);
    EXPECT_FALSE(rep.separation_ok);
    EXPECT_FALSE(rep.ok);
    EXPECT_DOUBLE_EQ(rep.min_separation, 0.0);
}

TEST(Family, AngleCapConstantsOnConcentratedDirections) {
    const auto g = params(2, 32);
    std::vector<DLine> lines;
    for (std::int64_t j = 0; j < 8; ++j) lines.push_back(make_line_scaled(g, {0, 0}, {j, 32}));
    const auto F = make_family(g, lines);
    const auto rep = validate_family(F);
    ASSERT_FALSE(rep.angle_rows.empty());
    for (const auto& row : rep.angle_rows) {
        // independent count: directions within theta of some direction j0
        const auto t = to_double(row.theta) * 32.0;
        std::int64_t best = 0;
        for (std::int64_t j0 = 0; j0 < 8; ++j0) {
            std::int64_t c = 0;
            for (std::int64_t j = 0; j < 8; ++j) c += std::abs(j - j0) <= t + 1e-9;
            best = std::max(best, c);
        }
        EXPECT_EQ(row.max_count, best);
        EXPECT_NEAR(row.constant, static_cast<double>(best) / t, 1e-12);
    }
    EXPECT_GE(rep.angle_constant, 3.0);  // theta = 1/N holds three directions
}

TEST(Family, GenerationIsDeterministicAndBounded) {
    const auto g = params(2, 32);
    for (auto kind : {FamilyKind::random, FamilyKind::bush, FamilyKind::hairbrush}) {
        const auto a = generate_family(kind, g, 20, 11);
        const auto b = generate_family(kind, g, 20, 11);
        ASSERT_EQ(a.size(), 20u);
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.lines[i].members, b.lines[i].members);
        EXPECT_TRUE(validate_family(a).ok) << to_string(kind);
    }
    EXPECT_THROW(generate_family(FamilyKind::random, g, 10 * 32, 0), InvalidInput);
    // 27 directions fit in the cap at N = 32
    EXPECT_THROW(generate_family(FamilyKind::bush, g, 32, 0), InvalidInput);
    const auto B = generate_family(FamilyKind::bush, g, 27, 0);
    for (const auto& T : B.lines) EXPECT_TRUE(T.contains(GridPoint{{0, 0}}));
    // in n = 3 every hairbrush line meets the stem, the x_1 axis at height 1/2
    const auto g3 = params(3, 8);
    const auto Hb = generate_family(FamilyKind::hairbrush, g3, 10, 5);
    for (const auto& T : Hb.lines) EXPECT_EQ(T.center(8, 4)[1], Rational(0));
}

TEST(PairLines, BoundsAndEdgeCases) {
    const auto g = params(2, 32);
    const auto F = generate_family(FamilyKind::maximal_separated, g, 0, 1);
    const GridPoint a{{0, 0}};
    EXPECT_THROW(lines_through_pair(F, a, a), InvalidInput);
    EXPECT_EQ(lines_through_pair(F, GridPoint{{60, 0}}, GridPoint{{60, 32}}), 0);
    // unit height separation: (4 c_line + 1)^{n-1} = 9
    EXPECT_EQ(pair_line_bound(F, GridPoint{{0, 0}}, GridPoint{{0, 32}}), 9);
    // adjacent heights: no constraint beyond #F
    EXPECT_EQ(pair_line_bound(F, GridPoint{{0, 0}}, GridPoint{{0, 1}}), static_cast<std::int64_t>(F.size()));

    std::mt19937_64 rng(3);
    for (int seed = 0; seed < 5; ++seed) {
        const auto R = generate_family(FamilyKind::random, g, 27, static_cast<std::uint64_t>(seed));
        const auto B = generate_family(FamilyKind::bush, g, 27, static_cast<std::uint64_t>(seed));
        for (const auto* fam : {&R, &B})
            for (int t = 0; t < 200; ++t) {
                const auto& T = fam->lines[rng() % fam->size()];
                const auto& x1 = T.members[rng() % T.size()];
                const auto& x2 = T.members[rng() % T.size()];
                if (x1 == x2) continue;
                const auto c = lines_through_pair(*fam, x1, x2);
                EXPECT_GE(c, 1);
                EXPECT_LE(c, pair_line_bound(*fam, x1, x2));
            }
    }
}

TEST(Shading, StatsOnFullHalfEmpty) {
    const auto g = params(2, 32);
    const auto F = generate_family(FamilyKind::random, g, 20, 2);
    const auto full = shading_stats(F, full_shading(F));
    EXPECT_DOUBLE_EQ(full.mean_density, 1.0);
    EXPECT_TRUE(full.saturated);

    const auto half = shading_stats(F, alternate_shading(F));
    for (std::size_t i = 0; i < F.size(); ++i) {
        const auto t = F.lines[i].size();
        EXPECT_DOUBLE_EQ(half.density[i], static_cast<double>((t + 1) / 2) / static_cast<double>(t));
    }
    EXPECT_NEAR(half.mean_density, 0.5, 0.01);

    Shading none;
    none.chosen.assign(F.size(), {});
    const auto empty = shading_stats(F, none);
    EXPECT_EQ(empty.mass, 0);
    EXPECT_EQ(empty.union_size, 0);
    EXPECT_DOUBLE_EQ(empty.mean_density, 0.0);
    EXPECT_FALSE(empty.saturated);

    Shading bad = full_shading(F);
    bad.chosen[0].push_back(F.lines[0].size());
    EXPECT_THROW(shading_stats(F, bad), InvalidInput);
}

TEST(Shading, CountingFunctionSumsToMass) {
    for (int seed = 0; seed < 20; ++seed) {
        const auto g = params(seed % 4 == 0 ? 3 : 2, seed % 4 == 0 ? 8 : 32);
        const auto F = generate_family(FamilyKind::random, g, g.n == 3 ? 30 : 20, static_cast<std::uint64_t>(seed));
        const auto Y = random_shading(F, 0.1 + 0.04 * seed, static_cast<std::uint64_t>(seed));
        const auto st = shading_stats(F, Y);
        std::int64_t total = 0;
        for (const auto& [x, m] : counting_function(F, Y)) total += m;
        EXPECT_EQ(total, st.mass);
        std::int64_t hist = 0, pts = 0;
        for (const auto& [m, c] : st.mu_histogram) {
            hist += m * c;
            pts += c;
        }
        EXPECT_EQ(hist, st.mass);
        EXPECT_EQ(pts, static_cast<std::int64_t>(union_oracle(F, Y).size()));
    }
}

TEST(TwoEnds, FullPassesConcentratedAndSinglePointFail) {
    const auto g = params(2, 32);
    const auto F = generate_family(FamilyKind::random, g, 27, 4);
    const TwoEndsParams half{0.5, 2.0};
    EXPECT_TRUE(two_ends_check(F, full_shading(F), half).pass);
    const auto conc = two_ends_check(F, height_band_shading(F, 0, 8), half);
    EXPECT_FALSE(conc.pass);

    // one point per line: the ball of radius 1/N holds it, ratio N^sigma
    Shading single;
    for (std::size_t i = 0; i < F.size(); ++i) single.chosen.push_back({0});
    const auto rep = two_ends_check(F, single, half);
    EXPECT_FALSE(rep.pass);
    EXPECT_NEAR(rep.max_ratio, std::sqrt(32.0), 1e-9);
    EXPECT_EQ(rep.lines[0].radius, Rational(1, 32));
    EXPECT_THROW(two_ends_check(F, single, TwoEndsParams{0.0, 2.0}), InvalidInput);
}

TEST(Bush, CertificateOnBushFamily) {
    const auto g = params(2, 32);
    const auto B = generate_family(FamilyKind::bush, g, 27, 0);
    const auto Y = full_shading(B);
    const auto cert = bush_certificate(B, Y);
    EXPECT_TRUE(cert.valid()) << cert.failing_step();
    const auto E = union_oracle(B, Y).size();
    EXPECT_EQ(cert.results().at("E"), std::to_string(E));
    const double c = static_cast<double>(E) / (32.0 * std::sqrt(27.0));
    EXPECT_NEAR(std::stod(cert.results().at("realized_c")), c, 1e-5);
    EXPECT_GE(c, 1.0 / 16);
    EXPECT_EQ(cert.results().at("small_lambda"), "false");
    EXPECT_EQ(cert.replay(), Verdict::valid);
}

TEST(Bush, SingleLineAndSmallDensity) {
    const auto g = params(2, 32);
    const auto F = make_family(g, {make_line_scaled(g, {0, 0}, {0, 32})});
    const auto cert = bush_certificate(F, full_shading(F));
    EXPECT_TRUE(cert.valid());
    EXPECT_EQ(cert.results().at("E"), std::to_string(F.lines[0].size()));

    const auto R = generate_family(FamilyKind::random, g, 27, 9);
    const auto sparse = random_shading(R, 0.3, 9);
    const auto cs = bush_certificate(R, sparse);
    EXPECT_EQ(cs.results().at("small_lambda"), "true");
    EXPECT_FALSE(cs.notes().empty());

    EXPECT_THROW(bush_certificate(R, height_band_shading(R, 0, 8), BushParams{{0.5, 2.0}}), TwoEndsFailed);
}

TEST(Slices, UniformAndSingleSlice) {
    CountingFunction uniform;
    for (std::int64_t h = 0; h <= 32; ++h)
        for (std::int64_t x = 0; x < 10; ++x) uniform[GridPoint{{x, h}}] = 1;
    const auto u = slice_extract(uniform, 32);
    EXPECT_EQ(u.k, 0);
    EXPECT_EQ(u.S.size(), 33u);
    EXPECT_TRUE(u.windows_ok());

    CountingFunction single;
    for (std::int64_t x = 0; x < 40; ++x) single[GridPoint{{x, 7}}] = 2;
    const auto s = slice_extract(single, 32);
    EXPECT_EQ(s.S, std::vector<std::int64_t>{7});
    EXPECT_EQ(1 << s.k, 32);  // 2^k = N + 1 rounded to a power of two
    EXPECT_TRUE(s.windows_ok());
    EXPECT_THROW(slice_extract(CountingFunction{}, 32), InvalidInput);
}

TEST(Slices, TwoScaleTieBreakIsDeterministic) {
    // half the points spread over 16 slices of size 4, half on 2 slices of size 32:
    // equal mass in two size classes, the smaller class wins
    CountingFunction mu;
    for (std::int64_t h = 0; h < 16; ++h)
        for (std::int64_t x = 0; x < 4; ++x) mu[GridPoint{{x, h}}] = 1;
    for (std::int64_t h = 20; h < 22; ++h)
        for (std::int64_t x = 0; x < 32; ++x) mu[GridPoint{{x, h}}] = 1;
    const auto a = slice_extract(mu, 32);
    const auto b = slice_extract(mu, 32);
    EXPECT_EQ(a.S, b.S);
    EXPECT_EQ(a.S.size(), 16u);
    EXPECT_EQ(a.slice_count.at(0), 4);
}

TEST(Slices, WindowsHoldOnRandomSets) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const auto g = params(2, 32);
        CountingFunction mu;
        if (trial % 2 == 0) {
            const auto F = generate_family(FamilyKind::random, g, 1 + rng() % 27, rng());
            mu = counting_function(F, random_shading(F, 0.2 + 0.8 * static_cast<double>(rng() % 100) / 100.0, rng()));
        } else {
            const auto density = 1 + rng() % 8;
            for (std::int64_t h = 0; h <= 32; ++h)
                for (std::int64_t x = -40; x <= 40; ++x)
                    if (rng() % 8 < density) mu[GridPoint{{x, h}}] = 1 + static_cast<std::int64_t>(rng() % 3);
        }
        if (mu.empty()) continue;
        const auto ss = slice_extract(mu, 32);
        EXPECT_TRUE(ss.s_size_ok) << trial << " ratio " << ss.s_size_ratio;
        EXPECT_TRUE(ss.slice_ok) << trial << " [" << ss.slice_ratio_min << ", " << ss.slice_ratio_max << "]";
        // E' is one dyadic level set of mu
        for (const auto& x : ss.e_prime) {
            const auto m = mu.at(x);
            EXPECT_LE(std::int64_t{1} << ss.mu_level, m);
            EXPECT_LT(m, std::int64_t{2} << ss.mu_level);
        }
    }
}

TEST(Slices, SlopeAndSValues) {
    EXPECT_EQ(slice_slope(Rational(1, 2), Rational(0), Rational(1)), Rational(1));
    EXPECT_EQ(slice_slope(Rational(0), Rational(0), Rational(1)), Rational(0));
    EXPECT_THROW(slice_slope(Rational(0), Rational(0), Rational(1), Rational(1, 8)), InvalidInput);
    EXPECT_THROW(slice_slope(Rational(1), Rational(0), Rational(1)), InvalidInput);
    EXPECT_EQ(s_exact(Rational(1, 2), Rational(1, 2), Rational(0), Rational(1)), Rational(2));
    EXPECT_EQ(s_value(Rational(1, 2), Rational(1, 2), Rational(0), Rational(1), 32), Rational(2));
    // r(1/4) = 1/3, r(3/4) = 3, s = 1/3 + 1/9 = 4/9, N s = 14.2 -> 14/32
    EXPECT_EQ(s_value(Rational(1, 4), Rational(3, 4), Rational(0), Rational(1), 32), Rational(14, 32));
    EXPECT_EQ(round_to_grid(Rational(5, 64), 32), Rational(2, 32));   // tie goes down
    EXPECT_EQ(round_to_grid(Rational(-5, 64), 32), Rational(-3, 32));  // tie goes down
}

TEST(SixSlices, SaturatedRandomFamilies) {
    const auto g = params(2, 32);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto F = generate_family(FamilyKind::random, g, 27, seed);
        const auto Y = full_shading(F);
        ASSERT_TRUE(shading_stats(F, Y).saturated);
        const auto res = six_slices_to_sd(F, Y, seed);
        EXPECT_TRUE(res.cert.valid()) << "seed " << seed << " fails " << res.cert.failing_step();
        const auto& inst = res.instance;
        ASSERT_EQ(inst.slopes.size(), 6u);
        ASSERT_FALSE(inst.points.empty());
        // independent recomputation of the near-dual identity and the pi_{-1} fibers
        for (int i : {1, 2}) {
            const Rational r = *inst.slopes[static_cast<std::size_t>(i)];
            const Rational rp = *inst.slopes[static_cast<std::size_t>(i + 2)];
            const double err = std::abs(to_double(inst.s) / to_double(r) - 1.0 / to_double(rp) - 1.0);
            EXPECT_LE(err, 4.0 / 32 + 1e-12) << "seed " << seed;
        }
        std::map<std::int64_t, int> fibers;
        for (const auto& [a, b] : inst.points) ++fibers[a[0] - b[0]];
        for (const auto& [v, c] : fibers) EXPECT_LE(c, 4) << "seed " << seed;
        // heights are distinct and the slopes come from them
        std::set<std::int64_t> hs(res.heights.begin(), res.heights.end());
        EXPECT_EQ(hs.size(), 6u);
        const Rational t1(res.heights[0], 32), t2(res.heights[1], 32), t3(res.heights[2], 32);
        EXPECT_EQ(*inst.slopes[1], (t3 - t1) / (t2 - t3));
        for (const auto* id : {"tpppp-card-lower", "tpppp-card-upper", "t5-card-lower", "t5-card-upper",
                               "g-card-lower", "g-card-upper", "Delta-upper"}) {
            const auto* st = res.cert.find(id);
            ASSERT_NE(st, nullptr) << id;
            EXPECT_TRUE(st->ok) << id << " seed " << seed;
        }
    }
}

TEST(SixSlices, SmallDensityRoutesToBush) {
    const auto g = params(2, 32);
    const auto F = generate_family(FamilyKind::random, g, 27, 1);
    const auto Y = random_shading(F, std::pow(32.0, -0.25), 1);
    EXPECT_THROW(six_slices_to_sd(F, Y, 1), BushBranchApplies);
}

TEST(SixSlices, EmptyQSetsNameTheStep) {
    const auto g = params(2, 32);
    const auto F = generate_family(FamilyKind::random, g, 27, 2);
    SixSlicesParams p;
    p.gap = Rational(1, 2);  // four heights pairwise 1/2 apart do not fit on a unit line
    try {
        six_slices_to_sd(F, full_shading(F), 2, p);
        FAIL() << "expected an empty pigeonhole";
    } catch (const PigeonholeEmpty& e) {
        EXPECT_EQ(e.step(), "tpppp-card");
    }
}

TEST(SixSlices, ToleranceVerifier) {
    GridSdInstance inst;
    inst.n = 2;
    inst.N = 32;
    inst.points = {{{0}, {1}}, {{1}, {2}}, {{2}, {3}}, {{5}, {0}}};
    inst.slopes = {Rational(0), std::nullopt};
    const auto strict = verify_grid_sd(inst, 1);
    EXPECT_EQ(strict.max_fiber, 3);
    EXPECT_FALSE(strict.injective_within_tolerance);
    EXPECT_TRUE(verify_grid_sd(inst, 4).injective_within_tolerance);
    EXPECT_EQ(strict.projection_counts, (std::vector<std::int64_t>{4, 4}));
}

TEST(Maximal, RatiosOnStandardFamilies) {
    const auto g = params(2, 32);
    const auto M = generate_family(FamilyKind::maximal_separated, g, 0, 0);
    const auto full = maximal_experiment(M, full_shading(M));
    EXPECT_GE(full.ratio_rwt, 1.0);
    EXPECT_GE(full.ratio_final, 1.0);
    EXPECT_NEAR(full.rhs_rwt, full.rhs_final, 1e-9);  // lambda = 1

    const auto one = make_family(g, {make_line_scaled(g, {0, 0}, {0, 32})});
    const auto single = maximal_experiment(one, full_shading(one));
    EXPECT_GE(single.ratio_rwt, 1.0);

    const auto B = generate_family(FamilyKind::bush, g, 27, 0);
    const auto bush = maximal_experiment(B, alternate_shading(B));
    EXPECT_EQ(bush.union_size, static_cast<std::int64_t>(union_oracle(B, alternate_shading(B)).size()));
    EXPECT_GT(bush.ratio_rwt, 0.0);
}

TEST(Grid, ThreeDimensionalSmoke) {
    const auto g = params(3, 8);
    const auto F = generate_family(FamilyKind::random, g, 20, 1);
    EXPECT_TRUE(validate_family(F).ok);
    const auto Y = full_shading(F);
    EXPECT_TRUE(shading_stats(F, Y).saturated);
    EXPECT_TRUE(two_ends_check(F, Y, {0.5, 2.0}).pass);
    const auto& T = F.lines[0];
    EXPECT_LE(lines_through_pair(F, T.members.front(), T.members.back()),
              pair_line_bound(F, T.members.front(), T.members.back()));
}

TEST(Grid, AcceptanceSuiteRuntime) {
    const auto start = std::chrono::steady_clock::now();
    const auto g = params(2, 32);
    const auto B = generate_family(FamilyKind::bush, g, 27, 0);
    EXPECT_TRUE(bush_certificate(B, full_shading(B)).valid());
    const auto F = generate_family(FamilyKind::random, g, 27, 0);
    EXPECT_TRUE(two_ends_check(F, full_shading(F), {0.5, 2.0}).pass);
    EXPECT_FALSE(two_ends_check(F, height_band_shading(F, 0, 8), {0.5, 2.0}).pass);
    const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LT(secs, 60.0);
}
