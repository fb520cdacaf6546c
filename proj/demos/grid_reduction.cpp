// Builds a saturated random line family on the 1/32 grid, runs the two-slice
// bound and the six-slice reduction, and prints each certificate step.

#include <cstdio>
#include <cstdlib>

#include "kakeya/kakeya_grid.hpp"

namespace {

void print(const kakeya::Certificate& cert) {
    std::printf("%s: %s\n", cert.name().c_str(), cert.valid() ? "valid" : "refuted");
    for (const auto& s : cert.steps())
        std::printf("  %-22s %-5s c=%-10.4g %s\n", s.id.c_str(), s.ok ? "ok" : "FAIL", s.constant, s.inequality().c_str());
    for (const auto& [k, v] : cert.results()) std::printf("  %s = %s\n", k.c_str(), v.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    using namespace kakeya::grid;
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 0;
    GridParams g;
    const auto F = generate_family(FamilyKind::random, g, 27, seed);
    const auto Y = full_shading(F);
    const auto st = shading_stats(F, Y);
    std::printf("%zu lines, mass %lld, union %lld, saturated %s\n\n", F.size(), static_cast<long long>(st.mass),
                static_cast<long long>(st.union_size), st.saturated ? "yes" : "no");

    print(bush_certificate(F, Y));
    std::printf("\n");
    const auto res = six_slices_to_sd(F, Y, seed);
    print(res.cert);
    std::printf("\nslope instance on %zu point pairs:\n", res.instance.points.size());
    for (std::size_t i = 0; i < res.instance.slopes.size(); ++i) {
        const auto& r = res.instance.slopes[i];
        std::printf("  %-4s %s\n", res.instance.slope_names[i].c_str(), r ? kakeya::to_string(*r).c_str() : "inf");
    }
}
