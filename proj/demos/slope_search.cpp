// Largest configurations over F_p whose projections onto 0, 1, 2 and infinity
// stay below a cap, next to the N^{7/4} growth they are compared with.

#include <cmath>
#include <cstdio>

#include "kakeya/sd_engine.hpp"

int main() {
    using namespace kakeya;
    for (std::uint64_t p : {5, 7}) {
        const std::vector<Slope> R{slope_of(0, p), slope_of(1, p), slope_of(2, p), slope_inf()};
        std::printf("p = %llu\n", static_cast<unsigned long long>(p));
        for (std::uint64_t N = 1; N <= 4; ++N) {
            const auto res = extremal_search(p, R, N);
            std::printf("  N=%llu  max #G=%zu  N^{7/4}=%.2f  nodes=%llu\n", static_cast<unsigned long long>(N),
                        res.max_size, std::pow(static_cast<double>(N), 1.75),
                        static_cast<unsigned long long>(res.nodes_explored));
        }
    }
}
