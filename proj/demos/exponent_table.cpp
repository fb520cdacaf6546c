// Prints the dimension comparison table for n = 2..24 and marks the rows
// where a bound beats every earlier one.

#include <cstdio>

#include "kakeya/exponents.hpp"

int main() {
    using namespace kakeya::exponents;
    const auto table = comparison_table(2, 24);
    std::printf("alpha = %.10f   1 + sqrt(2)/2 = %.10f\n\n", advanced_fixed(), basic_fixed());
    std::printf("%3s %10s %10s %10s %8s  new\n", "n", "minkowski", "hausdorff", "maximal_p", "wolff");
    for (const auto& r : table.rows) {
        std::printf("%3d %10.5f %10.5f %10.5f %8.2f  %s%s%s\n", r.n, r.minkowski, r.hausdorff, r.maximal_p, r.wolff,
                    r.new_minkowski ? "M" : "-", r.new_hausdorff ? "H" : "-", r.new_maximal ? "P" : "-");
    }
    std::printf("\nHausdorff and Minkowski bounds cross at n = %.4f\n", table.hausdorff_minkowski_crossover);
}
