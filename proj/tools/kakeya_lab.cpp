#include <iostream>
#include <string>
#include <vector>

#include "kakeya/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const auto out = kakeya::cli::run(args);
    bool to_stdout = true;
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--output") to_stdout = false;
    if (to_stdout) std::cout << out.text;
    std::cerr << out.diagnostics;
    return out.exit_code;
}
