#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include "dser/acceptance.hpp"

int main(int argc, char** argv) {
    std::uint64_t seed = 42;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--seed") seed = std::strtoull(argv[i + 1], nullptr, 10);
    auto results = dser::run_all_criteria(seed);
    dser::print_criteria(results, std::cout);
    const bool ok = dser::all_criteria_pass(results);
    std::cout << (ok ? "all criteria passed" : "ACCEPTANCE FAILED") << "\n";
    return ok ? 0 : 1;
}
