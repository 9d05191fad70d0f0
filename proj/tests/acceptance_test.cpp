// Runs acceptance criteria 1-10 and prints one pass/fail line each.
// Usage: acceptance_test [suite]   (suite: poles, heat, tip, powers, all)

#include "conelab/verification.hpp"

#include <iostream>

int main(int argc, char** argv) {
    const std::string suite = argc > 1 ? argv[1] : "all";
    try {
        const auto results = conelab::run_suite(suite);
        conelab::print_results(std::cout, results);
        const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.passed; });
        std::cout << results.size() - failed << '/' << results.size() << " criteria passed\n";
        return failed == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "acceptance_test: " << e.what() << '\n';
        return 2;
    }
}
