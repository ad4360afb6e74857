#include "fbnl/acceptance.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

// Usage: fbnl_acceptance [criterion ...]
int main(int argc, char** argv)
{
    fbnl::AcceptanceOptions opts;
    for (int k = 1; k < argc; ++k)
        opts.only.push_back(std::atoi(argv[k]));
    const auto results = fbnl::run_acceptance(opts, [](const fbnl::CriterionSummary& c) {
        fbnl::print_summary(std::cout, c);
        std::cout.flush();
    });
    int passed = 0;
    for (const auto& c : results)
        passed += c.pass;
    std::cout << passed << " of " << results.size() << " criteria passed\n";
    return fbnl::all_passed(results) ? 0 : 1;
}
