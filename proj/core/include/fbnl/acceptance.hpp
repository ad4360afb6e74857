#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace fbnl {

/*! One measured check. Primary lines decide the criterion; supplementary lines
 *  carry companion measurements and never change the verdict. */
struct CheckLine {
    int criterion = 0;
    std::string label;
    bool pass = false;
    bool supplementary = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    int grid_n = 256;            // resolution for solver, Weiss, and minimizer checks
    int linearized_coarse = 256;
    int linearized_fine = 512;
    std::vector<int> only;       // criteria to run; empty means all
};

struct CriterionSummary {
    int criterion = 0;
    std::string title;
    double runtime_budget = 0.0; // seconds
    double seconds = 0.0;
    bool pass = false;
    std::vector<CheckLine> lines;
};

using CheckCallback = std::function<void(const CriterionSummary&)>;

// Runs criteria 1..14 in order; the callback sees each summary as it completes.
std::vector<CriterionSummary> run_acceptance(const AcceptanceOptions& opts,
                                             const CheckCallback& on_done = {});

// "PASS  7 solver exactness ..." plus indented sub-lines.
void print_summary(std::ostream& os, const CriterionSummary& c);

bool all_passed(const std::vector<CriterionSummary>& results);

} // namespace fbnl
