#ifndef DSER_ACCEPTANCE_HPP
#define DSER_ACCEPTANCE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dser {

// The eight go/no-go checks for the library, each with a wall-clock
// budget.  Every check is exact: a single wrong entry anywhere fails it.
struct CriterionResult {
    int id = 0;
    std::string label;
    bool pass = false;       // the checks all held
    bool in_time = false;    // finished within limit_seconds
    std::string detail;
    double seconds = 0.0;
    double limit_seconds = 0.0;

    bool ok() const { return pass && in_time; }
};

std::vector<CriterionResult> run_all_criteria(std::uint64_t seed = 42);

bool all_criteria_pass(const std::vector<CriterionResult>& rs);

// One line per criterion:
//   criterion N: PASS - label (detail) [1.23s / limit 10s]
void print_criteria(const std::vector<CriterionResult>& rs, std::ostream& os);

}  // namespace dser

#endif
