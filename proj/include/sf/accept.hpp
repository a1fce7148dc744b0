#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sf {

// One acceptance criterion outcome.  `got` is the binding metric compared
// against `tol` (interpretation in `comparison`), with every subcondition of
// the criterion folded into `pass`.
struct CheckResult {
    std::string id;
    std::string name;
    std::string suite;  // invariants | greens | selfforce | balance
    double expected = 0;
    double got = 0;
    double tol = 0;
    bool pass = false;
    double seconds = 0;
};

// suite: invariants | greens | selfforce | balance | all
std::vector<CheckResult> run_acceptance(const std::string& suite, int threads = 1);

void print_check_table(const std::vector<CheckResult>& rows, std::ostream& os);

}  // namespace sf
