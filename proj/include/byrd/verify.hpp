#ifndef BYRD_VERIFY_HPP
#define BYRD_VERIFY_HPP

#include <string>
#include <vector>

namespace byrd {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail; // measured residuals / thresholds
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

// Deterministic self-check suites over the library's invariants.
SuiteResult verify_gradients();
SuiteResult verify_nesterov();
SuiteResult verify_aggregation();
SuiteResult verify_attacks();
SuiteResult verify_resilience();
SuiteResult verify_theorem();

// `which` is one of the suite names or "all"; throws on unknown names.
std::vector<SuiteResult> run_verify(const std::string& which);

} // namespace byrd

#endif
