#pragma once

#include <functional>
#include <string>
#include <vector>

namespace qrm {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;      // measured values, one line
    double seconds = 0.0;
};

// Ids 1..11 with their titles.
const std::vector<std::pair<int, std::string>>& acceptance_criteria();

// Runs one criterion; exceptions inside a check become a FAIL with the message.
CriterionResult run_criterion(int id);

// Runs the given ids in order (all when empty), reporting each as it finishes.
std::vector<CriterionResult> run_suite(const std::vector<int>& ids = {},
                                       const std::function<void(const CriterionResult&)>& on_result = {});

// "PASS  3  Zeta pole residues  (...)".
std::string format_result(const CriterionResult& r);

} // namespace qrm
