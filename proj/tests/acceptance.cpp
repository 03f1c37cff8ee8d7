#include "qrm/verify.hpp"

#include <iostream>

int main()
{
    int failed = 0;
    const auto results = qrm::run_suite({}, [&](const qrm::CriterionResult& r) {
        failed += r.pass ? 0 : 1;
        std::cout << qrm::format_result(r) << std::endl;
    });
    std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
