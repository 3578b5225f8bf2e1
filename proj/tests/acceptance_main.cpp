// End-to-end verification battery: one line per check, nonzero exit when
// any check fails.

#include <cstdio>

#include "riskdp/suite.hpp"

int main() {
    const auto results = riskdp::run_acceptance_suite();
    std::size_t passed = 0;
    for (const auto& r : results) {
        std::printf("[%s] %s: %s (%.2fs)\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str(), r.seconds);
        std::fflush(stdout);
        if (r.pass) ++passed;
    }
    std::printf("%zu/%zu checks passed\n", passed, results.size());
    return passed == results.size() ? 0 : 1;
}
