#pragma once

// Fast self-checks runnable from the command line: NAF algebra, gradients,
// channel ordering, RK4 order, reward values and extended-state layout.

#include "ncsnaf/naf.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ncsnaf::verify {

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double millis = 0.0;
};

// Substitutable implementations, so a deliberately broken variant can be
// shown to fail its suite.
struct Hooks {
    std::function<naf::Advantage(const naf::Vector&, const naf::Vector&, const naf::Matrix&)> advantage =
        [](const naf::Vector& u, const naf::Vector& mu, const naf::Matrix& L) { return naf::advantage(u, mu, L); };
};

std::vector<SuiteResult> run_all(const Hooks& hooks = {});

// One JSON object: {"passed": bool, "suites": [{name, passed, millis, detail}]}
void write_report(std::ostream& out, const std::vector<SuiteResult>& results);

bool all_passed(const std::vector<SuiteResult>& results);

} // namespace ncsnaf::verify
