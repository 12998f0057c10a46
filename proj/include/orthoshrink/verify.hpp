#pragma once

#include "orthoshrink/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace orthoshrink {

// Self-verification suite: every analytic derivative and risk formula checked
// against an independent route (finite differences, explicit matrix products,
// closed forms, or an equivalent formula derived separately).

struct CheckResult {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyConfig {
    std::vector<ProblemDims> dims_list{{10, 3}, {8, 5}};
    int trials = 100;
    std::uint64_t seed = 42;
    /// Test hook: name of a check whose result is corrupted so it must fail.
    std::string corrupt;
};

std::vector<CheckResult> run_verify(const VerifyConfig& config);

/// Names accepted by VerifyConfig::corrupt, in report order.
std::vector<std::string> verify_check_names();

}  // namespace orthoshrink
