#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bivruin/risk_model.hpp"

namespace bivruin {

// One validation check: the computed values, the reference they are held
// against and whether they landed inside the stated tolerance.
struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;       // human-readable summary
    std::string values_json;  // machine-readable values, one JSON object
    double runtime_seconds = 0.0;
};

struct ValidationOptions {
    std::uint64_t seed = 42;
    int workers = 0;
    // Fault-injection knob for the self-test of the suite: scales the
    // left prime constant inside the closed-form consistency check. 1 is the
    // honest value; anything else must make that check fail.
    double p_l_prime_scale = 1.0;
};

// The benchmark model: unit premiums, deterministic unit claims with rates
// 0.5 / 0.9 and transfer costs 1.1 both ways.
CoverageModel headline_model();

// Runs the full validation suite in order; on_check fires after each check.
std::vector<CheckResult> run_validation(const ValidationOptions& options,
                                        const std::function<void(const CheckResult&)>& on_check = {});

// Runs only the named checks from the same registry.
std::vector<CheckResult> run_validation_subset(const ValidationOptions& options,
                                               const std::vector<std::string>& names,
                                               const std::function<void(const CheckResult&)>& on_check = {});

}  // namespace bivruin
