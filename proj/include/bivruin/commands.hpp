#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bivruin/config.hpp"
#include "bivruin/validation.hpp"

namespace bivruin::cli {

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out_dir;  // flag beats BIVRUIN_OUT beats config
};

ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOptions& opt);

// Every command produces named files plus a short stdout summary; keeping the
// content in memory makes the commands directly testable and the determinism
// guarantee (same seed, same bytes) checkable.
struct CommandOutput {
    std::vector<std::pair<std::string, std::string>> files;  // name -> content
    std::string summary;
};

CommandOutput run_simulate(const ExperimentConfig& cfg);
CommandOutput run_wh(const ExperimentConfig& cfg);
CommandOutput run_transform(const ExperimentConfig& cfg);
CommandOutput run_reproduce(const ExperimentConfig& cfg);

// Writes files into dir (created if needed) and prints the summary.
void emit(const CommandOutput& out, const std::string& dir);

int cmd_simulate(const ExperimentConfig& cfg);
int cmd_wh(const ExperimentConfig& cfg);
int cmd_transform(const ExperimentConfig& cfg);
int cmd_reproduce(const ExperimentConfig& cfg);
// Runs the validation suite, writes validation_report.json under dir and
// prints one line per check; nonzero exit when any check fails.
int cmd_validate(const ValidationOptions& options, const std::string& dir);

std::string validation_report_json(const std::vector<CheckResult>& results);

}  // namespace bivruin::cli
