#pragma once

#include "fpme/cli/config.hpp"

#include <string>

namespace fpme::cli {

enum ExitCode : int {
    kSuccess = 0,
    kConfigError = 2,
    kSolverFailure = 3,
    kInvariantViolation = 4,
};

int cmd_ground_state(const RunConfig& config);
int cmd_evolve(const RunConfig& config);
int cmd_selection(const RunConfig& config);
int cmd_landscape(const RunConfig& config);
int cmd_check(const RunConfig& config);

/// Dispatches by subcommand name and maps exceptions to exit codes,
/// printing the message to stderr.
int run_command(const std::string& name, const RunConfig& config);

}  // namespace fpme::cli
