#pragma once

#include <string>
#include <vector>

namespace superspine::cli {

// Exit statuses.
inline constexpr int kPass = 0;
inline constexpr int kFail = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kInfeasible = 3;

//! Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputEnv = "SUPERSPINE_OUTPUT_DIR";

/*!
 * Run the tool on `args` (argv without the program name). Subcommands:
 * solve, sample, verify, plot, rerun. Output lands in a staging directory
 * that is renamed into place only when the run completes.
 */
int run(const std::vector<std::string>& args);

}  // namespace superspine::cli
