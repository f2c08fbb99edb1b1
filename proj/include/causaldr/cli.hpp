#pragma once

#include <string>

#include "causaldr/config.hpp"

// Subcommand drivers. Exit codes: 0 success, 1 usage error, 2 runtime
// failure.
namespace causaldr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// Runs the scenario grid and writes summary.csv, replicates.csv,
// summary.md, and resolved-config.snapshot into the output directory.
// Refuses to reuse a directory whose snapshot carries a different seed
// unless force is set.
int cmd_simulate(const config::RunConfig& cfg);

// Runs the CSV analysis pipeline and writes analysis.csv, forest.csv, and
// resolved-config.snapshot.
int cmd_analyze(const config::RunConfig& cfg);

// Rebuilds summary.md and writes boxplots.csv from an existing results
// directory.
int cmd_report(const std::string& results_dir);

// Full argv entry point (CLI11 parsing plus error-to-exit-code mapping).
int run(int argc, const char* const* argv);

}  // namespace causaldr::cli
