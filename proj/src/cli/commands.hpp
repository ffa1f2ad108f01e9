#pragma once

#include <string>

namespace grafluid::cli {

struct RunOptions {
    std::string config_path;
    std::string out_dir = ".";
    unsigned long long seed = 0;
    int threads = 1;
};

// Exit codes of the harness.
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_numerical = 2;
inline constexpr int exit_io = 3;

/// Dispatches one subcommand (tabulate, invert, regimes, solve-hydro,
/// solve-dd, solve-wave, solve-collimation, selftest). Returns an exit code;
/// failures also leave a machine-readable error.json in the output directory.
int run_command(const std::string& name, const RunOptions& opts);

}  // namespace grafluid::cli
