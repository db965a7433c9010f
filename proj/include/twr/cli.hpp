#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "twr/config.hpp"

namespace twr::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

struct Options {
    std::string config_path;  ///< empty: built-in defaults
    std::optional<std::uint64_t> seed;
    std::string out_path;
    bool quiet = false;
};

/// Subcommands. `report` receives the human-readable report, `diag` receives
/// warnings. CSV goes to files, or to `report` when no path is configured.
int cmd_simulate(const RunConfig& cfg, const Options& opts, std::ostream& report,
                 std::ostream& diag);
int cmd_sweep(const RunConfig& cfg, const Options& opts, std::ostream& report, std::ostream& diag);
int cmd_optimize(const RunConfig& cfg, const Options& opts, std::ostream& report,
                 std::ostream& diag);
int cmd_crlb(const RunConfig& cfg, const Options& opts, std::ostream& report, std::ostream& diag);

/// Full front end: argument parsing, config loading, dispatch and mapping of
/// errors to exit codes (2 config/usage, 1 runtime).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twr::cli
