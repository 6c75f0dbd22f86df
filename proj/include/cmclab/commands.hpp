#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "cmclab/config.hpp"

namespace cmclab {

struct RunOptions {
  std::string out_dir = ".";
  bool plot = false;
  std::optional<std::uint64_t> seed;
};

enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kConfigError = 2 };

/// Each command writes its files under out_dir and a summary to `log`.
/// Errors propagate as exceptions; run_command maps them to exit codes.
void cmd_expand(const Config& cfg, const RunOptions& opt, std::ostream& log);
void cmd_solve(const Config& cfg, const RunOptions& opt, std::ostream& log);
void cmd_analyze(const Config& cfg, const RunOptions& opt, std::ostream& log);
/// Returns whether the suite passed.
bool cmd_verify(const Config& cfg, const RunOptions& opt, std::ostream& log);
void cmd_exact(const Config& cfg, const RunOptions& opt, std::ostream& log);

/// Loads the config and runs `command`; messages go to `log` and `err`.
int run_command(const std::string& command, const std::string& config_path, const RunOptions& opt, std::ostream& log,
                std::ostream& err);

}  // namespace cmclab
