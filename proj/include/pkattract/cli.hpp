#pragma once

#include <string>
#include <vector>

namespace pkattract {

/// Exit codes of run_command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Parses and runs one subcommand. args excludes the program name.
int run_command(const std::vector<std::string>& args);
int run_command(int argc, const char* const* argv);

}  // namespace pkattract
