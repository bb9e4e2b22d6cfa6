#pragma once

#include <map>
#include <string>
#include <vector>

namespace ttt {

// Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 learner failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitLearner = 3;

int run_cli(int argc, char** argv);

// Rendered --help of every subcommand, concatenated (used by the doc test).
std::string cli_help_text();

// Every long option name registered across subcommands.
std::vector<std::string> cli_all_flags();

// tritrain flag -> manifest/config key (the documented mapping).
const std::map<std::string, std::string>& tritrain_flag_config_keys();

}  // namespace ttt
