#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace quotesurvey {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Environment variable naming a config file used when --config is absent.
inline constexpr const char* kConfigEnvVar = "QUOTESURVEY_CONFIG";

/// Runs one subcommand. `args` excludes the program name and starts with the
/// subcommand. Returns 0 on success, 1 on usage errors and 2 on data or I/O
/// errors. Option values are resolved as: command line, then the
/// `[subcommand]` section of the config file, then its top-level keys, then
/// built-in defaults.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace quotesurvey
