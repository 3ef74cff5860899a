#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace crossfbm {

inline constexpr const char* kToolVersion = "0.1.0";

/// Documented exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // selftest found a failing invariant
  kExitGuard = 2,
  kExitUsage = 64,
  kExitIo = 74,
};

/// FNV-1a 64 over the canonical (sorted-key) JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// Metadata header: tool, version, command, config, config_hash, seed.
nlohmann::json run_metadata(const std::string& command, const nlohmann::json& config);

/// Full command-line entry point; args excludes the program name.
/// Files named by --output are written; "-" (the default) means `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crossfbm
