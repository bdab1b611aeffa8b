#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sqpbs::cli {

/// Process exit codes.
enum ExitCode : int {
  kValid = 0,
  kFailure = 1,  // verify-table1 branch failure, replay mismatch
  kInvalid = 2,
  kAborted = 3,
  kConfigError = 4,
};

/// Environment variable supplying the seed when --seed is absent.
inline constexpr const char* kSeedEnv = "SQPBS_SEED";

/// Entry point for the `sqpbs` binary. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sqpbs::cli
