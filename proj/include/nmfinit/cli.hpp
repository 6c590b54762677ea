#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nmfinit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitUsageError = 2;

/// Entry point of the `nmfinit` command (rank | run | compare | svd).
/// `args` excludes the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace nmfinit
