#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roe::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitExtraction = 2;

/// Runs `roe <args...>` (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace roe::cli
