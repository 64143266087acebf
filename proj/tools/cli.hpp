#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace coalex::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitCap = 4;

/// Runs one command line (without the program name). Results go to the
/// configured output file or `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coalex::cli
