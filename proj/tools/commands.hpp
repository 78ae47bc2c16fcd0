#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kgeval::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

// Entry point shared by the kgeval binary and the CLI tests. `args` excludes
// the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kgeval::cli
