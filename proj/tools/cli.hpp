#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dspace::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInvalid = 2;

// Runs one command. `args` excludes the program name. "-" as a file name
// means `in` (for inputs) or `out` (for outputs).
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace dspace::cli
