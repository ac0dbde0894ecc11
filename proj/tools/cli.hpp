#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mineig::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitUsage = 3;
inline constexpr int kExitNotConverged = 4;

// args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace mineig::cli
