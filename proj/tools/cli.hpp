#pragma once

#include <string>
#include <vector>

namespace fdi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;

// Entry point of the `fdi` command; returns the process exit code.
int run_cli(int argc, char** argv);

// Same, with the arguments after the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace fdi::cli
