#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rankbound {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitSolver = 2,
  kExitInput = 3,
};

// CSV header shared by `bound --csv` and `sweep`.
inline constexpr const char* kCsvHeader = "param1,param2,kind,t,variants,value,status";

// Entry point of the `rankbound` tool; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankbound
