#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace usp {

// Exit codes of run_cli.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitFailed = 2, kExitLimit = 3 };

// Runs one command; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace usp
