#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pinchfl::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kConfig = 2, kRuntime = 3 };

// Parses `args` (without the program name), runs one subcommand and writes
// <out>/<command>.csv and <out>/<command>.json.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pinchfl::cli
