#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hnp::cli {

/// Exit codes shared by every command.
enum Exit : int { kOk = 0, kFails = 1, kUsage = 2, kResource = 3 };

/// Runs the tool with args[0] as the program name. Reports go to `out`,
/// diagnostics and the run manifest (unless --manifest is given) to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace hnp::cli
