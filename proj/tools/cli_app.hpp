#pragma once

#include <string>
#include <vector>

namespace ns::cli {

/// Run the command-line interface on the given arguments (program name
/// excluded). Returns the process exit status: 0 success, 2 usage error,
/// 1 runtime error. Diagnostics go to the error stream; output files are
/// written atomically (never partially).
int run(const std::vector<std::string>& args);

}  // namespace ns::cli
