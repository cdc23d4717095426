#pragma once

#include <string>
#include <vector>

namespace insulopt::cli {

/// Executes one command given the arguments after the program name (the same
/// strings main() receives). Returns 0 on success, 1 when a solve or other
/// runtime computation fails, 2 on usage errors (unknown flags, malformed
/// values, unreadable inputs).
int run(const std::vector<std::string>& args);

}  // namespace insulopt::cli
