#pragma once

#include <string>
#include <vector>

namespace volfit::cli {

// Runs one CLI invocation; args excludes the program name.  Returns the
// process exit code: 0 success, 1 usage error, 2 data/domain error,
// 3 numerical failure.  Diagnostics go to stderr, results to stdout or the
// file named by --out.
int run_cli(std::vector<std::string> args);

}  // namespace volfit::cli
