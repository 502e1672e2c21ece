#pragma once

#include <string>
#include <vector>

namespace adsight {

// Runs one command-line invocation; `args` is argv without the program name.
// Returns the process exit code: 0 on success, 1 on a domain error (bad or
// missing input data, failed run), 2 on a usage error (unknown flag or
// subcommand, missing required argument). Kept as a library call so tests can
// drive whole pipelines in-process.
int run_cli(const std::vector<std::string>& args);

}  // namespace adsight
