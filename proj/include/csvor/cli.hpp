#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace csvor {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumerical = 3 };

/// Runs one command line (program name excluded). Subcommands: synth,
/// inject, train, predict, bench, plotdata.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csvor
