#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace relaytune::cli {

/// Parses `args` (without the program name), runs the subcommand, prints the
/// report and returns the process exit code.
int run_app(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace relaytune::cli
