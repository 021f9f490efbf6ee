#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace optpred::cli {

/// Runs the command line `args` (without the program name). Returns the exit
/// code: 0 success, 1 usage error, 2 numerical failure, 3 comparison failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Default output directory: $OPTPRED_OUTPUT_DIR, else ./optpred_out.
std::string default_output_dir();

}  // namespace optpred::cli
