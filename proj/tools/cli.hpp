#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kuznets::cli {

/// Runs one command line (without the program name). Returns the process
/// exit code: 0 success, 1 input error, 2 numeric failure.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kuznets::cli
