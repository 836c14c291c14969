#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace koszul {

/// Runs one CLI invocation (args exclude the program name).
/// Exit codes: 0 success; 1 verdict differs from --expect; 2 usage error;
/// 3 the model failed to load or validate.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace koszul
