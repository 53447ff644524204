#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qred::cli {

// Runs one qred invocation. `args` excludes the program name. Exit codes:
// 0 success / true, 1 false / violation, 2 usage or input error.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace qred::cli
