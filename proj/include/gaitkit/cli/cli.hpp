#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gaitkit::cli {

/// Runs one command line (args[0] is the program name). Failures print
/// `error: <code>: <detail>` to `err` and return 1 (usage), 2 (data) or 3 (I/O).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gaitkit::cli
