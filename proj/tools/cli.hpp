#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gld::cli {

/// Runs the command line. Returns 0 on success, 1 on usage errors and 2 on
/// numeric failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gld::cli
