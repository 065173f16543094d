#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qinu {

/// Runs one CLI command. args excludes the program name. Exit codes: 0 on
/// success, 1 on usage errors, 2 on data errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qinu
