#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ossrisk::cli {

// Runs one subcommand. args excludes the program name.
// Exit status: 0 success, 1 invalid data or failed validation, 2 usage error.
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ossrisk::cli
