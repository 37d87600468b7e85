#pragma once

#include <string>
#include <vector>

namespace hfts::cli {

/// Runs the command-line front end. Exit status: 0 on success, 2 for
/// configuration errors, 3 for data errors, 4 for numeric errors.
int run(int argc, const char* const* argv);

/// Same, on pre-split arguments (excluding the program name).
int run(const std::vector<std::string>& args);

}  // namespace hfts::cli
