#pragma once

#include <string>
#include <vector>

namespace aefs {

/// Entry point of the `aefs` command-line tool. Returns the process exit code;
/// failures print a one-line diagnostic to stderr.
int cli_main(int argc, const char* const* argv);

/// Convenience overload; `args` excludes the program name.
int cli_main(const std::vector<std::string>& args);

}  // namespace aefs
