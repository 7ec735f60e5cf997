#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcadiff::cli {

enum ExitCode : int {
    kSuccess = 0,
    kIoError = 1,
    kInvalidArgument = 2,
    kDomainError = 3,
};

/// Runs the command line `argv` (argv[0] is the program name). Output that is not
/// redirected with --out goes to `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload for tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcadiff::cli
