#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hkl::cli {

enum ExitCode { kSuccess = 0, kModelError = 1, kUsageError = 2 };

/// Runs one `hkl` invocation. `args` excludes the program name. `tty`
/// enables colored diagnostics unless HKL_COLOR overrides it.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
            bool tty = false);

}  // namespace hkl::cli
