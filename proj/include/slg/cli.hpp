#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace slg {

/// Exit codes shared by every subcommand. Accuracy values never affect them.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 1;
inline constexpr int kExitUsage = 2;

/// Runs the `slg` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace slg
