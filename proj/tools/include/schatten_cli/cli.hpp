#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace schatten::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kNumeric = 3,
    kBudgetExhausted = 4,
};

/// Environment variable naming the directory for relative and default output paths.
inline constexpr const char* kOutDirEnv = "SCHATTEN_OUT_DIR";

/// Runs one subcommand. `args` excludes the program name. Results go to
/// `out`; failures produce a single diagnostic line on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace schatten::cli
