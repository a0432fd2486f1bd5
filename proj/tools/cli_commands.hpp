#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace buyback::cli {

inline constexpr const char *kToolName = "buyback";
inline constexpr const char *kToolVersion = "0.1.0";

/// Runs one CLI invocation. `args` excludes the program name. Returns the
/// process exit code; on failure a single `error: <kind>: <message>` line is
/// written to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace buyback::cli
