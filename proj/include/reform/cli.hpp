#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace reform::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs the `reform` command line; `args` excludes the program name.
/// Returns 0 on success (including runs that skipped analyses with a notice),
/// 1 when an analysis or input fails, 2 on usage errors.
[[nodiscard]] auto run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int;

}  // namespace reform::cli
