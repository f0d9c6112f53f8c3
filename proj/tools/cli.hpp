#pragma once

#include <iosfwd>

namespace qst::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the `qst` command line. `out` receives data written to "-", `err`
/// diagnostics and, for `spectrum` without --report, the class report.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qst::cli
