#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fisherlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNumericalFailure = 3;
inline constexpr int kExitSizeLimit = 4;
inline constexpr int kExitFailureRate = 5;
inline constexpr int kExitZeroPosterior = 6;

/// Runs one command line (without the program name) and returns the exit
/// code. Files go to the --out directory; `out` receives the summary and
/// `err` the diagnostics.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

}  // namespace fisherlab::cli
