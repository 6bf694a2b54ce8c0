#pragma once

#include <iosfwd>
#include <string>

namespace slabgreen::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Dispatches one subcommand: kernel, angular, verify, biot-savart, bg-sweep, solve, diagnose, report.
// Results go to `out` and to files under the output directory (--out-dir, else SLABGREEN_OUT, else ".");
// every subcommand also writes <name>.manifest.json there.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Version string recorded in manifests.
std::string version();

}  // namespace slabgreen::cli
