#pragma once

#include <ostream>

namespace krnorm {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitVerificationFailure = 2;

/// Entry point of the `krnorm` tool. Subcommands: norm, decompose, verify,
/// family dump, oracle, gen. Results go to `out` (or the --out file),
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace krnorm
