#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace srr::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIngest = 1;    // unreadable or malformed input files
inline constexpr int kExitPipeline = 2;  // numerical or precondition failures

// Entry point shared by the `srr` executable and the tests. args[0] is the
// program name. Subcommands: srr, simulate, stats, select, min-rate.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace srr::cli
