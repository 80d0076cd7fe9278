#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace strokeforge {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;    // unreadable files, bad sizes, bad flags
inline constexpr int kExitBackend = 3;  // perceptual service failure

// Entry point of the `strokeforge` tool; args excludes the program name.
// Subcommands: sketch, serve, eval, ablate.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace strokeforge
