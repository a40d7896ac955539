#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wavedens::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kAssertionFailure = 3,
  kRuntimeFailure = 4,
};

// Parses argv-style arguments (args[0] is the program name) and runs one
// subcommand. Logs go to `log`; the return value is the process exit status.
int Main(const std::vector<std::string>& args, std::ostream& log);

// FNV-1a 64-bit digest as 16 lowercase hex digits.
std::string Fnv1aHex(const std::string& bytes);

}  // namespace wavedens::cli
