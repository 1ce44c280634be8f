#pragma once

#include <iosfwd>
#include <string>

namespace linresp::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

[[nodiscard]] std::string version();

/// Runs one subcommand. Results go to `out` (or the files named by the flags),
/// error records to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace linresp::cli
