#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cabletrace {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point behind the `cabletrace` binary. `args` excludes the program
/// name. Machine output goes to `out`, human messages to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cabletrace
