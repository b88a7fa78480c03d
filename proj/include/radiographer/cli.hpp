#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace radiographer {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPipeline = 1;
inline constexpr int kExitInput = 2;

/// Entry point of the `radiographer` tool. `args` excludes the program name.
/// Returns 0 on success, 1 on pipeline errors, 2 on configuration or IO errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace radiographer
