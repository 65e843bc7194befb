#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mdpf {

inline constexpr const char* kVersion = "1.0.0";

/// Exit codes: 0 success, 1 validation error (bad arguments, config or input
/// files), 2 runtime error (numerical failure, model breakdown, I/O).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mdpf
