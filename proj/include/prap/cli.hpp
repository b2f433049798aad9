#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prap {

inline constexpr const char* kToolVersion = "0.1.0";

/// Entry point shared by the `prap` binary and the tests. `args` excludes the
/// program name. Returns 0 on success, 1 on solver/runtime errors or failed
/// assertions, 2 on invalid flags.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "2,4,10", "2:10" or "2:10:2" (inclusive ranges), or a mix separated by commas.
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace prap
