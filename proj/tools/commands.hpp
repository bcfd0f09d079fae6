#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace splitguard::cli {

/// Exit codes: 0 ok / clean audit, 1 I/O or parse error, 2 configuration
/// error, 3 leaky audit, 4 plan does not match manifest.
enum ExitCode : int { kOk = 0, kIoError = 1, kConfigError = 2, kLeaky = 3, kMismatch = 4 };

struct Terminal {
  bool color = false;
};

/// Runs one invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, Terminal term = {});

/// "a..b" (inclusive), "a,b,c" or a single seed. nullopt when malformed or empty.
std::optional<std::vector<std::uint64_t>> parse_seed_list(std::string_view text);

}  // namespace splitguard::cli
