#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace patred::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;

/// Runs one command. `args` excludes the program name, e.g.
/// {"perturb", "--data", "d.csv", "--which", "shift2"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Expands a --config JSON object into flags: {"top_k": 9} becomes
/// "--top-k 9", a nested "redundancy" object contributes --redundancy (from
/// "kind") and its other keys as flags, arrays repeat the flag, true emits a
/// bare flag and false nothing.
std::vector<std::string> config_to_flags(const std::string& json_text);

}  // namespace patred::cli
