#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace freqprior::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand (synth, extract, fit, bench, forecast). `args`
/// excludes the program name. Diagnostics go to `err` as a single
/// "error[Tag]: message" line.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace freqprior::cli
