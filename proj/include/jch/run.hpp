#pragma once

#include <filesystem>
#include <iosfwd>

#include "jch/config.hpp"
#include "jch/csv.hpp"

namespace jch {

inline constexpr const char* kArtifactName = "jchsim";
inline constexpr const char* kArtifactVersion = "0.1.0";

enum class Command { spectrum, evolve, leakage, sweep, compare, hopping_rate };

Command command_from_name(const std::string& name);
std::string command_name(Command cmd);

/// Execute one command: write the CSV (atomically) plus a run manifest
/// `<out>.manifest.json` carrying every resolved parameter, the seed and the
/// artifact version. Throws ConfigError / NumericalError / IoError.
void run_command(Command cmd, const RunConfig& cfg, const std::filesystem::path& out_csv,
                 std::ostream& log);

/// Map run errors to the documented process exit codes:
/// 0 success, 1 config error, 2 numerical failure, 3 I/O failure.
int run_command_exit_code(Command cmd, const RunConfig& cfg,
                          const std::filesystem::path& out_csv, std::ostream& log,
                          std::ostream& err);

}  // namespace jch
