#pragma once

#include <filesystem>
#include <iosfwd>

#include "thrustwalk/config.hpp"
#include "thrustwalk/sim_log.hpp"

namespace thrustwalk {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFailure = 2;

/// Runs one scenario and writes log.csv, summary.json and plots/ under dir.
/// The summary is computed from the CSV as written. Throws IoError.
RunSummary run_to_directory(const ScenarioConfig& cfg, const std::filesystem::path& dir);

/// Process entry point; returns the exit status.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace thrustwalk
