#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <kinscat/state.hpp>

#include "config.hpp"

namespace kinscat::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitHypothesis = 2,
  kExitNumerical = 3,
  kExitConfig = 4,
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"penrose", "kernel",  "damp",    "scatter",
                                                 "roundtrip", "poisson", "selftest"};
  return names;
}

/// Runs one command and maps library errors to exit codes. Diagnostics go to log.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log, bool verbose = false);

/// Fixed 17-significant-digit scientific notation.
std::string csv_number(double v);

/// Header line with grid metadata, then `k_index,eta_index,re,im` rows.
void write_state_csv(const std::filesystem::path& path, const SpectralState& state);

/// Resolved config as re-parsable `key = value` lines plus commented run facts.
void write_manifest(const std::filesystem::path& path, const std::string& command, const RunConfig& cfg);

/// Embedded suite of quick exact checks; one line per check.
int run_selftest(std::ostream& log);

}  // namespace kinscat::app
