#pragma once

#include "msflow/config.hpp"
#include "msflow/simulation.hpp"

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>

namespace msflow {

struct RunResult {
  bool ok = false;
  std::string error;
  SimulationState state;
  std::size_t stability_violations = 0;
};

struct RunOptions {
  std::ostream* log = nullptr;  ///< progress messages
  std::size_t log_every = 100;
  /// Called after every step; returning false stops the run early (used by tests).
  std::function<bool(const SimulationState&)> on_step;
};

/// Runs a configuration to T, writing energy.csv, snapshots, bulk fields, junctions.txt,
/// config.json and summary.json into out_dir.
RunResult run(const RunConfig& config, const std::filesystem::path& out_dir, const RunOptions& options = {});

}  // namespace msflow
