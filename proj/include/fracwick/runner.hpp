#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fracwick/config.hpp"
#include "fracwick/stats.hpp"

namespace fracwick {

inline constexpr const char* kToolVersion = "0.3.0";

// Everything a suite produces, held in memory until the single final write.
struct SuiteOutput {
  std::vector<MonteCarloReport> reports;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
};

struct RunManifest {
  std::string suite;
  std::string config_hash;  // FNV-1a of the canonical config, hex
  std::string tool_version;
  std::string timestamp;    // UTC, ISO 8601
  std::vector<MonteCarloReport> verdicts;
  double wall_clock_seconds = 0.0;
  std::vector<std::string> files;

  bool all_pass() const;
  std::string to_json() const;
};

/// Runs the suite without touching the file system.
SuiteOutput compute_suite(const ExperimentConfig& cfg);

/// Runs the suite and writes report.csv, the suite's other CSVs, plots (if
/// enabled) and manifest.json into <output_dir>/<suite>/.
RunManifest run_suite(const ExperimentConfig& cfg);

}  // namespace fracwick
