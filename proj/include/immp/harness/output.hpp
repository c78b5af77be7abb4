#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "immp/harness/config.hpp"

namespace immp {

/// One row of the long-format plot data.
struct Record {
  std::string group;
  double x = 0.0;
  double y = 0.0;
  double yerr = 0.0;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<Record> records;
  std::vector<Check> checks;
  nlohmann::json summary = nlohmann::json::object();
  long steps_total = 0;
  long accepted_total = 0;

  bool all_passed() const;
};

std::string commit_id();

/// CSV text: '#' header lines (config echo, seed, commit, acceptance
/// statistics) then experiment,group,x,y,yerr rows. Deterministic.
std::string format_csv(const ExperimentResult& r, const RunConfig& cfg);
/// JSON summary including checks and the wall time.
nlohmann::json format_summary(const ExperimentResult& r, const RunConfig& cfg, double wall_seconds);

/// Writes <dir>/<experiment>.csv and <dir>/<experiment>.json.
void write_outputs(const ExperimentResult& r, const RunConfig& cfg, const std::string& dir, double wall_seconds);

}  // namespace immp
