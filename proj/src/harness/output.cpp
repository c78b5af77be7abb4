#include "immp/harness/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "immp/errors.hpp"

#ifndef IMMP_COMMIT
#define IMMP_COMMIT "unknown"
#endif

namespace immp {

bool ExperimentResult::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string commit_id() { return IMMP_COMMIT; }

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string format_csv(const ExperimentResult& r, const RunConfig& cfg) {
  std::ostringstream os;
  os << "# experiment: " << r.experiment << "\n";
  os << "# seed: " << cfg.seed() << "\n";
  os << "# commit: " << commit_id() << "\n";
  os << "# steps: " << r.steps_total << "\n";
  os << "# accepted: " << r.accepted_total << "\n";
  if (r.steps_total > 0)
    os << "# acceptance_ratio: " << num(static_cast<double>(r.accepted_total) / static_cast<double>(r.steps_total))
       << "\n";
  // the output directory is where the file goes, not part of the run
  RunConfig shown;
  for (const auto& [section, kv] : cfg.sections())
    for (const auto& [key, value] : kv)
      if (!(section == "run" && key == "output")) shown.set(section, key, value);
  std::istringstream echo(shown.echo());
  std::string line;
  while (std::getline(echo, line)) os << "# config: " << line << "\n";
  for (const auto& c : r.checks) os << "# check: " << c.name << " " << (c.passed ? "PASS" : "FAIL") << "\n";
  os << "experiment,group,x,y,yerr\n";
  for (const auto& rec : r.records)
    os << r.experiment << "," << rec.group << "," << num(rec.x) << "," << num(rec.y) << "," << num(rec.yerr) << "\n";
  return os.str();
}

nlohmann::json format_summary(const ExperimentResult& r, const RunConfig& cfg, double wall_seconds) {
  nlohmann::json j;
  j["experiment"] = r.experiment;
  j["seed"] = cfg.seed();
  j["commit"] = commit_id();
  j["wall_time_s"] = wall_seconds;
  j["steps"] = r.steps_total;
  j["accepted"] = r.accepted_total;
  j["config"] = cfg.sections();
  j["summary"] = r.summary;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks;
  j["all_passed"] = r.all_passed();
  return j;
}

void write_outputs(const ExperimentResult& r, const RunConfig& cfg, const std::string& dir, double wall_seconds) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base = std::filesystem::path(dir) / r.experiment;
  std::ofstream csv(base.string() + ".csv");
  if (!csv) throw Error("cannot write " + base.string() + ".csv");
  csv << format_csv(r, cfg);
  std::ofstream js(base.string() + ".json");
  if (!js) throw Error("cannot write " + base.string() + ".json");
  js << format_summary(r, cfg, wall_seconds).dump(2) << "\n";
}

}  // namespace immp
