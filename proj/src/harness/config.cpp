#include "immp/harness/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <sstream>

#include "immp/errors.hpp"

namespace immp {

const std::map<std::string, std::vector<std::string>>& RunConfig::schema() {
  static const std::map<std::string, std::vector<std::string>> s{
      {"run", {"experiment", "seed", "replicas", "threads", "output", "steps", "burn_in", "thinning"}},
      {"model",
       {"type", "N", "nubar", "beta", "gamma", "interaction", "external", "continuous_cutoff", "kappa", "a1", "a2",
        "epsilon"}},
      {"integrator",
       {"dt", "newton_tol", "newton_max_iter", "tol_c", "fixman_in_forces", "metropolis", "ou_substeps", "splitting",
        "frozen_jacobian"}},
      {"penalty", {"rule", "nu", "nubar", "k"}},
      {"thermostat", {"beta", "gamma", "gamma_z"}},
      {"experiment",
       {"nu_list", "nubar_list", "N_list", "dt_list", "eps_list", "samples", "bins", "target", "horizon",
        "sample_every", "dt_scale", "mc_samples", "cfl_steps", "bisection_steps", "harmonic_control", "steps_per_point",
        "verlet_steps", "T"}},
  };
  return s;
}

namespace {

void check_key(const std::string& section, const std::string& key) {
  const auto& s = RunConfig::schema();
  auto it = s.find(section);
  if (it == s.end()) throw ConfigError("unknown config section [" + section + "]");
  if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
    throw ConfigError("unknown config key '" + key + "' in section [" + section + "]");
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  boost::property_tree::ptree pt;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  for (const auto& [section, tree] : pt) {
    if (tree.empty()) throw ConfigError("config key '" + section + "' outside of a section");
    for (const auto& [key, node] : tree) c.set(section, key, node.get_value<std::string>());
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  check_key(section, key);
  values_[section][key] = value;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
  auto it = values_.find(section);
  return it != values_.end() && it->second.count(key) > 0;
}

std::string RunConfig::get_string(const std::string& section, const std::string& key, const std::string& def) const {
  check_key(section, key);
  auto it = values_.find(section);
  if (it == values_.end()) return def;
  auto jt = it->second.find(key);
  return jt == it->second.end() ? def : jt->second;
}

double RunConfig::get_double(const std::string& section, const std::string& key, double def) const {
  check_key(section, key);
  if (!has(section, key)) return def;
  const std::string v = get_string(section, key, "");
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config value " + section + "." + key + " = '" + v + "' is not a number");
  }
}

long RunConfig::get_int(const std::string& section, const std::string& key, long def) const {
  check_key(section, key);
  if (!has(section, key)) return def;
  const double x = get_double(section, key, 0.0);
  if (x != static_cast<double>(static_cast<long>(x)))
    throw ConfigError("config value " + section + "." + key + " must be an integer");
  return static_cast<long>(x);
}

bool RunConfig::get_bool(const std::string& section, const std::string& key, bool def) const {
  check_key(section, key);
  if (!has(section, key)) return def;
  const std::string v = get_string(section, key, "");
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config value " + section + "." + key + " = '" + v + "' is not a boolean");
}

std::vector<double> RunConfig::get_list(const std::string& section, const std::string& key,
                                        const std::vector<double>& def) const {
  check_key(section, key);
  if (!has(section, key)) return def;
  const std::string v = get_string(section, key, "");
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("config list " + section + "." + key + " has a non-numeric entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("config list " + section + "." + key + " is empty");
  return out;
}

std::uint64_t RunConfig::seed() const {
  if (!has("run", "seed")) return 1;
  const std::string v = get_string("run", "seed", "1");
  try {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) throw std::invalid_argument(v);
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError("run.seed must be a non-negative integer");
  }
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  for (const auto& [section, kv] : values_) {
    os << "[" << section << "]\n";
    for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
  }
  return os.str();
}

}  // namespace immp
