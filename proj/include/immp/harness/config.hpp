#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace immp {

/// Sectioned key-value run configuration (INI syntax). Every key is checked
/// against a fixed schema; unknown sections or keys raise ConfigError.
class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  std::string experiment() const { return get_string("run", "experiment", ""); }
  std::uint64_t seed() const;
  int replicas() const { return static_cast<int>(get_int("run", "replicas", 1)); }
  unsigned threads() const { return static_cast<unsigned>(get_int("run", "threads", 1)); }
  std::string output() const { return get_string("run", "output", "out"); }

  void set(const std::string& section, const std::string& key, const std::string& value);
  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key, const std::string& def) const;
  double get_double(const std::string& section, const std::string& key, double def) const;
  long get_int(const std::string& section, const std::string& key, long def) const;
  bool get_bool(const std::string& section, const std::string& key, bool def) const;
  /// Comma-separated list of reals.
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& def) const;

  /// Canonical text form (sorted sections and keys), used for the output echo.
  std::string echo() const;
  const std::map<std::string, std::map<std::string, std::string>>& sections() const { return values_; }

  static const std::map<std::string, std::vector<std::string>>& schema();

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace immp
