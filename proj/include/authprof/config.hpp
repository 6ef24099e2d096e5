#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace authprof {

/// Flat `key = value` configuration text. Lines starting with '#' and blank
/// lines are ignored. Later assignments win.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig load(const std::string& path);
  static KeyValueConfig parse(const std::vector<std::string>& lines, const std::string& origin);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> raw(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<long> get_long_list(const std::string& key, const std::vector<long>& fallback) const;

  /// Canonical serialized form (sorted keys); also what gets hashed into reports.
  std::string serialize() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace authprof
