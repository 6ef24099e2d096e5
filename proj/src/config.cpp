#include "authprof/config.hpp"

#include <sstream>

#include "authprof/errors.hpp"
#include "authprof/util.hpp"

namespace authprof {

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  return parse(read_lines(path), path);
}

KeyValueConfig KeyValueConfig::parse(const std::vector<std::string>& lines, const std::string& origin) {
  KeyValueConfig cfg;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = strip(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(origin + ":" + std::to_string(i + 1) + ": expected 'key = value'");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty()) {
      throw FormatError(origin + ":" + std::to_string(i + 1) + ": empty key");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

std::optional<std::string> KeyValueConfig::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto v = raw(key);
  return v ? *v : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto v = raw(key);
  if (!v) return fallback;
  return parse_double(*v, "config key " + key);
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
  auto v = raw(key);
  if (!v) return fallback;
  return parse_long(*v, "config key " + key);
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto v = raw(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw FormatError("config key " + key + ": expected boolean, got '" + *v + "'");
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    const std::vector<double>& fallback) const {
  auto v = raw(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& tok : split_char(*v, ',')) {
    const std::string t = strip(tok);
    if (t.empty()) continue;
    out.push_back(parse_double(t, "config key " + key));
  }
  return out;
}

std::vector<long> KeyValueConfig::get_long_list(const std::string& key,
                                                const std::vector<long>& fallback) const {
  auto v = raw(key);
  if (!v) return fallback;
  std::vector<long> out;
  for (const auto& tok : split_char(*v, ',')) {
    const std::string t = strip(tok);
    if (t.empty()) continue;
    out.push_back(parse_long(t, "config key " + key));
  }
  return out;
}

std::string KeyValueConfig::serialize() const {
  std::ostringstream out;
  for (const auto& [k, v] : values_) out << k << " = " << v << "\n";
  return out.str();
}

}  // namespace authprof
