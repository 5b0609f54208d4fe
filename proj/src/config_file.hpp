#pragma once

#include <map>
#include <string>

#include <json.hpp>

namespace phasesync::cli {

// Flat key -> value view over a config file. JSON files are flattened with
// dotted keys ({"band":{"low":0.03}} -> "band.low"); TOML files are parsed
// by a small subset reader: [table] headers, key = value lines, strings,
// numbers, booleans and one-level arrays. That subset covers every key this
// tool defines.
class ConfigMap {
 public:
  static ConfigMap from_file(const std::string& path);
  static ConfigMap from_toml_text(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const nlohmann::json& at(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_number_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  const std::map<std::string, nlohmann::json>& raw() const { return values_; }

 private:
  std::map<std::string, nlohmann::json> values_;
  std::string origin_;
};

}  // namespace phasesync::cli
