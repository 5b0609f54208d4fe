#include "config_file.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "phasesync/error.hpp"

namespace phasesync::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

nlohmann::json parse_toml_scalar(const std::string& raw, const std::string& origin) {
  const std::string v = trim(raw);
  if (v.empty()) fail(ErrorCode::bad_config, origin + ": empty value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"')
      fail(ErrorCode::bad_config, origin + ": unterminated string " + v);
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  try {
    if (v.find_first_of(".eE") == std::string::npos)
      return static_cast<std::int64_t>(std::stoll(v));
    return std::stod(v);
  } catch (...) {
    fail(ErrorCode::bad_config, origin + ": cannot parse value " + v);
  }
}

void flatten_json(const nlohmann::json& node, const std::string& prefix,
                  std::map<std::string, nlohmann::json>& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items())
      flatten_json(value, prefix.empty() ? key : prefix + "." + key, out);
  } else {
    out[prefix] = node;
  }
}

}  // namespace

ConfigMap ConfigMap::from_toml_text(const std::string& text, const std::string& origin) {
  ConfigMap config;
  config.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string table;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::bad_config, where + ": malformed table header");
      table = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::bad_config, where + ": expected key = value");
    const std::string key_local = trim(line.substr(0, eq));
    if (key_local.empty()) fail(ErrorCode::bad_config, where + ": empty key");
    const std::string key = table.empty() ? key_local : table + "." + key_local;
    const std::string value = trim(line.substr(eq + 1));
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']') fail(ErrorCode::bad_config, where + ": unterminated array");
      nlohmann::json arr = nlohmann::json::array();
      std::string body = value.substr(1, value.size() - 2);
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!trim(item).empty()) arr.push_back(parse_toml_scalar(item, where));
      config.values_[key] = arr;
    } else {
      config.values_[key] = parse_toml_scalar(value, where);
    }
  }
  return config;
}

ConfigMap ConfigMap::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::bad_config, "cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  const bool looks_json = path.size() > 5 && path.substr(path.size() - 5) == ".json";
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (looks_json || (first != std::string::npos && text[first] == '{')) {
    ConfigMap config;
    config.origin_ = path;
    try {
      flatten_json(nlohmann::json::parse(text), "", config.values_);
    } catch (const std::exception& e) {
      fail(ErrorCode::bad_config, path + ": invalid JSON (" + e.what() + ")");
    }
    return config;
  }
  return from_toml_text(text, path);
}

const nlohmann::json& ConfigMap::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorCode::bad_config, origin_ + ": missing key " + key);
  return it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_number()) fail(ErrorCode::bad_config, origin_ + ": " + key + " must be a number");
  return v.get<double>();
}

std::int64_t ConfigMap::get_int(const std::string& key, std::int64_t fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_number_integer())
    fail(ErrorCode::bad_config, origin_ + ": " + key + " must be an integer");
  return v.get<std::int64_t>();
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "on" || s == "true") return true;
    if (s == "off" || s == "false") return false;
  }
  fail(ErrorCode::bad_config, origin_ + ": " + key + " must be a boolean or on/off");
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_string()) fail(ErrorCode::bad_config, origin_ + ": " + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> ConfigMap::get_number_list(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_array()) fail(ErrorCode::bad_config, origin_ + ": " + key + " must be an array");
  std::vector<double> out;
  for (const auto& item : v) {
    if (!item.is_number())
      fail(ErrorCode::bad_config, origin_ + ": " + key + " must hold numbers");
    out.push_back(item.get<double>());
  }
  return out;
}

std::vector<std::string> ConfigMap::get_string_list(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_array()) fail(ErrorCode::bad_config, origin_ + ": " + key + " must be an array");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string())
      fail(ErrorCode::bad_config, origin_ + ": " + key + " must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace phasesync::cli
