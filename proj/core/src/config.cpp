#include "oulab/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace oulab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_token(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.' && c != '-')
      return false;
  return true;
}

void parse_keyvalue(const std::string& text, std::map<std::string, std::string>& kv) {
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw config_error("unterminated section header", lineno);
      section = trim(t.substr(1, t.size() - 2));
      if (!valid_token(section)) throw config_error("invalid section name '" + section + "'", lineno);
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) throw config_error("expected 'key = value'", lineno);
    const std::string key = trim(t.substr(0, eq));
    if (!valid_token(key)) throw config_error("invalid key '" + key + "'", lineno);
    kv[section.empty() ? key : section + "." + key] = trim(t.substr(eq + 1));
  }
}

std::string scalar_to_string(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_null()) return "";
  return j.dump();
}

void flatten_json(const nlohmann::json& j, const std::string& prefix,
                  std::map<std::string, std::string>& kv) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!valid_token(it.key())) throw config_error("invalid key '" + it.key() + "'");
      flatten_json(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), kv);
    }
    return;
  }
  if (j.is_array()) {
    std::string joined;
    for (const auto& el : j) {
      if (el.is_structured()) throw config_error("nested arrays/objects unsupported under '" + prefix + "'");
      if (!joined.empty()) joined += ", ";
      joined += scalar_to_string(el);
    }
    kv[prefix] = joined;
    return;
  }
  kv[prefix] = scalar_to_string(j);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  ExperimentConfig cfg;
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      // byte offset -> line for the position report
      std::size_t lineno = 1;
      for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
        if (text[i] == '\n') ++lineno;
      throw config_error(e.what(), lineno);
    }
    if (!j.is_object()) throw config_error("top-level JSON must be an object", 1);
    flatten_json(j, "", cfg.kv_);
    return cfg;
  }
  parse_keyvalue(text, cfg.kv_);
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string t = trim(it->second);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw config_error("key '" + key + "': not a number: '" + it->second + "'");
  return v;
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string t = trim(it->second);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 0);
  if (t.empty() || end != t.c_str() + t.size())
    throw config_error("key '" + key + "': not an unsigned integer: '" + it->second + "'");
  return v;
}

std::size_t ExperimentConfig::get_size(const std::string& key, std::size_t fallback) const {
  return static_cast<std::size_t>(get_u64(key, fallback));
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string t = trim(it->second);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw config_error("key '" + key + "': not a boolean: '" + it->second + "'");
}

Vec ExperimentConfig::get_double_list(const std::string& key, const Vec& fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  Vec out;
  std::string token;
  std::istringstream in(it->second);
  while (std::getline(in, token, ',')) {
    const std::string t = trim(token);
    if (t.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
      throw config_error("key '" + key + "': not a number list: '" + it->second + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace oulab
