#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "oulab/common.hpp"

namespace oulab {

class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  std::size_t line() const { return line_; }  // 1-based; 0 = no position

 private:
  std::size_t line_;
};

// Flat dotted-key configuration table. Accepts the key-value format
// ([section] headers, key = value lines, '#'/';' comment lines) or JSON
// (objects flatten to dotted keys, arrays of scalars to comma lists).
class ExperimentConfig {
 public:
  ExperimentConfig() = default;

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_text(const std::string& text);  // auto-detects JSON

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  void set(const std::string& key, std::string value) { kv_[key] = std::move(value); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  Vec get_double_list(const std::string& key, const Vec& fallback) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace oulab
