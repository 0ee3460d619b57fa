#pragma once

#include <array>
#include <string>
#include <vector>

#include "oulab/config.hpp"

namespace oulab {

struct CheckRecord {
  std::string name;
  std::string status;  // "pass" | "fail" | "skip" | "hypothesis-violated"
  bool has_measured = false;
  double measured = 0.0;
  bool has_tolerance = false;
  double tolerance = 0.0;
  std::string note;
  double wall_ms = 0.0;

  bool failed() const { return status == "fail"; }
};

// Two-column plot data, written as <name>.dat with '#' header lines.
struct PlotData {
  std::string name;
  std::string header;
  std::vector<std::array<double, 2>> rows;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckRecord> checks;
  std::vector<PlotData> data;

  bool passed() const {
    for (const auto& c : checks)
      if (c.failed()) return false;
    return true;
  }
  const CheckRecord* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

const std::vector<std::string>& suite_names();  // kernel, semigroup, fractional, lusin, flow, all

// Runs the suite selected by cfg["suite"] with every knob at its full
// (acceptance) scale unless the config shrinks it. Checks execute in
// declaration order; all reported numerics are deterministic for a fixed
// config. Unknown suite names raise config_error with a suggestion list.
SuiteResult run_suite(const ExperimentConfig& cfg);

// Human-readable statement list and knobs for one suite.
std::string describe_suite(const std::string& name);

// result.json, checks.csv, and one .dat file per PlotData entry. Only the
// wall_ms fields of result.json vary between identical runs.
void write_outputs(const SuiteResult& result, const std::string& out_dir);

inline int exit_code(const SuiteResult& result) { return result.passed() ? 0 : 1; }

}  // namespace oulab
