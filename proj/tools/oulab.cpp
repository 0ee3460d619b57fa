#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oulab/config.hpp"
#include "oulab/suite.hpp"

namespace {

int apply_overrides(oulab::ExperimentConfig& cfg, const std::vector<std::string>& kvs) {
  for (const std::string& kv : kvs) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "config error: --set expects key=value, got '" << kv << "'\n";
      return 2;
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return 0;
}

void print_summary(const oulab::SuiteResult& result) {
  for (const auto& c : result.checks) {
    std::printf("[%s] %s", c.status.c_str(), c.name.c_str());
    if (c.has_measured) std::printf("  measured=%.6g", c.measured);
    if (c.has_tolerance) std::printf(" tol=%.6g", c.tolerance);
    std::printf("\n");
  }
  std::printf("suite %s: %s (%zu checks)\n", result.suite.c_str(),
              result.passed() ? "PASS" : "FAIL", result.checks.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ornstein-Uhlenbeck semigroup laboratory"};
  app.require_subcommand(1);

  std::string suite = "all";
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  std::vector<std::string> overrides;

  CLI::App* run = app.add_subcommand("run", "Run a check suite and write reports");
  run->add_option("--suite", suite, "kernel, semigroup, fractional, lusin, flow, or all");
  run->add_option("--config", config_path, "Key-value or JSON config file");
  run->add_option("--out", out_dir, "Output directory (result.json, checks.csv, *.dat)");
  run->add_option("--seed", seed, "Base RNG seed override");
  run->add_option("--jobs", jobs, "Worker threads (default: OULAB_JOBS env, then hardware)");
  run->add_option("--set", overrides, "Extra config overrides, key=value");

  std::string describe_name = "all";
  CLI::App* describe = app.add_subcommand("describe", "Print what a suite checks and its knobs");
  describe->add_option("--suite", describe_name, "Suite name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (describe->parsed()) {
      std::cout << oulab::describe_suite(describe_name);
      return 0;
    }

    oulab::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = oulab::ExperimentConfig::from_file(config_path);
    if (const int rc = apply_overrides(cfg, overrides)) return rc;
    if (run->count("--suite") || !cfg.has("suite")) cfg.set("suite", suite);
    if (run->count("--seed")) cfg.set("seed", std::to_string(seed));
    if (run->count("--jobs")) setenv("OULAB_JOBS", std::to_string(jobs).c_str(), 1);

    const std::string out =
        run->count("--out") ? out_dir : cfg.get_string("out", "out");

    const oulab::SuiteResult result = oulab::run_suite(cfg);
    oulab::write_outputs(result, out);
    print_summary(result);
    return oulab::exit_code(result);
  } catch (const oulab::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
