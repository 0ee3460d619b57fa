#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oulab/config.hpp"
#include "oulab/suite.hpp"

using namespace oulab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string scrub_wall(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t at = line.find("\"wall_ms\":");
    if (at != std::string::npos) {
      std::size_t end = line.find_first_of(",}", at);
      REQUIRE(end != std::string::npos);
      line.erase(at, end - at);
    }
    out << line << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("key-value format: sections, comments, duplicates, crlf") {
  const ExperimentConfig cfg = ExperimentConfig::from_text(
      "top = 7\r\n"
      "# comment\n"
      "; also a comment\n"
      "[flow]\n"
      "cloud = 10\n"
      "cloud = 20\n"
      "eps = 1e-1, 1e-3\n");
  CHECK(cfg.get_double("top", 0.0) == 7.0);
  CHECK(cfg.get_size("flow.cloud", 0) == 20);  // last assignment wins
  const Vec eps = cfg.get_double_list("flow.eps", {});
  REQUIRE(eps.size() == 2);
  CHECK(eps[0] == 0.1);
  CHECK(eps[1] == 1e-3);
  CHECK_FALSE(cfg.has("flow.missing"));
  CHECK(cfg.get_string("flow.missing", "dflt") == "dflt");
}

TEST_CASE("key-value format reports the offending line") {
  try {
    ExperimentConfig::from_text("a = 1\nnot a key value pair\n");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2:") == 0);
  }

  CHECK_THROWS_AS(ExperimentConfig::from_text("a b = 1\n"), config_error);
  CHECK_THROWS_AS(ExperimentConfig::from_text("[open\n"), config_error);
  try {
    ExperimentConfig::from_text("ok = 1\n[bad name]\n");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("json configs flatten to dotted keys and comma lists") {
  const ExperimentConfig cfg = ExperimentConfig::from_text(
      R"({"suite": "flow",
          "flow": {"cloud": 10, "eps": [0.1, 0.01]},
          "deep": {"x": {"y": true}}})");
  CHECK(cfg.get_string("suite", "") == "flow");
  CHECK(cfg.get_size("flow.cloud", 0) == 10);
  const Vec eps = cfg.get_double_list("flow.eps", {});
  REQUIRE(eps.size() == 2);
  CHECK(eps[1] == 0.01);
  CHECK(cfg.get_bool("deep.x.y", false));
}

TEST_CASE("json parse errors carry a line position") {
  try {
    ExperimentConfig::from_text("{\n  \"a\": ,\n}");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(ExperimentConfig::from_text("[1, 2]"), config_error);  // JSON-looking INI section
}

TEST_CASE("typed getters name the key on a type mismatch") {
  ExperimentConfig cfg;
  cfg.set("suite", "flow");
  cfg.set("n", "12");
  CHECK(cfg.get_u64("n", 0) == 12);
  try {
    cfg.get_double("suite", 0.0);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("suite") != std::string::npos);
  }
  CHECK_THROWS_AS(cfg.get_bool("suite", false), config_error);
  cfg.set("list", "1, x, 3");
  CHECK_THROWS_AS(cfg.get_double_list("list", {}), config_error);
}

TEST_CASE("unknown suite names are rejected with the valid list") {
  ExperimentConfig cfg;
  cfg.set("suite", "bogus");
  try {
    run_suite(cfg);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bogus") != std::string::npos);
    CHECK(msg.find("expected one of") != std::string::npos);
  }
  CHECK_THROWS_AS(describe_suite("bogus"), config_error);
  CHECK(suite_names().size() == 6);
}

TEST_CASE("describe lists the checks of a suite without running it") {
  const std::string text = describe_suite("kernel");
  CHECK(text.find("kernel") != std::string::npos);
  CHECK(text.find("mass") != std::string::npos);
  const std::string all = describe_suite("all");
  for (const std::string& name : suite_names())
    if (name != "all") CHECK(all.find(name) != std::string::npos);
}

TEST_CASE("a shrunk kernel run produces the expected records and files") {
  ExperimentConfig cfg;
  cfg.set("suite", "kernel");
  cfg.set("kernel.times", "1");
  cfg.set("kernel.identity_b", "0, 1");
  cfg.set("kernel.identity_t", "0, 1");
  const SuiteResult res = run_suite(cfg);
  CHECK(res.suite == "kernel");
  CHECK(res.passed());
  CHECK(res.checks.size() == 5);

  const CheckRecord* mass = res.find("kernel-mass-t=1");
  REQUIRE(mass != nullptr);
  CHECK(mass->status == "pass");
  CHECK(mass->measured == doctest::Approx(2.256758334191025).epsilon(1e-9));
  CHECK(mass->tolerance == 1e-6);
  CHECK(mass->note.find("target=") == 0);

  const fs::path base = fs::temp_directory_path() / "oulab-test-out";
  const fs::path d1 = base / "run1", d2 = base / "run2";
  fs::remove_all(base);
  write_outputs(res, d1.string());
  write_outputs(run_suite(cfg), d2.string());

  CHECK(fs::exists(d1 / "result.json"));
  CHECK(fs::exists(d1 / "checks.csv"));
  CHECK(fs::exists(d1 / "kernel_mass.dat"));
  CHECK(fs::exists(d1 / "subordination_gaps.dat"));

  // identical configs give byte-identical outputs apart from wall clocks
  CHECK(scrub_wall(slurp(d1 / "result.json")) == scrub_wall(slurp(d2 / "result.json")));
  CHECK(slurp(d1 / "checks.csv") == slurp(d2 / "checks.csv"));
  CHECK(slurp(d1 / "kernel_mass.dat") == slurp(d2 / "kernel_mass.dat"));
  CHECK(slurp(d1 / "subordination_gaps.dat") == slurp(d2 / "subordination_gaps.dat"));

  const std::string csv = slurp(d1 / "checks.csv");
  CHECK(csv.find("name,status,measured,tolerance,note") == 0);
  CHECK(csv.find("kernel-mass-t=1,pass,") != std::string::npos);

  CHECK(exit_code(res) == 0);
  SuiteResult failing = res;
  failing.checks[0].status = "fail";
  CHECK(exit_code(failing) == 1);
  fs::remove_all(base);
}
