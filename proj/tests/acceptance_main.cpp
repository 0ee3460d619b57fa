// Acceptance gate: runs every suite at full scale and reduces the check
// records to one pass/fail line per criterion, with runtime budgets where
// the criterion carries one. Exit status 0 iff every criterion passes.
#include <chrono>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "oulab/config.hpp"
#include "oulab/suite.hpp"

namespace {

struct Criterion {
  const char* label;
  std::vector<std::string> prefixes;  // check-name prefixes that belong to it
  double budget_s;                    // 0 = no runtime budget
  std::size_t min_checks;
};

bool starts_with(const std::string& s, const std::string& p) {
  return s.size() >= p.size() && s.compare(0, p.size(), p) == 0;
}

}  // namespace

int main() {
  using namespace oulab;
  std::vector<CheckRecord> all;

  const std::vector<std::string> suites = {"kernel", "semigroup", "fractional", "lusin", "flow"};
  for (const std::string& s : suites) {
    ExperimentConfig cfg;
    cfg.set("suite", s);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      SuiteResult res = run_suite(cfg);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::printf("suite %-10s %3zu checks  %7.2f s\n", s.c_str(), res.checks.size(), secs);
      std::fflush(stdout);
      for (auto& c : res.checks) all.push_back(std::move(c));
    } catch (const std::exception& e) {
      std::printf("suite %-10s aborted: %s\n", s.c_str(), e.what());
      std::fflush(stdout);
    }
  }
  std::printf("\n");

  const std::vector<Criterion> criteria = {
      {"kernel total-variation mass (4/sqrt(pi)) sqrt(t) within 1e-6", {"kernel-mass-"}, 2.0, 5},
      {"scalar subordination identity gap < 1e-8 on the (b,t) grid", {"subordination-identity-"}, 2.0, 16},
      {"Mehler quadrature vs spectral action within 1e-6", {"mehler-vs-spectral-"}, 30.0, 2},
      {"representation of R_t f - f through the subordination kernel", {"representation-formula"}, 60.0, 1},
      {"pointwise increment bound ratio <= 1 + 1e-6 (both killed variants)", {"subordinated-increment-bound"}, 60.0, 1},
      {"gradient contraction <= 1 + 1e-8, Wiener commutation equality for linear f", {"gradient-contraction", "gradient-commutation-linear"}, 0.0, 2},
      {"two-point log-convexity with the /t exponent, sharp value recorded", {"log-convexity-interpolation"}, 0.0, 1},
      {"dimension-free Harnack comparison, alpha in {1.1, 1.5, 2}", {"harnack-dimension-free"}, 0.0, 1},
      {"p = 2 identity: spectral square norm vs Dirichlet form, 1e-10", {"riesz-p2-identity"}, 0.0, 1},
      {"Lusin-Lipschitz probes: finite, near-brute, seed-stable", {"lusin-"}, 300.0, 18},
      {"rotation trajectories: rk4 error < 1e-7 at dt = 1e-2, order >= 3.8", {"flow-rk4-"}, 0.0, 2},
      {"quantitative stability: sweep, a-priori bound, Chebyshev, monotone tail + CM and L^r modes", {"stability-"}, 300.0, 11},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const Criterion& cr = criteria[k];
    std::size_t matched = 0, bad = 0;
    double wall_ms = 0.0;
    std::vector<std::string> bad_names;
    std::string sharp_note;
    for (const CheckRecord& c : all) {
      bool mine = false;
      for (const std::string& p : cr.prefixes) mine = mine || starts_with(c.name, p);
      if (!mine) continue;
      ++matched;
      wall_ms += c.wall_ms;
      if (c.status != "pass") {
        ++bad;
        bad_names.push_back(c.name + " [" + c.status + "]");
      }
      if (cr.prefixes[0] == "log-convexity-interpolation") sharp_note = c.note;
    }
    const bool enough = matched >= cr.min_checks;
    const bool in_budget = cr.budget_s == 0.0 || wall_ms <= cr.budget_s * 1000.0;
    const bool pass = enough && bad == 0 && in_budget;
    if (!pass) ++failed;

    std::printf("[%s] %2zu. %s\n", pass ? "PASS" : "FAIL", k + 1, cr.label);
    std::printf("        %zu checks", matched);
    if (!enough) std::printf(" (expected >= %zu)", cr.min_checks);
    if (cr.budget_s > 0.0)
      std::printf(", %.2f s of %.0f s budget%s", wall_ms / 1000.0, cr.budget_s,
                  in_budget ? "" : " EXCEEDED");
    std::printf("\n");
    if (!sharp_note.empty()) std::printf("        %s\n", sharp_note.c_str());
    for (const std::string& n : bad_names) std::printf("        failing: %s\n", n.c_str());
  }

  std::printf("\nacceptance: %zu/%zu criteria passed\n", criteria.size() - std::size_t(failed),
              criteria.size());
  return failed == 0 ? 0 : 1;
}
