#include "oulab/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "oulab/flow.hpp"
#include "oulab/fractional.hpp"
#include "oulab/lusin.hpp"
#include "oulab/sampling.hpp"
#include "oulab/semigroup.hpp"

namespace oulab {

namespace {

class Timer {
 public:
  Timer() : t0_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CheckRecord& add_check(SuiteResult& res, std::string name, bool pass) {
  CheckRecord c;
  c.name = std::move(name);
  c.status = pass ? "pass" : "fail";
  res.checks.push_back(std::move(c));
  return res.checks.back();
}

CheckRecord& add_measured(SuiteResult& res, std::string name, double measured, double tolerance,
                          bool pass, double wall_ms, std::string note = {}) {
  CheckRecord& c = add_check(res, std::move(name), pass);
  c.has_measured = true;
  c.measured = measured;
  c.has_tolerance = true;
  c.tolerance = tolerance;
  c.wall_ms = wall_ms;
  c.note = std::move(note);
  return c;
}

Vec random_point(const GaussianSpace& space, std::uint64_t seed, std::uint64_t stream, double scale) {
  NormalStream ns(seed, stream);
  Vec x(space.dim());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = scale * space.sqrt_lambda()[i] * ns.next();
  return x;
}

GaussianSpace palette_space(std::size_t dim, std::size_t salt) {
  static const double palette[4] = {0.5, 1.0, 1.5, 2.0};
  Vec lam(dim);
  for (std::size_t i = 0; i < dim; ++i) lam[i] = palette[(salt + i) % 4];
  return GaussianSpace(lam);
}

RealField as_field(const HermiteFunction& f) {
  return [&f](const double* x) { return f.eval(x); };
}

// ---------------------------------------------------------------- kernel ---

void run_kernel(const ExperimentConfig& cfg, SuiteResult& res) {
  const Vec times = cfg.get_double_list("kernel.times", {1e-2, 1e-1, 1.0, 10.0, 100.0});
  const double tol = cfg.get_double("kernel.mass_tolerance", 1e-6);
  PlotData mass;
  mass.name = "kernel_mass";
  mass.header = "# t   integral of |K(s,t)| ds";
  for (double t : times) {
    Timer timer;
    const KernelIntegralResult r = kernel_abs_integral(t);
    const double target = 4.0 * constants::inv_sqrt_pi * std::sqrt(t);
    add_measured(res, "kernel-mass-t=" + num(t), r.value, tol, std::abs(r.value - target) < tol,
                 timer.ms(), "target=" + g17(target));
    mass.rows.push_back({t, r.value});
  }
  res.data.push_back(std::move(mass));

  const Vec bs = cfg.get_double_list("kernel.identity_b", {0.0, 0.1, 1.0, 10.0});
  const Vec ts = cfg.get_double_list("kernel.identity_t", {0.0, 0.1, 1.0, 10.0});
  const double id_tol = cfg.get_double("kernel.identity_tolerance", 1e-8);
  PlotData gaps;
  gaps.name = "subordination_gaps";
  gaps.header = "# grid index   max(identity gap, decay identity gap)";
  std::size_t idx = 0;
  for (double b : bs)
    for (double t : ts) {
      Timer timer;
      const ScalarIdentityResult r = scalar_identity_check(b, t);
      const double gap = std::max(r.gap, r.decay_gap);
      add_measured(res, "subordination-identity-b=" + num(b) + "-t=" + num(t), gap, id_tol,
                   gap < id_tol, timer.ms());
      gaps.rows.push_back({double(idx++), gap});
    }
  res.data.push_back(std::move(gaps));
}

// ------------------------------------------------------------- semigroup ---

void run_semigroup_mehler(const ExperimentConfig& cfg, SuiteResult& res) {
  const std::size_t nf = cfg.get_size("semigroup.functions", 50);
  const std::uint64_t seed = cfg.get_u64("seed", 0xA11CEULL);
  const double tol = cfg.get_double("semigroup.mehler_tolerance", 1e-6);
  const Vec ts = log_grid(1e-2, 10.0, 5);
  SemigroupOptions opts;
  opts.m_per_dim = 8;  // exact for coordinate degree <= 6
  opts.allow_monte_carlo = false;

  double worst_p = 0.0, worst_t = 0.0;
  Timer timer;
  for (std::size_t k = 0; k < nf; ++k) {
    const std::size_t dim = 1 + k % 3;
    const unsigned deg = 1 + unsigned(k % 6);
    const GaussianSpace space = palette_space(dim, k);
    const HermiteFunction f = HermiteFunction::random(space, deg, seed + 11 * k);
    for (int side = 0; side < 2; ++side) {
      const SemigroupKind kind{side == 0 ? SemigroupVariant::DaPratoP : SemigroupVariant::WienerT,
                               space};
      double& worst = side == 0 ? worst_p : worst_t;
      for (double t : ts) {
        const HermiteFunction ft = apply_spectral(kind, f, t);
        for (std::uint64_t j = 0; j < 2; ++j) {
          const Vec x = random_point(space, seed + 13 * k + side, 101 + j, 1.0);
          const SemigroupEvalReport rep = apply_pointwise(kind, as_field(f), t, x.data(), opts);
          worst = std::max(worst, std::abs(rep.value - ft.eval(x.data())));
        }
      }
    }
  }
  const double ms = timer.ms() / 2.0;
  add_measured(res, "mehler-vs-spectral-dapratop", worst_p, tol, worst_p < tol, ms);
  add_measured(res, "mehler-vs-spectral-wienert", worst_t, tol, worst_t < tol, ms);
}

void run_semigroup_contraction(const ExperimentConfig& cfg, SuiteResult& res) {
  const std::size_t n_cfg = cfg.get_size("semigroup.contraction_configs", 1000);
  const std::uint64_t seed = cfg.get_u64("seed", 0xA11CEULL) ^ 0x6a09e667f3bcc908ULL;
  const double tol = 1.0 + cfg.get_double("semigroup.contraction_tolerance", 1e-8);
  static const double tpal[5] = {0.01, 0.1, 0.5, 1.5, 3.0};

  double worst = 0.0;
  std::size_t evaluated = 0, skipped = 0;
  Timer timer;
  PlotData ratios;
  ratios.name = "contraction_ratios";
  ratios.header = "# config index   worst ratio |grad R_t f| / (decay * R_t |grad f|)";
  for (std::size_t k = 0; k < n_cfg; ++k) {
    const std::size_t dim = 1 + (k / 2) % 3;
    const GaussianSpace space = palette_space(dim, k % 4);
    const SemigroupKind kind{k % 2 ? SemigroupVariant::WienerT : SemigroupVariant::DaPratoP, space};
    const HermiteFunction f = HermiteFunction::random(space, 1 + unsigned(k % 4), seed + k);
    const SampleCloud cloud = sample(space, 8, seed + 7919 * (k + 1));
    const ContractionReport rep = contraction_probe(kind, f, tpal[k % 5], cloud);
    worst = std::max(worst, rep.max_ratio);
    evaluated += rep.evaluated;
    skipped += rep.skipped;
    if (k < 200) ratios.rows.push_back({double(k), rep.max_ratio});
  }
  add_measured(res, "gradient-contraction", worst, tol, worst <= tol, timer.ms(),
               "evaluated=" + std::to_string(evaluated) + " skipped=" + std::to_string(skipped));
  res.data.push_back(std::move(ratios));

  // Wiener-side commutation equality for linear f: D_H T_t f = e^{-t} T_t D_H f
  // with one scalar rate in every space (the Da Prato rates are per-coordinate,
  // so only the inequality above is probed there).
  Timer timer2;
  double worst_eq = 0.0;
  const std::size_t n_lin = cfg.get_size("semigroup.linear_configs", 100);
  for (std::size_t k = 0; k < n_lin; ++k) {
    const std::size_t dim = 1 + k % 3;
    const GaussianSpace space = palette_space(dim, k % 3);
    const SemigroupKind kind{SemigroupVariant::WienerT, space};
    const HermiteFunction f = HermiteFunction::random(space, 1, seed + 31 * k + 1);
    const SampleCloud cloud = sample(space, 4, seed + 6007 * (k + 1));
    const ContractionReport rep = contraction_probe(kind, f, k % 2 ? 1.0 : 0.1, cloud);
    if (rep.evaluated > 0) worst_eq = std::max(worst_eq, std::abs(rep.max_ratio - 1.0));
  }
  const double eq_tol = cfg.get_double("semigroup.linear_tolerance", 1e-10);
  add_measured(res, "gradient-commutation-linear", worst_eq, eq_tol, worst_eq <= eq_tol, timer2.ms());
}

void run_semigroup_log_convexity(const ExperimentConfig& cfg, SuiteResult& res) {
  const std::size_t n_cfg = cfg.get_size("semigroup.log_convexity_configs", 1000);
  const std::uint64_t seed = cfg.get_u64("seed", 0xA11CEULL) ^ 0xbb67ae8584caa73bULL;
  static const double spal[3] = {0.25, 0.5, 0.75};
  static const double tpal[4] = {0.5, 1.0, 2.0, 5.0};

  double worst = 0.0;          // max lhs / rhs_t
  double sharp = std::numeric_limits<double>::infinity();  // min empirical divisor
  Timer timer;
  for (std::size_t k = 0; k < n_cfg; ++k) {
    const std::size_t dim = 1 + k % 2;
    const GaussianSpace space = palette_space(dim, k % 4);
    const SemigroupKind kind{k % 2 ? SemigroupVariant::WienerT : SemigroupVariant::DaPratoP, space};
    const HermiteFunction h = HermiteFunction::random(space, 2, seed + 17 * k);
    const HermiteFunction g = h.product(h, 4).value;  // nonnegative, exact square
    const Vec x0 = random_point(space, seed + 23 * k, 7, 0.7);
    const Vec x1 = random_point(space, seed + 23 * k, 8, 0.7);
    const double s = spal[k % 3], t = tpal[k % 4];
    const LogConvexityResult r = log_convexity_probe(kind, as_field(g), x0, x1, s, t);
    if (r.rhs_t > 0.0) worst = std::max(worst, r.lhs / r.rhs_t);
    // Empirical sharp divisor kappa: lhs = core * exp(w / (kappa t)) where
    // rhs_t = core * exp(w / t) and w = dist^2 s (1-s).
    double dsq = 0.0;
    for (std::size_t i = 0; i < x0.size(); ++i) {
      const double d = x1[i] - x0[i];
      dsq += kind.wiener_side() ? d * d / space.lambda()[i] : d * d;
    }
    const double w = dsq * s * (1.0 - s);
    const double core = r.rhs_t * std::exp(-w / t);
    if (r.lhs > core && w > 0.0) sharp = std::min(sharp, w / (t * std::log(r.lhs / core)));
  }
  std::ostringstream note;
  note << "sharp-divisor=" << g17(sharp) << " candidates: /t -> 1, /(2t) -> 2";
  add_measured(res, "log-convexity-interpolation", worst, 1.0 + 1e-10, worst <= 1.0 + 1e-10,
               timer.ms(), note.str());
}

void run_semigroup_harnack(const ExperimentConfig& cfg, SuiteResult& res) {
  const std::size_t n_cfg = cfg.get_size("semigroup.harnack_configs", 1000);
  const std::uint64_t seed = cfg.get_u64("seed", 0xA11CEULL) ^ 0x3c6ef372fe94f82bULL;
  static const double apal[3] = {1.1, 1.5, 2.0};
  static const double tpal[4] = {0.1, 0.5, 1.0, 2.0};

  double worst = 0.0;
  Timer timer;
  for (std::size_t k = 0; k < n_cfg; ++k) {
    const GaussianSpace space = GaussianSpace::standard(1 + k % 2);
    const HermiteFunction h = HermiteFunction::random(space, 2, seed + 29 * k);
    const HermiteFunction g = h.product(h, 4).value;
    const Vec x = random_point(space, seed + 37 * k, 3, 0.5);
    const Vec y = k % 4 == 3 ? x : random_point(space, seed + 37 * k, 4, 0.5);
    const HarnackResult r = harnack_probe(space, as_field(g), apal[k % 3], tpal[(k / 3) % 4], x, y);
    if (r.rhs > 0.0) worst = std::max(worst, r.lhs / r.rhs);
  }
  add_measured(res, "harnack-dimension-free", worst, 1.0 + 1e-10, worst <= 1.0 + 1e-10, timer.ms());
}

void run_semigroup(const ExperimentConfig& cfg, SuiteResult& res) {
  run_semigroup_mehler(cfg, res);
  run_semigroup_contraction(cfg, res);
  run_semigroup_log_convexity(cfg, res);
  run_semigroup_harnack(cfg, res);
}

// ------------------------------------------------------------ fractional ---

void run_fractional_representation(const ExperimentConfig& cfg, SuiteResult& res) {
  const std::size_t n_cfg = cfg.get_size("fractional.representation_count", 100);
  const std::uint64_t seed = cfg.get_u64("seed", 0xA11CEULL) ^ 0xa54ff53a5f1d36f1ULL;
  const double tol = cfg.get_double("fractional.representation_tolerance", 1e-6);
  static const SemigroupVariant variants[4] = {SemigroupVariant::DaPratoP, SemigroupVariant::WienerT,
                                               SemigroupVariant::KilledP, SemigroupVariant::KilledT};
  const Vec ts = log_grid(1e-2, 10.0, 8);

  double worst = 0.0;
  Timer timer;
  for (std::size_t k = 0; k < n_cfg; ++k) {
    const std::size_t dim = 1 + k % 3;
    const GaussianSpace space = palette_space(dim, k % 4);
    const SemigroupKind kind{variants[k % 4], space};
    const HermiteFunction f = HermiteFunction::random(space, 1 + unsigned(k % 6), seed + 41 * k);
    const Vec x = random_point(space, seed + 43 * k, 5, 1.0);
    const RepresentationResult r = representation_check(kind, f, ts[k % ts.size()], x);
    worst = std::max(worst, r.gap);
  }
  add_measured(res, "representation-formula", worst, tol, worst < tol, timer.ms());
}

void run_fractional_jt(const ExperimentConfig& cfg, SuiteResult& res) {
  const std::size_t n_points = cfg.get_size("fractional.jt_cloud", 100);
  const std::size_t n_times = cfg.get_size("fractional.jt_times", 100);
  const std::size_t n_fun = cfg.get_size("fractional.jt_functions", 5);
  const std::uint64_t seed = cfg.get_u64("seed", 0xA11CEULL) ^ 0x510e527fade682d1ULL;
  const double tol = 1.0 + cfg.get_double("fractional.jt_tolerance", 1e-6);
  const Vec times = log_grid(1e-3, 30.0, unsigned(n_times));

  Timer timer;
  double worst = 0.0;
  for (int side = 0; side < 2; ++side) {
    for (std::size_t k = 0; k < n_fun; ++k) {
      const std::size_t dim = 1 + k % 2;
      const GaussianSpace space = palette_space(dim, k % 4);
      const SemigroupKind kind{side == 0 ? SemigroupVariant::KilledP : SemigroupVariant::KilledT,
                               space};
      const HermiteFunction f = HermiteFunction::random(space, 1 + unsigned(k % 4), seed + 53 * k + side);
      const SampleCloud cloud = sample(space, n_points, seed + 59 * (k + 1) + side);
      const JtReport rep = jt_bound_check(kind, f, cloud, times);
      worst = std::max(worst, rep.max_ratio);
    }
  }
  add_measured(res, "subordinated-increment-bound", worst, tol, worst <= tol, timer.ms());
}

void run_fractional_riesz(const ExperimentConfig& cfg, SuiteResult& res) {
  const std::size_t n_fun = cfg.get_size("fractional.riesz_count", 50);
  const std::uint64_t seed = cfg.get_u64("seed", 0xA11CEULL) ^ 0x9b05688c2b3e6c1fULL;
  const double tol = cfg.get_double("fractional.riesz_tolerance", 1e-10);

  Timer timer;
  double worst = 0.0;
  for (std::size_t k = 0; k < n_fun; ++k) {
    const std::size_t dim = 1 + k % 3;
    const GaussianSpace space = palette_space(dim, k % 4);
    const bool wiener = k % 2 != 0;
    const SemigroupKind kind{wiener ? SemigroupVariant::WienerT : SemigroupVariant::DaPratoP, space};
    const HermiteFunction f = HermiteFunction::random(space, 1 + unsigned(k % 5), seed + 61 * k);
    const RieszResult r = riesz_empirical(kind, f, 2.0);
    const double factor = wiener ? 1.0 : 0.5;
    const double gap = std::abs(r.p2_spectral - factor * r.p2_dirichlet) /
                       std::max(1.0, std::abs(r.p2_spectral));
    worst = std::max(worst, gap);
  }
  add_measured(res, "riesz-p2-identity", worst, tol, worst < tol, timer.ms(),
               "factor: wiener 1, daprato 0.5 (recorded, never rescaled)");
}

void run_fractional(const ExperimentConfig& cfg, SuiteResult& res) {
  run_fractional_representation(cfg, res);
  run_fractional_jt(cfg, res);
  run_fractional_riesz(cfg, res);
}

// ----------------------------------------------------------------- lusin ---

struct LusinCase {
  std::string tag;
  LusinConfig config;
  GaussianSpace space;
  std::vector<HermiteFunction> components;
};

void run_lusin(const ExperimentConfig& cfg, SuiteResult& res) {
  const std::size_t cloud_n = cfg.get_size("lusin.cloud", 1000);
  const std::size_t pair_count = cfg.get_size("lusin.pairs", 100000);
  const std::size_t n_seeds = cfg.get_size("lusin.seeds", 5);
  const std::uint64_t seed = cfg.get_u64("seed", 0xA11CEULL) ^ 0x1f83d9abfb41bd6bULL;
  const double brute_tol = cfg.get_double("lusin.brute_tolerance", 0.05);
  const double seed_tol = cfg.get_double("lusin.seed_tolerance", 0.10);

  const GaussianSpace space1(Vec{1.3});
  const GaussianSpace space2(Vec{1.0, 0.6});
  const GaussianSpace space3 = GaussianSpace::standard(2);

  std::vector<LusinCase> cases;
  for (int v = 0; v < 3; ++v) {
    LusinConfig lc;
    lc.variant = v == 0 ? LusinVariant::DaPrato1 : v == 1 ? LusinVariant::Wiener2 : LusinVariant::Rcd3;
    lc.alpha = 1.5;
    const GaussianSpace& sp = v == 0 ? space1 : v == 1 ? space2 : space3;
    const std::string vtag = "v" + std::to_string(v + 1);
    cases.push_back({vtag + "-scalar", lc, sp,
                     {HermiteFunction::random(sp, 3, seed + 100 * (v + 1), 0.6)}});
    cases.push_back({vtag + "-vector", lc, sp,
                     {HermiteFunction::random(sp, 2, seed + 100 * (v + 1) + 1, 0.6),
                      HermiteFunction::random(sp, 2, seed + 100 * (v + 1) + 2, 0.6)}});
  }

  bool hist_done = false;
  for (const auto& cs : cases) {
    Timer timer;
    const SampleCloud cloud = sample(cs.space, cloud_n, seed + 17);
    const LusinWeight weight = build_weight(cs.config, cs.components, cloud);
    const double brute = brute_force_best_constant(weight);

    Vec maxes;
    ProbeReport main_report;
    for (std::size_t sidx = 0; sidx < std::max<std::size_t>(n_seeds, 1); ++sidx) {
      const auto pairs = sample_pairs(cloud, pair_count, seed + 1000 * (sidx + 1), 0.0);
      const ProbeReport rep = lipschitz_probe(weight, pairs);
      if (sidx == 0) main_report = rep;
      maxes.push_back(rep.max_ratio);
    }
    const double ms = timer.ms();

    const bool finite = std::isfinite(main_report.max_ratio) && main_report.max_ratio > 0.0;
    add_measured(res, "lusin-" + cs.tag + "-finite", main_report.max_ratio,
                 std::numeric_limits<double>::infinity(), finite, ms,
                 "pairs=" + std::to_string(main_report.pair_count) +
                     " skipped=" + std::to_string(main_report.skipped));

    const double agreement = brute > 0.0 ? main_report.max_ratio / brute : 0.0;
    add_measured(res, "lusin-" + cs.tag + "-brute-agreement", agreement, brute_tol,
                 brute > 0.0 && agreement >= 1.0 - brute_tol && agreement <= 1.0 + 1e-9, 0.0,
                 "brute=" + g17(brute));

    double mean = 0.0;
    for (double m : maxes) mean += m;
    mean /= double(maxes.size());
    double spread = 0.0;
    for (double m : maxes) spread = std::max(spread, std::abs(m - mean) / mean);
    add_measured(res, "lusin-" + cs.tag + "-seed-stability", spread, seed_tol, spread <= seed_tol,
                 0.0, "seeds=" + std::to_string(maxes.size()));

    if (!hist_done && cs.tag == "v2-scalar") {
      hist_done = true;
      PlotData hist;
      hist.name = "lusin_ratios";
      hist.header = "# ratio bin center   count";
      for (std::size_t b = 0; b + 1 < main_report.bin_edges.size(); ++b)
        hist.rows.push_back({0.5 * (main_report.bin_edges[b] + main_report.bin_edges[b + 1]),
                             double(main_report.histogram[b])});
      res.data.push_back(std::move(hist));
    }
  }
}

// ------------------------------------------------------------------ flow ---

void run_flow_integrator(const ExperimentConfig& cfg, SuiteResult& res) {
  const std::uint64_t seed = cfg.get_u64("seed", 0xA11CEULL) ^ 0x5be0cd19137e2179ULL;
  const GaussianSpace space = GaussianSpace::standard(2);
  const FlowFieldSpec spec = FlowFieldSpec::rotation_field(space, 1.0, 1.0);
  const SampleCloud cloud = sample(space, cfg.get_size("flow.order_cloud", 200), seed);
  const double tol = cfg.get_double("flow.rk4_tolerance", 1e-7);

  const auto max_error = [&](double dt) {
    const long long steps = std::llround(1.0 / dt);
    const FlowEnsemble ens = integrate_flow(spec, cloud, dt, OdeScheme::RK4, unsigned(steps));
    double worst = 0.0;
    Vec exact(2);
    for (std::size_t i = 0; i < cloud.n; ++i) {
      spec.exact_flow(1.0, cloud.point(i), exact.data());
      const double* got = ens.point(ens.n_times() - 1, i);
      worst = std::max(worst, std::hypot(got[0] - exact[0], got[1] - exact[1]));
    }
    return worst;
  };

  Timer timer;
  const double e_coarse = max_error(1.0 / 50.0);
  const double e_mid = max_error(1.0 / 100.0);
  const double e_fine = max_error(1.0 / 200.0);
  add_measured(res, "flow-rk4-error", e_mid, tol, e_mid < tol, timer.ms());
  const double order = std::min(std::log2(e_coarse / e_mid), std::log2(e_mid / e_fine));
  add_measured(res, "flow-rk4-order", order, 3.8, order >= 3.8, 0.0,
               "errors=" + g17(e_coarse) + "," + g17(e_mid) + "," + g17(e_fine));
}

void add_stability_check(SuiteResult& res, const std::string& name, const StabilityReport& rep,
                         double wall_ms) {
  double worst = 0.0;
  if (!rep.trivial)
    for (double l : rep.lhs) worst = std::max(worst, rep.rhs > 0.0 ? l / rep.rhs : 0.0);
  std::ostringstream note;
  note << "delta=" << g17(rep.delta) << " C1=" << g17(rep.C1) << " C=" << g17(rep.C)
       << " L=" << g17(rep.L) << " Lbar=" << g17(rep.Lbar) << " cp_raw=" << g17(rep.cp_raw)
       << " cp_used=" << g17(rep.cp_used) << " phi_max=" << g17(rep.phi_max)
       << " cheb_measure=" << g17(rep.cheb_measure_max) << "/" << g17(rep.cheb_measure_bound)
       << " cheb_offset=" << g17(rep.cheb_offset_max) << "/" << g17(rep.cheb_offset_bound);
  if (rep.compressibility_warning) note << " boundary-warning";
  add_measured(res, name, worst, 1.0, rep.passed(), wall_ms, note.str());
}

void run_flow_stability(const ExperimentConfig& cfg, SuiteResult& res) {
  const std::uint64_t seed = cfg.get_u64("seed", 0xA11CEULL) ^ 0x428a2f98d728ae22ULL;
  const std::size_t cloud_n = cfg.get_size("flow.cloud", 10000);
  const double T = 1.0;
  const double dt = cfg.get_double("flow.dt", T / 1024.0);
  const double p = cfg.get_double("flow.p", 2.0);
  const Vec eps_sweep =
      cfg.get_double_list("flow.eps_sweep", {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6});

  const GaussianSpace space = GaussianSpace::standard(2);
  const SampleCloud cloud = sample(space, cloud_n, seed);
  const FlowFieldSpec b = FlowFieldSpec::rotation_field(space, 1.0, T);

  StabilityOptions opts;
  opts.cp_seed = seed ^ 0x7137449123ef65cdULL;

  PlotData sweep_data, phi_data, lhs_data;
  sweep_data.name = "stability_sweep";
  sweep_data.header = "# eps   lhs(T)";
  phi_data.name = "stability_phi";
  phi_data.header = "# t   phi(t)";
  lhs_data.name = "stability_lhs";
  lhs_data.header = "# t   lhs(t)";

  Vec lhs_T;
  bool monotone_input = true;
  for (std::size_t k = 0; k < eps_sweep.size(); ++k) {
    const double eps = eps_sweep[k];
    const FlowFieldSpec bbar = FlowFieldSpec::perturbed_rotation_field(space, 1.0, eps, T);
    Timer timer;
    try {
      const StabilityReport rep = stability_check(b, bbar, p, cloud, dt, NormMode::ambient, opts);
      if (opts.cp_override == 0.0) opts.cp_override = rep.cp_used;  // same b for the whole sweep
      add_stability_check(res, "stability-sweep-eps=" + num(eps), rep, timer.ms());
      lhs_T.push_back(rep.lhs.back());
      sweep_data.rows.push_back({eps, rep.lhs.back()});
      if (k == std::min<std::size_t>(2, eps_sweep.size() - 1)) {
        for (std::size_t j = 0; j < rep.times.size(); ++j) {
          phi_data.rows.push_back({rep.times[j], rep.phi[j]});
          lhs_data.rows.push_back({rep.times[j], rep.lhs[j]});
        }
      }
    } catch (const hypothesis_error& e) {
      CheckRecord& c = add_check(res, "stability-sweep-eps=" + num(eps), true);
      c.status = "hypothesis-violated";
      c.note = e.what();
      c.wall_ms = timer.ms();
      monotone_input = false;
    }
  }
  if (lhs_T.size() >= 2) {
    bool monotone = monotone_input;
    for (std::size_t k = 0; k + 1 < lhs_T.size(); ++k)
      if (!(lhs_T[k + 1] < lhs_T[k])) monotone = false;
    add_check(res, "stability-sweep-lhs-monotone", monotone).note =
        "lhs(T) decreases along the eps sweep";
  }
  res.data.push_back(std::move(sweep_data));
  res.data.push_back(std::move(phi_data));
  res.data.push_back(std::move(lhs_data));

  // Cameron-Martin norm variant on an anisotropic rotation pair.
  {
    const GaussianSpace aniso(Vec{1.0, 0.5});
    const SampleCloud cloud_a = sample(aniso, cloud_n, seed + 1);
    const FlowFieldSpec ba = FlowFieldSpec::rotation_field(aniso, 0.5, T);
    StabilityOptions cm_opts;
    cm_opts.cp_seed = seed ^ 0xe9b5dba58189dbbcULL;
    for (double eps : {1e-2, 1e-4}) {
      const FlowFieldSpec bbar = FlowFieldSpec::perturbed_rotation_field(aniso, 0.5, eps, T);
      Timer timer;
      const StabilityReport rep =
          stability_check(ba, bbar, p, cloud_a, dt, NormMode::cameron_martin, cm_opts);
      if (cm_opts.cp_override == 0.0) cm_opts.cp_override = rep.cp_used;
      add_stability_check(res, "stability-cm-eps=" + num(eps), rep, timer.ms());
    }

    // L^r compressibility variant (r = 2) on shear and anisotropic rotation.
    const double r = cfg.get_double("flow.r", 2.0);
    {
      const FlowFieldSpec bs = FlowFieldSpec::shear_field(space, 0.5, T);
      const FlowFieldSpec bsbar = FlowFieldSpec::shear_field(space, 0.5 * (1.0 + 1e-2), T);
      StabilityOptions lr_opts;
      lr_opts.cp_seed = seed ^ 0x983e5152ee66dfabULL;
      Timer timer;
      const StabilityReport rep = lr_stability_check(bs, bsbar, r, std::max(p, r / (r - 1.0)),
                                                     cloud, dt, lr_opts);
      add_stability_check(res, "stability-lr-shear", rep, timer.ms());
    }
    {
      const FlowFieldSpec bbar = FlowFieldSpec::perturbed_rotation_field(aniso, 0.5, 1e-2, T);
      StabilityOptions lr_opts;
      lr_opts.cp_seed = seed ^ 0xa831c66d2db43210ULL;
      Timer timer;
      const StabilityReport rep =
          lr_stability_check(ba, bbar, r, std::max(p, r / (r - 1.0)), cloud_a, dt, lr_opts);
      add_stability_check(res, "stability-lr-anisotropic", rep, timer.ms());
    }
  }
}

void run_flow(const ExperimentConfig& cfg, SuiteResult& res) {
  run_flow_integrator(cfg, res);
  run_flow_stability(cfg, res);
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"kernel", "semigroup", "fractional",
                                                 "lusin",  "flow",      "all"};
  return names;
}

SuiteResult run_suite(const ExperimentConfig& cfg) {
  const std::string suite = cfg.get_string("suite", "all");
  SuiteResult res;
  res.suite = suite;
  if (suite == "kernel") {
    run_kernel(cfg, res);
  } else if (suite == "semigroup") {
    run_semigroup(cfg, res);
  } else if (suite == "fractional") {
    run_fractional(cfg, res);
  } else if (suite == "lusin") {
    run_lusin(cfg, res);
  } else if (suite == "flow") {
    run_flow(cfg, res);
  } else if (suite == "all") {
    run_kernel(cfg, res);
    run_semigroup(cfg, res);
    run_fractional(cfg, res);
    run_lusin(cfg, res);
    run_flow(cfg, res);
  } else {
    std::string names;
    for (const auto& n : suite_names()) names += (names.empty() ? "" : ", ") + n;
    throw config_error("unknown suite '" + suite + "'; expected one of: " + names);
  }
  return res;
}

std::string describe_suite(const std::string& name) {
  const auto known = [&](const std::string& n) {
    for (const auto& s : suite_names())
      if (s == n) return true;
    return false;
  };
  if (!known(name)) {
    std::string names;
    for (const auto& n : suite_names()) names += (names.empty() ? "" : ", ") + n;
    throw config_error("unknown suite '" + name + "'; expected one of: " + names);
  }
  std::ostringstream os;
  const auto kernel_text = [&] {
    os << "kernel: subordination kernel identities.\n"
       << "  - total-variation mass: integral of |K(s,t)| ds equals (4/sqrt(pi)) sqrt(t)\n"
       << "  - scalar identity: e^{-bt} - 1 = integral of K(s,t) sqrt(b) e^{-bs} ds\n"
       << "  - pure-decay identity for e^{-bt} against the (s-t)^{-1/2} branch\n"
       << "  knobs: kernel.times, kernel.identity_b, kernel.identity_t,"
          " kernel.mass_tolerance, kernel.identity_tolerance\n";
  };
  const auto semigroup_text = [&] {
    os << "semigroup: Ornstein-Uhlenbeck semigroup checks in both normalizations.\n"
       << "  - Mehler quadrature vs spectral action on random Hermite expansions\n"
       << "  - pointwise gradient contraction |grad R_t f| <= decay * R_t |grad f|,\n"
       << "    with commutation equality for linear f\n"
       << "  - two-point log-convexity interpolation along segments (the /t exponent\n"
       << "    asserted, the empirical sharp divisor recorded)\n"
       << "  - dimension-free Harnack inequality on the standard space\n"
       << "  knobs: semigroup.functions, semigroup.contraction_configs,"
          " semigroup.log_convexity_configs, semigroup.harnack_configs, seed\n";
  };
  const auto fractional_text = [&] {
    os << "fractional: square-root generator calculus via subordination.\n"
       << "  - representation of R_t f - f as the K(s,t)-integral of sqrt(-L) f\n"
       << "  - pointwise increment bound |R_t f - f| <= (4 sqrt(t)/sqrt(pi)) sup_s |..|\n"
       << "  - p=2 identity between the spectral square norm and the Dirichlet form\n"
       << "  knobs: fractional.representation_count, fractional.jt_functions,"
          " fractional.jt_cloud, fractional.jt_times, fractional.riesz_count, seed\n";
  };
  const auto lusin_text = [&] {
    os << "lusin: Lusin-Lipschitz maximal weights, three variants.\n"
       << "  - v1: ambient distance, invariant-measure semigroup weight\n"
       << "  - v2: Cameron-Martin distance and gradient on the unit-speed side\n"
       << "  - v3: standard-space variant with the alpha-power gradient average\n"
       << "  checks: probe max finite, agreement with the exhaustive pair max,"
          " stability across pair seeds\n"
       << "  knobs: lusin.cloud, lusin.pairs, lusin.seeds, lusin.brute_tolerance,"
          " lusin.seed_tolerance, seed\n";
  };
  const auto flow_text = [&] {
    os << "flow: regular Lagrangian flows and the quantitative stability bound.\n"
       << "  - RK4 trajectory accuracy and convergence order on the rotation family\n"
       << "  - stability sweep: lhs(t) <= C/|log delta| with C = 2 C1 + 1,\n"
       << "    C1 = C_p (L + Lbar) |b|_{L1 W^{1,p}} + Lbar, phi bounded by C1,\n"
       << "    Chebyshev split verified, lhs(T) monotone along the eps sweep\n"
       << "  - Cameron-Martin-norm variant on an anisotropic rotation pair\n"
       << "  - L^r compressibility variant (r = 2) on shear and anisotropic rotation\n"
       << "  knobs: flow.cloud, flow.dt, flow.p, flow.r, flow.eps_sweep, flow.order_cloud, seed\n";
  };
  if (name == "kernel") kernel_text();
  else if (name == "semigroup") semigroup_text();
  else if (name == "fractional") fractional_text();
  else if (name == "lusin") lusin_text();
  else if (name == "flow") flow_text();
  else {
    kernel_text();
    semigroup_text();
    fractional_text();
    lusin_text();
    flow_text();
  }
  return os.str();
}

void write_outputs(const SuiteResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  {
    std::ofstream json(fs::path(out_dir) / "result.json", std::ios::binary);
    json << "{\n  \"suite\": \"" << result.suite << "\",\n  \"passed\": "
         << (result.passed() ? "true" : "false") << ",\n  \"checks\": [\n";
    for (std::size_t i = 0; i < result.checks.size(); ++i) {
      const CheckRecord& c = result.checks[i];
      json << "    {\"name\": \"" << c.name << "\", \"status\": \"" << c.status << "\"";
      if (c.has_measured) json << ", \"measured\": " << g17(c.measured);
      if (c.has_tolerance) json << ", \"tolerance\": " << g17(c.tolerance);
      if (!c.note.empty()) json << ", \"note\": \"" << c.note << "\"";
      json << ", \"wall_ms\": " << g17(c.wall_ms);
      json << "}" << (i + 1 < result.checks.size() ? "," : "") << "\n";
    }
    json << "  ]\n}\n";
  }

  {
    std::ofstream csv(fs::path(out_dir) / "checks.csv", std::ios::binary);
    csv << "name,status,measured,tolerance,note\n";
    for (const CheckRecord& c : result.checks) {
      std::string note = c.note;
      for (char& ch : note)
        if (ch == ',') ch = ';';
      csv << c.name << "," << c.status << "," << (c.has_measured ? g17(c.measured) : "") << ","
          << (c.has_tolerance ? g17(c.tolerance) : "") << "," << note << "\n";
    }
  }

  for (const PlotData& d : result.data) {
    std::ofstream dat(fs::path(out_dir) / (d.name + ".dat"), std::ios::binary);
    if (!d.header.empty()) dat << d.header << "\n";
    for (const auto& row : d.rows) dat << g17(row[0]) << " " << g17(row[1]) << "\n";
  }
}

}  // namespace oulab
