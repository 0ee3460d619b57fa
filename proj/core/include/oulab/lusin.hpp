#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "oulab/common.hpp"
#include "oulab/hermite_function.hpp"
#include "oulab/sampling.hpp"
#include "oulab/semigroup.hpp"

namespace oulab {

// Logarithmic time grid for suprema over t. Refinement inserts geometric
// midpoints, so a refined grid is a superset of the original: grid-restricted
// suprema are monotone under refinement by construction.
struct TimeGrid {
  Vec points;

  static TimeGrid standard() { return {log_grid(1e-4, 1e2, 64)}; }
  TimeGrid refined() const {
    TimeGrid out;
    out.points.reserve(points.size() * 2);
    for (std::size_t k = 0; k < points.size(); ++k) {
      out.points.push_back(points[k]);
      if (k + 1 < points.size()) out.points.push_back(std::sqrt(points[k] * points[k + 1]));
    }
    return out;
  }
};

enum class LusinVariant {
  DaPrato1,  // g = sup_t P_t|grad f|        + sup_t |P_t sqrt(I-L) f|   (ambient distance)
  Wiener2,   // g = sup_t T_t|D_H f|_H       + sup_t |T_t sqrt(I-L) f|   (Cameron-Martin distance)
  Rcd3       // g = (sup_t T_t|grad f|^a)^{1/a} + sup_t |T_t sqrt(-L) f| (standard space, a in (1,2))
};

struct LusinConfig {
  LusinVariant variant = LusinVariant::DaPrato1;
  double alpha = 1.5;       // Rcd3 power
  unsigned m_per_dim = 0;   // 0 = auto; 1D gradient terms use exact integration where possible
  bool grid_only_sup = true;  // false adds a golden-section polish around interior grid maxima
};

// The maximal-function weight g for one f (scalar or vector of components),
// cached on a sample cloud and evaluable at arbitrary points.
class LusinWeight {
 public:
  LusinWeight(LusinConfig cfg, std::vector<HermiteFunction> components, const SampleCloud& cloud,
              TimeGrid grid);

  const LusinConfig& config() const { return cfg_; }
  const TimeGrid& grid() const { return grid_; }
  const SemigroupKind& base_kind() const { return kind_; }
  const std::vector<HermiteFunction>& components() const { return fs_; }
  const SampleCloud& cloud() const { return *cloud_; }
  bool cm_distance() const { return cfg_.variant == LusinVariant::Wiener2; }

  // Cached values on the cloud.
  const Vec& values() const { return g_total_; }
  const Vec& grad_term() const { return g_max_; }
  const Vec& frac_term() const { return g_frac_; }

  // f(x) as a vector across components; cached per cloud point.
  Vec f_at(std::size_t i) const;
  Vec f_eval(const double* x) const;

  // Weight at an arbitrary point (same machinery as the cached build).
  double eval_at(const double* x) const;
  double grad_term_at(const double* x) const;
  double frac_term_at(const double* x) const;

 private:
  LusinConfig cfg_;
  std::vector<HermiteFunction> fs_;
  std::vector<std::vector<HermiteFunction>> partials_;  // per component
  std::vector<HermiteFunction> fracs_;                  // per component
  SemigroupKind kind_;
  TimeGrid grid_;
  const SampleCloud* cloud_;
  double grad_limit_infty_ = 0.0;  // t -> inf value of the gradient sup term
  Vec frac_means_;                 // per component; t -> inf of the frac term
  Vec g_max_, g_frac_, g_total_;
  Vec f_cache_;  // n x components

  double grad_field(const double* y) const;  // HS gradient norm (power applied by caller)
  double mehler_grad_field(double t, const double* x) const;
  double sup_over_grid(const std::function<double(double)>& val, double limit0,
                       double limit_inf) const;
};

LusinWeight build_weight(const LusinConfig& cfg, std::vector<HermiteFunction> components,
                         const SampleCloud& cloud, const TimeGrid& grid = TimeGrid::standard());
LusinWeight build_weight(const LusinConfig& cfg, const HermiteFunction& f, const SampleCloud& cloud,
                         const TimeGrid& grid = TimeGrid::standard());

// A probe pair: two cloud indices, or a cloud index plus an explicit offset
// partner y (the "near pair" construction y = x + delta * u).
struct PointPair {
  std::size_t i = 0;
  std::size_t j = 0;
  bool has_offset = false;
  Vec y;
};

// Deterministic pair sampling: mostly independent index pairs, plus a
// near-pair fraction at log-uniform distances delta in [1e-3, 1] (unit
// directions ambient, or Cameron-Martin unit for cm_geometry).
std::vector<PointPair> sample_pairs(const SampleCloud& cloud, std::size_t count, std::uint64_t seed,
                                    double near_fraction = 0.02, bool cm_geometry = false,
                                    const GaussianSpace* space = nullptr);

struct ProbeReport {
  std::size_t pair_count = 0;
  std::size_t skipped = 0;  // dist < 1e-10 or g(x)+g(y) < 1e-12
  double max_ratio = 0.0;
  std::size_t argmax_pair = 0;
  Vec bin_edges;   // 21 edges, 20 equal bins on [0, max_ratio]
  std::vector<std::size_t> histogram;
  double constant_estimate = 0.0;  // == max_ratio
  double bootstrap_lo = 0.0;       // 5% / 95% bootstrap quantiles of the max
  double bootstrap_hi = 0.0;
};

// ratio = |f(x)-f(y)|_E / (dist(x,y) * (g(x)+g(y))), dist ambient or CM per
// the weight's variant.
ProbeReport lipschitz_probe(const LusinWeight& weight, const std::vector<PointPair>& pairs,
                            std::uint64_t bootstrap_seed = 0xb007ULL);

// Exhaustive max over all cloud pairs; d <= 2 and n <= 2000 enforced.
double brute_force_best_constant(const LusinWeight& weight);

}  // namespace oulab
