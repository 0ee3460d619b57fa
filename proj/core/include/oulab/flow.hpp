#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "oulab/common.hpp"
#include "oulab/gaussian_space.hpp"
#include "oulab/hermite_function.hpp"
#include "oulab/sampling.hpp"

namespace oulab {

class blowup_error : public std::runtime_error {
 public:
  explicit blowup_error(const std::string& what) : std::runtime_error(what) {}
};

enum class FlowFamily { rotation, perturbed_rotation, shear, custom };
enum class TimeModulation { constant, cosine };
enum class NormMode { ambient, cameron_martin };

// Closed-form families of time-dependent vector fields with computable
// Sobolev norm data. rotation/shear live on d = 2.
struct FlowFieldSpec {
  FlowFamily family = FlowFamily::rotation;
  GaussianSpace space = GaussianSpace::standard(2);
  double horizon = 1.0;  // T
  double omega = 1.0;    // rotation speed
  double eps = 0.0;      // perturbed_rotation: speed factor (1 + eps)
  double shear_a = 1.0;
  std::vector<HermiteFunction> components;  // custom family
  TimeModulation modulation = TimeModulation::constant;
  double mod_freq = 1.0;
  bool measure_preserving = false;  // preserves the Gaussian reference measure
  bool closed_form_flow = false;
  // Lebesgue divergence of the custom family as an expansion, built once by
  // the factory (closed-form families are divergence free).
  std::shared_ptr<const HermiteFunction> divergence_expansion;

  static FlowFieldSpec rotation_field(GaussianSpace space, double omega, double T);
  static FlowFieldSpec perturbed_rotation_field(GaussianSpace space, double omega, double eps,
                                                double T);
  static FlowFieldSpec shear_field(GaussianSpace space, double a, double T);
  static FlowFieldSpec custom_field(GaussianSpace space, std::vector<HermiteFunction> components,
                                    double T, TimeModulation mod = TimeModulation::constant,
                                    double mod_freq = 1.0);

  double modulation_factor(double t) const;
  void eval(double t, const double* x, double* out) const;
  double divergence(double t, const double* x) const;  // Lebesgue divergence
  void exact_flow(double t, const double* x, double* out) const;  // closed_form_flow only

  // Components of b_t as Hermite expansions (exact for every family).
  std::vector<HermiteFunction> as_hermite(double t) const;

  // || |b_t| ||_{L^p(m)} and || |grad b_t|_HS ||_{L^p(m)}; ambient or
  // Cameron-Martin norms on values/derivative directions.
  double field_lp_norm(double t, double p, NormMode mode, unsigned m_per_dim = 40) const;
  double grad_lp_norm(double t, double p, NormMode mode, unsigned m_per_dim = 40) const;
  // int_0^T (||b_t||_p + ||grad b_t||_p) dt by Simpson in t.
  double w1p_time_norm(double p, NormMode mode, unsigned time_points = 33) const;
};

enum class OdeScheme { RK4, Euler };

// Trajectories of dX/dt = b(t, X) from every cloud point, recorded every
// `record_stride` integration steps, plus the integrated Lebesgue divergence
// along each trajectory (the log Jacobian determinant).
struct FlowEnsemble {
  FlowFieldSpec spec;
  SampleCloud cloud;
  OdeScheme scheme = OdeScheme::RK4;
  double dt = 0.0;
  unsigned record_stride = 1;
  Vec times;                  // recorded times, times[0] = 0
  std::vector<Vec> traj;      // per recorded time: n x d, point-major
  std::vector<Vec> logdiv;    // per recorded time: n

  std::size_t n_times() const { return times.size(); }
  const double* point(std::size_t time_idx, std::size_t i) const {
    return &traj[time_idx][i * cloud.dim];
  }
};

FlowEnsemble integrate_flow(const FlowFieldSpec& spec, const SampleCloud& cloud, double dt,
                            OdeScheme scheme = OdeScheme::RK4, unsigned record_stride = 1,
                            double blowup_bound = 1e8, unsigned jobs = 0);

struct CompressibilityReport {
  double L_hat = 0.0;           // max over recorded times of the density sup
  Vec per_time_sup;             // sup_i u_t(X_t(x_i)) per recorded time
  std::size_t argmax_time = 0;
  std::size_t argmax_point = 0;
  bool boundary_warning = false;  // max attained in the thin outer tail of the cloud
};

// Push-forward density along trajectories:
//   u_t(X_t(x)) = rho(x) / (rho(X_t(x)) * exp(int_0^t div b)),
// rho the Gaussian density. Values per sample at one recorded time.
Vec pushforward_density_values(const FlowEnsemble& ens, std::size_t time_idx);

// Max of u over samples and recorded times, as an ess-sup estimate. For a
// measure-preserving family integrated with RK4 this asserts |L - 1| <= 1e-6
// (Euler drifts at O(dt) and is exempt).
CompressibilityReport compressibility_estimate(const FlowEnsemble& ens);

// L^r norm estimate of the push-forward density: ||u_t||_r^r = E_m[u_t(X_t)^{r-1}].
struct LrReport {
  double L_r = 0.0;  // sup over recorded times
  Vec per_time;
};
LrReport lr_norm_estimate(const FlowEnsemble& ens, double r);

struct FieldDistanceMode {
  bool lp = false;   // false: L1((0,T) x H); true: L1((0,T), L^p(H))
  double p = 1.0;
  NormMode norm = NormMode::ambient;
};

double field_distance(const FlowFieldSpec& b, const FlowFieldSpec& bbar,
                      const FieldDistanceMode& mode = {}, unsigned time_points = 33,
                      unsigned m_per_dim = 40);

// Phi(t) = int log(|X_t - Xbar_t| / delta + 1) dm and companions, on the
// shared recorded grid of two ensembles over the same cloud.
struct SeparationTraces {
  Vec times;
  Vec phi;
  Vec lhs;       // int |X_t - Xbar_t| ^ 1 dm, truncated at 1 per sample
  Vec max_dist;  // max_i |X_t - Xbar_t|
};
SeparationTraces separation_traces(const FlowEnsemble& a, const FlowEnsemble& b, double delta,
                                   NormMode norm_mode);
Vec phi_functional(const FlowEnsemble& a, const FlowEnsemble& b, double delta, NormMode norm_mode);

struct StabilityOptions {
  OdeScheme scheme = OdeScheme::RK4;
  unsigned record_stride = 8;
  double blowup_bound = 1e8;
  double cp_override = 0.0;   // > 0: skip the probe, use this as the inflated constant
  double cp_inflation = 2.0;
  std::size_t cp_cloud_size = 512;
  std::size_t cp_pair_count = 20000;
  std::uint64_t cp_seed = 0xc0ffeeULL;
};

struct StabilityReport {
  double delta = 0.0;     // field distance (mode per norm_mode / lr_r)
  double rhs = 0.0;       // C / |log delta| (0 when delta == 0)
  double C1 = 0.0;        // C_p (L + Lbar) ||b||_{L1 W^{1,p}} + Lbar
  double C = 0.0;         // 2 C1 + 1
  double L = 0.0, Lbar = 0.0;
  double cp_raw = 0.0, cp_used = 0.0;
  double b_w1p = 0.0;     // ||b||_{L1((0,T), W^{1,p})}
  double p = 0.0;
  double r = 0.0;         // 0 = ess-sup compressibility
  NormMode norm_mode = NormMode::ambient;
  Vec times, phi, lhs;
  double phi_max = 0.0;
  double s = 0.0;               // Chebyshev level -log(delta)/2
  double cheb_measure_bound = 0.0;   // C1 / s
  double cheb_measure_max = 0.0;     // max_t empirical m(E_s)
  double cheb_offset_bound = 0.0;    // e^s delta
  double cheb_offset_max = 0.0;      // max_t max off-E_s separation
  bool compressibility_warning = false;
  bool phi_bounded = false;
  bool main_inequality = false;
  bool chebyshev_ok = false;
  bool trivial = false;  // identical fields (delta == 0)
  bool passed() const { return phi_bounded && main_inequality && chebyshev_ok; }
};

// Quantitative stability: both flows on the shared cloud, lhs(t) =
// int |X_t - Xbar_t| /\ 1 dm against C/|log delta|, the a-priori bound
// Phi <= C1, and the Chebyshev split at s = -log(delta)/2. The Lipschitz
// constant C_p comes from the lusin probe on the components of b (raw and
// inflated values recorded), never from a hard-coded number.
StabilityReport stability_check(const FlowFieldSpec& b, const FlowFieldSpec& bbar, double p,
                                const SampleCloud& cloud, double dt,
                                NormMode norm_mode = NormMode::ambient,
                                const StabilityOptions& opts = {});

// Remark-style variant: compressibility in L^r (r in (1,inf), p >= r/(r-1)),
// field distance in L^1((0,T), L^p).
StabilityReport lr_stability_check(const FlowFieldSpec& b, const FlowFieldSpec& bbar, double r,
                                   double p, const SampleCloud& cloud, double dt,
                                   const StabilityOptions& opts = {});

}  // namespace oulab
