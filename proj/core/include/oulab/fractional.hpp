#pragma once

#include <cstddef>
#include <vector>

#include "oulab/common.hpp"
#include "oulab/hermite_function.hpp"
#include "oulab/sampling.hpp"
#include "oulab/semigroup.hpp"

namespace oulab {

// Subordination kernel
//   K(s,t) = pi^{-1/2} ( chi_{s>t} (s-t)^{-1/2} - chi_{s>0} s^{-1/2} ),
// negative on (0,t), positive on (t,inf), total variation (4/sqrt(pi)) sqrt(t).
double kernel_K(double s, double t);

struct KernelQuadratureConfig {
  double tolerance = 1e-12;    // per-piece adaptive target
  unsigned max_subdivisions = 12;
  double tail_time = 50.0;     // integrate to S = t + max(tail, tail/decay)
};

struct KernelIntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;  // quadrature + analytic tail remainder
};

// int_0^inf |K(s,t)| ds. The inverse-square-root singularities at s=0 and
// s=t are removed exactly by u = sqrt(s) / u = sqrt(s-t); the far tail is a
// closed-form antiderivative.
KernelIntegralResult kernel_abs_integral(double t, const KernelQuadratureConfig& cfg = {});

struct ScalarIdentityResult {
  double lhs = 0.0;    // e^{-bt} - 1
  double rhs = 0.0;    // int K(s,t) sqrt(b) e^{-bs} ds
  double gap = 0.0;
  // Pure-decay identity e^{-bt} = pi^{-1/2} int_t^inf (s-t)^{-1/2} sqrt(b) e^{-bs} ds (b > 0):
  double decay_lhs = 0.0;
  double decay_rhs = 0.0;
  double decay_gap = 0.0;
  double error_estimate = 0.0;
};

ScalarIdentityResult scalar_identity_check(double b, double t, const KernelQuadratureConfig& cfg = {});

// Square root of the (shifted) generator in spectral form: multiplier
// sqrt(shift + mu(alpha)). shift = 0 is sqrt(-L), shift = 1 is sqrt(I - L)
// relative to the kind's own generator.
struct FracOperator {
  SemigroupKind kind;
  int shift = 0;  // 0 or 1
};

HermiteFunction apply_frac(const FracOperator& op, const HermiteFunction& f);

struct RepresentationResult {
  double lhs = 0.0;  // (R_t f - f)(x)
  double rhs = 0.0;  // int K(s,t) (R_s sqrt(-L) f)(x) ds
  double gap = 0.0;
  double error_estimate = 0.0;
};

// Verifies R_t f - f = int_0^inf K(s,t) R_s sqrt(-L) f ds at a point, with
// -L the kind's generator (so killed kinds check the sqrt(I-L_base) form).
RepresentationResult representation_check(const SemigroupKind& kind, const HermiteFunction& f,
                                          double t, const Vec& x,
                                          const KernelQuadratureConfig& cfg = {});

struct JtReport {
  double max_ratio = 0.0;
  std::size_t argmax_point = 0;
  double argmax_time = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // sup-term below 1e-12
};

// Pointwise bound |R_t f(x) - f(x)| <= (4 sqrt(t)/sqrt(pi)) * sup_s |B_s sqrt(-L_R) f|(x)
// for killed kinds R (so sqrt(-L_R) = sqrt(I - L_base)), with B the
// corresponding non-killed semigroup. The sup is taken over sup_grid plus the
// s -> 0 and s -> inf limit values; a coarse grid only shrinks the
// denominator, i.e. makes the check stricter.
JtReport jt_bound_check(const SemigroupKind& kind, const HermiteFunction& f, const SampleCloud& cloud,
                        const Vec& times, const Vec& sup_grid);
JtReport jt_bound_check(const SemigroupKind& kind, const HermiteFunction& f, const SampleCloud& cloud,
                        const Vec& times);

struct RieszResult {
  double lhs_norm = 0.0;  // || |grad f|_* ||_p
  double rhs_norm = 0.0;  // || sqrt(I-L) f ||_p
  double ratio = 0.0;     // lhs / rhs (0 when rhs is 0)
  bool p2_checked = false;
  double p2_spectral = 0.0;   // sum mu(alpha) a_alpha^2
  double p2_dirichlet = 0.0;  // quadrature of the Dirichlet integrand
  double p2_factor = 0.0;     // spectral / Dirichlet (1 Wiener, 1/2 Da Prato)
};

// Empirical two-sided Riesz data for non-killed kinds. The gradient norm is
// ambient on the Da Prato side, Cameron-Martin on the Wiener side. At p = 2
// the exact spectral identity is evaluated alongside the quadrature Dirichlet
// form and the proportionality factor recorded, never rescaled away.
RieszResult riesz_empirical(const SemigroupKind& kind, const HermiteFunction& f, double p,
                            unsigned m_per_dim = 0);

}  // namespace oulab
