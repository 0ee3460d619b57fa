#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "oulab/common.hpp"
#include "oulab/gaussian_space.hpp"
#include "oulab/hermite_function.hpp"
#include "oulab/multi_index.hpp"
#include "oulab/sampling.hpp"

namespace oulab {

// Black-box scalar field on R^d, evaluated only at quadrature/sample nodes.
using RealField = std::function<double(const double*)>;

enum class SemigroupVariant { DaPratoP, WienerT, KilledP, KilledT };

// An Ornstein-Uhlenbeck semigroup on a Gaussian space. Two normalizations:
//   DaPratoP: drift A = -Q^{-1}/2, invariant measure N_Q, eigenvalue of
//             H_alpha is sum_i alpha_i/(2 lambda_i);
//   WienerT:  unit-speed normalization, eigenvalue |alpha|.
// Killed variants are e^{-t} times the base semigroup, i.e. generator L - I;
// spectrally a +1 shift of the multiplier (no e^{-t} post-factor, which would
// cancel badly at large t).
struct SemigroupKind {
  SemigroupVariant variant;
  GaussianSpace space;

  bool killed() const {
    return variant == SemigroupVariant::KilledP || variant == SemigroupVariant::KilledT;
  }
  bool wiener_side() const {
    return variant == SemigroupVariant::WienerT || variant == SemigroupVariant::KilledT;
  }
  SemigroupVariant base_variant() const {
    return wiener_side() ? SemigroupVariant::WienerT : SemigroupVariant::DaPratoP;
  }
  SemigroupKind base() const { return {base_variant(), space}; }

  // Spectral multiplier mu(alpha): R_t H_alpha = e^{-mu(alpha) t} H_alpha.
  double mu(const MultiIndex& alpha) const {
    double m = 0.0;
    if (wiener_side()) {
      m = double(alpha.order());
    } else {
      for (std::size_t i = 0; i < space.dim(); ++i) m += double(alpha[i]) / (2.0 * space.lambda()[i]);
    }
    return killed() ? m + 1.0 : m;
  }

  // Smallest nonzero multiplier over |alpha| >= 1 (spectral gap of the base
  // part); used for quadrature tail cutoffs.
  double mu_gap() const {
    return wiener_side() ? 1.0 : 1.0 / (2.0 * space.lambda_max());
  }
};

enum class EvalMethod { spectral, quadrature, monte_carlo };

struct SemigroupEvalReport {
  double value = 0.0;
  EvalMethod method = EvalMethod::quadrature;
  double error_estimate = 0.0;
};

struct SemigroupOptions {
  std::size_t node_budget = 1'000'000;  // tensor rule above this falls back to MC
  unsigned m_per_dim = 0;               // 0 = auto (40 capped by budget)
  std::size_t mc_samples = 200'000;
  std::uint64_t mc_seed = 0x001ab5eedULL;
  bool allow_monte_carlo = true;
};

// Mehler average as an affine map of a standard Gaussian vector u:
//   (R_t f)(x) = prefactor * E[ f(mean + sdev .* u) ].
struct MehlerMap {
  Vec mean;
  Vec sdev;
  double prefactor = 1.0;
};
MehlerMap mehler_map(const SemigroupKind& kind, double t, const double* x);

// Exact diagonal action on coefficients: a_alpha -> e^{-mu(alpha) t} a_alpha.
HermiteFunction apply_spectral(const SemigroupKind& kind, const HermiteFunction& f, double t);

// Mehler integral of a black-box f by tensor Gauss quadrature (or Monte
// Carlo above the node budget). Never consults the spectral route; serves as
// the independent second leg of the dual-route agreement checks.
SemigroupEvalReport apply_pointwise(const SemigroupKind& kind, const RealField& f, double t,
                                    const double* x, const SemigroupOptions& opts = {});

inline std::vector<HermiteFunction> gradient(const HermiteFunction& f) { return f.gradient(); }

// |grad f(x)| with the norm matching the semigroup side: ambient Euclidean
// for the Da Prato side, Cameron-Martin |D_H f|_H = |Q^{1/2} grad f| for the
// Wiener side (cm_weighted).
double grad_norm_at(const std::vector<HermiteFunction>& partials, const GaussianSpace& space,
                    bool cm_weighted, const double* x);

// R_t applied at x to y -> |grad f(y)|_*. In one dimension the integrand is a
// piecewise polynomial times a Gaussian and is integrated exactly (root
// splitting + Gaussian partial moments); otherwise tensor quadrature.
double apply_to_grad_norm(const SemigroupKind& kind, const std::vector<HermiteFunction>& partials,
                          bool cm_weighted, double t, const double* x, unsigned m_per_dim = 0);

struct ContractionReport {
  double max_ratio = 0.0;
  std::size_t argmax = 0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // denominator below 1e-12
};

// Worst-case ratio over the cloud of
//   DaPratoP: |grad P_t f|(x) / (e^{-t/(2 lambda_Q)} P_t|grad f|(x)),
//   WienerT:  |D_H T_t f|_H(x) / (e^{-t} T_t|D_H f|_H(x)).
// Killed variants are rejected (the e^{-t} factors cancel; probe the base).
ContractionReport contraction_probe(const SemigroupKind& kind, const HermiteFunction& f, double t,
                                    const SampleCloud& cloud, unsigned m_per_dim = 0);

struct LogConvexityResult {
  double lhs = 0.0;       // R_t g(x_s)
  double rhs_halft = 0.0; // exponent |x1-x0|^2 s(1-s) / (2t)
  double rhs_t = 0.0;     // exponent |x1-x0|^2 s(1-s) / t
};

// Interpolation inequality for R_t g along the segment x_s = (1-s)x0 + s*x1.
// Distance is ambient for the Da Prato side and Cameron-Martin for the
// Wiener side. Throws hypothesis_error if g is negative at any node.
LogConvexityResult log_convexity_probe(const SemigroupKind& kind, const RealField& g, const Vec& x0,
                                       const Vec& x1, double s, double t, unsigned m_per_dim = 40);

struct HarnackResult {
  double lhs = 0.0;  // (T_t g)^alpha (x)
  double rhs = 0.0;  // T_t (g^alpha)(y) * exp(alpha |x-y|^2 / (2 sigma(t) (alpha-1)))
};

// Dimension-free Harnack inequality on the standard Gaussian space (the
// curvature-1 instance; requires lambda == 1): sigma(t) = e^{2t} - 1.
HarnackResult harnack_probe(const GaussianSpace& space, const RealField& g, double alpha, double t,
                            const Vec& x, const Vec& y, unsigned m_per_dim = 40);

// Diagonal entries of Gamma_t = Q^{-1/2} (1 - e^{2tA})^{-1/2} e^{tA}:
//   gamma_{t,i} = e^{-t/(2 lambda_i)} / sqrt(lambda_i (1 - e^{-t/lambda_i})),
// whose operator norm is bounded by 1/sqrt(t).
Vec gamma_t_entries(const GaussianSpace& space, double t);

}  // namespace oulab
