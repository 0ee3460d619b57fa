#include "oulab/fractional.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oulab/quadrature.hpp"

namespace oulab {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

struct PieceAccum {
  double value = 0.0;
  double error = 0.0;

  template <typename Fn>
  void add(Fn&& f, double a, double b, const KernelQuadratureConfig& cfg) {
    if (!(b > a)) return;
    double err = 0.0;
    value += GK::integrate(std::forward<Fn>(f), a, b, cfg.max_subdivisions, cfg.tolerance, &err);
    error += err;
  }
};

constexpr double kInvSqrtPi = constants::inv_sqrt_pi;

}  // namespace

double kernel_K(double s, double t) {
  if (s < 0.0 || t < 0.0) throw std::invalid_argument("kernel_K: s, t must be >= 0");
  if (t == 0.0) return 0.0;  // branches cancel for s > 0
  if (s == 0.0 || s == t) throw std::domain_error("kernel_K: singular at s = 0 and s = t");
  double v = -1.0 / std::sqrt(s);
  if (s > t) v += 1.0 / std::sqrt(s - t);
  return kInvSqrtPi * v;
}

KernelIntegralResult kernel_abs_integral(double t, const KernelQuadratureConfig& cfg) {
  if (t < 0.0) throw std::invalid_argument("kernel_abs_integral: t must be >= 0");
  KernelIntegralResult out;
  if (t == 0.0) return out;
  const double rt = std::sqrt(t);
  PieceAccum acc;
  // (0,t): |K| = pi^{-1/2} s^{-1/2}; s = u^2 makes the integrand constant.
  acc.add([&](double) { return 2.0 * kInvSqrtPi; }, 0.0, rt, cfg);
  // (t,2t): s = t + u^2 removes the (s-t)^{-1/2} branch.
  acc.add([&](double u) { return 2.0 * kInvSqrtPi * (1.0 - u / std::sqrt(t + u * u)); }, 0.0, rt, cfg);
  // (2t,S): smooth, integrate directly.
  const double S = 2.0 * t + 10.0;
  acc.add([&](double s) { return kernel_K(s, t); }, 2.0 * t, S, cfg);
  // (S,inf): antiderivative of (s-t)^{-1/2} - s^{-1/2} is 2(sqrt(s-t) - sqrt(s)),
  // which tends to 0; the tail is exactly 2(sqrt(S) - sqrt(S-t)).
  out.value = acc.value + 2.0 * kInvSqrtPi * (std::sqrt(S) - std::sqrt(S - t));
  out.error_estimate = acc.error;
  return out;
}

ScalarIdentityResult scalar_identity_check(double b, double t, const KernelQuadratureConfig& cfg) {
  if (b < 0.0 || t < 0.0) throw std::invalid_argument("scalar_identity_check: b, t must be >= 0");
  ScalarIdentityResult out;
  out.lhs = std::expm1(-b * t);
  if (b == 0.0 || t == 0.0) {
    // K(.,0) vanishes identically; sqrt(b) = 0 kills the integrand.
    out.rhs = 0.0;
    out.gap = std::abs(out.lhs - out.rhs);
    if (b > 0.0) {
      // Decay identity at t = 0: pi^{-1/2} int_0^inf s^{-1/2} sqrt(b) e^{-bs} ds = 1.
      const double U = std::sqrt(cfg.tail_time / b);
      PieceAccum acc;
      acc.add([&](double u) { return 2.0 * kInvSqrtPi * std::sqrt(b) * std::exp(-b * u * u); }, 0.0, U, cfg);
      out.decay_lhs = 1.0;
      out.decay_rhs = acc.value;
      out.decay_gap = std::abs(out.decay_lhs - out.decay_rhs);
      out.error_estimate = acc.error + std::exp(-b * U * U);
    }
    return out;
  }

  const double rb = std::sqrt(b);
  const double S = t + std::max(cfg.tail_time, cfg.tail_time / b);
  const double t2 = std::min(2.0 * t, S);
  PieceAccum acc;
  // (0,t), s = u^2: the -s^{-1/2} branch.
  acc.add([&](double u) { return -2.0 * kInvSqrtPi * rb * std::exp(-b * u * u); }, 0.0, std::sqrt(t), cfg);
  // (t,t2): (s-t)^{-1/2} branch via s = t + u^2; -s^{-1/2} branch directly.
  acc.add([&](double u) { return 2.0 * kInvSqrtPi * rb * std::exp(-b * (t + u * u)); }, 0.0,
          std::sqrt(t2 - t), cfg);
  acc.add([&](double s) { return -kInvSqrtPi * rb * std::exp(-b * s) / std::sqrt(s); }, t, t2, cfg);
  // (t2,S): both branches smooth.
  acc.add([&](double s) { return kernel_K(s, t) * rb * std::exp(-b * s); }, t2, S, cfg);
  out.rhs = acc.value;
  // |K(s,t)| decreases beyond 2t; bound the tail by K(S,t) e^{-bs}.
  const double tail_bound = (S > 2.0 * t ? kernel_K(S, t) : kInvSqrtPi / std::sqrt(S - t)) * rb *
                            std::exp(-b * S) / b;
  out.error_estimate = acc.error + std::abs(tail_bound);
  out.gap = std::abs(out.lhs - out.rhs);

  // Decay identity: substitute u = sqrt(s - t).
  const double U = std::sqrt(cfg.tail_time / b);
  PieceAccum dec;
  dec.add([&](double u) { return 2.0 * kInvSqrtPi * rb * std::exp(-b * (t + u * u)); }, 0.0, U, cfg);
  out.decay_lhs = std::exp(-b * t);
  out.decay_rhs = dec.value;
  out.decay_gap = std::abs(out.decay_lhs - out.decay_rhs);
  out.error_estimate += dec.error;
  return out;
}

HermiteFunction apply_frac(const FracOperator& op, const HermiteFunction& f) {
  if (op.shift != 0 && op.shift != 1) throw std::invalid_argument("apply_frac: shift must be 0 or 1");
  if (!(f.space() == op.kind.space)) throw std::invalid_argument("apply_frac: space mismatch");
  return f.transformed(
      [&](const MultiIndex& a) { return std::sqrt(double(op.shift) + op.kind.mu(a)); });
}

RepresentationResult representation_check(const SemigroupKind& kind, const HermiteFunction& f,
                                          double t, const Vec& x, const KernelQuadratureConfig& cfg) {
  if (t < 0.0) throw std::invalid_argument("representation_check: t must be >= 0");
  if (x.size() != kind.space.dim()) throw std::invalid_argument("representation_check: dim mismatch");
  RepresentationResult out;
  const Vec B = f.basis_values(x.data());

  // lhs = sum_alpha a_alpha (e^{-mu t} - 1) H_alpha(x), assembled directly to
  // avoid cancellation through two large evaluations.
  double lhs = 0.0;
  const auto& basis = f.basis();
  std::vector<double> c;  // sqrt(mu) a_alpha H_alpha(x), mu > 0 terms only
  std::vector<double> mu;
  c.reserve(basis.size());
  mu.reserve(basis.size());
  double mu_min = -1.0, csum = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double a = f.coeffs()[k];
    if (a == 0.0) continue;
    const double m = kind.mu(basis[k]);
    lhs += a * std::expm1(-m * t) * B[k];
    if (m > 0.0) {
      c.push_back(std::sqrt(m) * a * B[k]);
      mu.push_back(m);
      csum += std::abs(c.back());
      mu_min = mu_min < 0.0 ? m : std::min(mu_min, m);
    }
  }
  out.lhs = lhs;
  if (t == 0.0 || c.empty()) {
    out.rhs = 0.0;
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
  }

  // G(s) = (R_s sqrt(-L) f)(x) via the spectral decay of each retained mode.
  const auto G = [&](double s) {
    double g = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) g += c[k] * std::exp(-mu[k] * s);
    return g;
  };

  const double S = t + std::max(cfg.tail_time, cfg.tail_time / mu_min);
  const double t2 = std::min(2.0 * t, S);
  PieceAccum acc;
  acc.add([&](double u) { return -2.0 * kInvSqrtPi * G(u * u); }, 0.0, std::sqrt(t), cfg);
  acc.add([&](double u) { return 2.0 * kInvSqrtPi * G(t + u * u); }, 0.0, std::sqrt(t2 - t), cfg);
  acc.add([&](double s) { return -kInvSqrtPi * G(s) / std::sqrt(s); }, t, t2, cfg);
  acc.add([&](double s) { return kernel_K(s, t) * G(s); }, t2, S, cfg);
  out.rhs = acc.value;
  const double kb = S > 2.0 * t ? kernel_K(S, t) : kInvSqrtPi / std::sqrt(S - t);
  out.error_estimate = acc.error + kb * csum * std::exp(-mu_min * S) / mu_min;
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

JtReport jt_bound_check(const SemigroupKind& kind, const HermiteFunction& f, const SampleCloud& cloud,
                        const Vec& times, const Vec& sup_grid) {
  if (!kind.killed()) throw std::invalid_argument("jt_bound_check: kind must be a killed variant");
  if (cloud.dim != kind.space.dim()) throw std::invalid_argument("jt_bound_check: cloud dim mismatch");
  for (double t : times)
    if (!(t > 0.0)) throw std::invalid_argument("jt_bound_check: times must be > 0");

  // v = sqrt(-L_R) f = sqrt(I - L_base) f; its multiplier is sqrt(mu_killed).
  const HermiteFunction v =
      f.transformed([&](const MultiIndex& a) { return std::sqrt(kind.mu(a)); });
  const SemigroupKind base = kind.base();
  const auto& basis = f.basis();
  const std::size_t nb = basis.size();

  std::vector<double> mu_base(nb), mu_kill(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    mu_base[k] = base.mu(basis[k]);
    mu_kill[k] = kind.mu(basis[k]);
  }
  // decay[s][alpha] tables for the sup grid (non-killed decay).
  std::vector<Vec> decay(sup_grid.size(), Vec(nb));
  for (std::size_t si = 0; si < sup_grid.size(); ++si)
    for (std::size_t k = 0; k < nb; ++k) decay[si][k] = std::exp(-mu_base[k] * sup_grid[si]);

  const double c0 = v.coeffs()[0];  // s -> inf limit of B_s v is the mean
  JtReport rep;
  for (std::size_t i = 0; i < cloud.n; ++i) {
    const Vec B = f.basis_values(cloud.point(i));
    double vx = 0.0;  // s -> 0 limit
    for (std::size_t k = 0; k < nb; ++k) vx += v.coeffs()[k] * B[k];
    double sup = std::max(std::abs(vx), std::abs(c0));
    for (std::size_t si = 0; si < sup_grid.size(); ++si) {
      double val = 0.0;
      for (std::size_t k = 0; k < nb; ++k) val += v.coeffs()[k] * decay[si][k] * B[k];
      sup = std::max(sup, std::abs(val));
    }
    for (double t : times) {
      const double den = (4.0 * std::sqrt(t) * kInvSqrtPi) * sup;
      if (den < 1e-12) {
        ++rep.skipped;
        continue;
      }
      double lhs = 0.0;
      for (std::size_t k = 0; k < nb; ++k) lhs += f.coeffs()[k] * std::expm1(-mu_kill[k] * t) * B[k];
      const double ratio = std::abs(lhs) / den;
      if (rep.evaluated == 0 || ratio > rep.max_ratio) {
        rep.max_ratio = ratio;
        rep.argmax_point = i;
        rep.argmax_time = t;
      }
      ++rep.evaluated;
    }
  }
  return rep;
}

JtReport jt_bound_check(const SemigroupKind& kind, const HermiteFunction& f, const SampleCloud& cloud,
                        const Vec& times) {
  return jt_bound_check(kind, f, cloud, times, log_grid(1e-4, 1e2, 64));
}

RieszResult riesz_empirical(const SemigroupKind& kind, const HermiteFunction& f, double p,
                            unsigned m_per_dim) {
  if (kind.killed()) throw std::invalid_argument("riesz_empirical: use a non-killed kind");
  if (!(p > 1.0)) throw std::invalid_argument("riesz_empirical: p must be > 1");
  if (!(f.space() == kind.space)) throw std::invalid_argument("riesz_empirical: space mismatch");
  const bool cm = kind.wiener_side();
  const std::size_t d = kind.space.dim();
  const std::vector<HermiteFunction> partials = f.gradient();
  const HermiteFunction g = apply_frac({kind, 1}, f);

  unsigned m = m_per_dim;
  if (m == 0) m = std::min(40u, max_points_per_dim(d, 200'000));
  TensorRule rule(kind.space, m);
  double lhs_p = 0.0, rhs_p = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double* x = rule.node(k);
    lhs_p += rule.weight(k) * std::pow(grad_norm_at(partials, kind.space, cm, x), p);
    rhs_p += rule.weight(k) * std::pow(std::abs(g.eval(x)), p);
  }
  RieszResult out;
  out.lhs_norm = std::pow(lhs_p, 1.0 / p);
  out.rhs_norm = std::pow(rhs_p, 1.0 / p);
  out.ratio = out.rhs_norm > 0.0 ? out.lhs_norm / out.rhs_norm : 0.0;

  if (p == 2.0) {
    out.p2_checked = true;
    double spectral = 0.0;
    const auto& basis = f.basis();
    for (std::size_t k = 0; k < basis.size(); ++k)
      spectral += kind.mu(basis[k]) * f.coeffs()[k] * f.coeffs()[k];
    // Dirichlet integrand is a polynomial of degree 2(N-1): exact rule.
    TensorRule exact(kind.space, f.max_order() + 1);
    double dirichlet = 0.0;
    for (std::size_t k = 0; k < exact.size(); ++k) {
      const double gn = grad_norm_at(partials, kind.space, cm, exact.node(k));
      dirichlet += exact.weight(k) * gn * gn;
    }
    out.p2_spectral = spectral;
    out.p2_dirichlet = dirichlet;
    out.p2_factor = dirichlet > 0.0 ? spectral / dirichlet : 0.0;
  }
  return out;
}

}  // namespace oulab
