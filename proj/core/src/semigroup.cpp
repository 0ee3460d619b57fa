#include "oulab/semigroup.hpp"

#include <cmath>
#include <stdexcept>

#include "oulab/hermite.hpp"
#include "oulab/quadrature.hpp"

namespace oulab {

namespace {

// Odometer over a tensor grid of standard-normal Gauss nodes; calls
// body(u, w) with u in R^d and the product weight w.
template <typename Fn>
void for_each_tensor_node(const GaussHermite1D& base, std::size_t dim, Fn&& body) {
  std::vector<unsigned> idx(dim, 0u);
  Vec u(dim, 0.0);
  const std::size_t m = base.nodes.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= m;
  for (std::size_t k = 0; k < total; ++k) {
    double w = 1.0;
    for (std::size_t i = 0; i < dim; ++i) {
      u[i] = base.nodes[idx[i]];
      w *= base.weights[idx[i]];
    }
    body(u, w);
    for (std::size_t i = dim; i-- > 0;) {
      if (++idx[i] < m) break;
      idx[i] = 0;
    }
  }
}

std::size_t tensor_size(unsigned m, std::size_t dim) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (total > (std::size_t(1) << 62) / m) return std::size_t(-1);
    total *= m;
  }
  return total;
}

double quadrature_pass(const MehlerMap& map, const RealField& f, unsigned m, std::size_t dim,
                       double* min_seen = nullptr) {
  const GaussHermite1D base = gauss_hermite(m);
  Vec z(dim, 0.0);
  double acc = 0.0;
  for_each_tensor_node(base, dim, [&](const Vec& u, double w) {
    for (std::size_t i = 0; i < dim; ++i) z[i] = map.mean[i] + map.sdev[i] * u[i];
    const double v = f(z.data());
    if (min_seen) *min_seen = std::min(*min_seen, v);
    acc += w * v;
  });
  return acc;
}

}  // namespace

MehlerMap mehler_map(const SemigroupKind& kind, double t, const double* x) {
  if (t < 0.0) throw std::invalid_argument("mehler_map: t must be >= 0");
  const std::size_t d = kind.space.dim();
  MehlerMap map;
  map.mean.resize(d);
  map.sdev.resize(d);
  map.prefactor = kind.killed() ? std::exp(-t) : 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double lam = kind.space.lambda()[i];
    if (kind.wiener_side()) {
      map.mean[i] = std::exp(-t) * x[i];
      map.sdev[i] = std::sqrt(lam * -std::expm1(-2.0 * t));
    } else {
      map.mean[i] = std::exp(-t / (2.0 * lam)) * x[i];
      map.sdev[i] = std::sqrt(lam * -std::expm1(-t / lam));
    }
  }
  return map;
}

HermiteFunction apply_spectral(const SemigroupKind& kind, const HermiteFunction& f, double t) {
  if (t < 0.0) throw std::invalid_argument("apply_spectral: t must be >= 0");
  if (!(f.space() == kind.space)) throw std::invalid_argument("apply_spectral: space mismatch");
  return f.transformed([&](const MultiIndex& a) { return std::exp(-kind.mu(a) * t); });
}

SemigroupEvalReport apply_pointwise(const SemigroupKind& kind, const RealField& f, double t,
                                    const double* x, const SemigroupOptions& opts) {
  if (t < 0.0) throw std::invalid_argument("apply_pointwise: t must be >= 0");
  const std::size_t d = kind.space.dim();
  if (t == 0.0) return {f(x), EvalMethod::spectral, 0.0};

  const MehlerMap map = mehler_map(kind, t, x);
  unsigned m = opts.m_per_dim;
  if (m == 0) m = std::min(40u, max_points_per_dim(d, opts.node_budget));
  if (m >= 2 && tensor_size(m, d) <= opts.node_budget) {
    const double coarse = quadrature_pass(map, f, std::max(2u, m / 2), d);
    const double fine = quadrature_pass(map, f, m, d);
    SemigroupEvalReport rep;
    rep.value = map.prefactor * fine;
    rep.method = EvalMethod::quadrature;
    rep.error_estimate = map.prefactor * std::abs(fine - coarse);
    return rep;
  }

  if (!opts.allow_monte_carlo)
    throw resource_error("apply_pointwise: tensor rule exceeds node budget and Monte Carlo is disabled");
  const std::size_t n = std::max<std::size_t>(2, opts.mc_samples);
  double mean = 0.0, m2 = 0.0;
  Vec z(d, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    NormalStream g(opts.mc_seed, k);
    for (std::size_t i = 0; i < d; ++i) z[i] = map.mean[i] + map.sdev[i] * g.next();
    const double v = f(z.data());
    const double delta = v - mean;
    mean += delta / double(k + 1);
    m2 += delta * (v - mean);
  }
  SemigroupEvalReport rep;
  rep.value = map.prefactor * mean;
  rep.method = EvalMethod::monte_carlo;
  rep.error_estimate = map.prefactor * std::sqrt(m2 / double(n - 1) / double(n));
  return rep;
}

double grad_norm_at(const std::vector<HermiteFunction>& partials, const GaussianSpace& space,
                    bool cm_weighted, const double* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < partials.size(); ++i) {
    const double gi = partials[i].eval(x);
    s += (cm_weighted ? space.lambda()[i] : 1.0) * gi * gi;
  }
  return std::sqrt(s);
}

double apply_to_grad_norm(const SemigroupKind& kind, const std::vector<HermiteFunction>& partials,
                          bool cm_weighted, double t, const double* x, unsigned m_per_dim) {
  const std::size_t d = kind.space.dim();
  if (partials.size() != d) throw std::invalid_argument("apply_to_grad_norm: wrong partial count");
  if (t == 0.0) return grad_norm_at(partials, kind.space, cm_weighted, x);
  const MehlerMap map = mehler_map(kind, t, x);

  if (d == 1) {
    // |f'(mean + sdev*u)| is a piecewise polynomial in u: integrate exactly.
    const double lam = kind.space.lambda()[0];
    Vec mono = hermite_to_monomial(partials[0].coeffs());     // in x/sqrt(lambda)
    mono = affine_compose(mono, 0.0, 1.0 / std::sqrt(lam));   // in ambient x
    mono = affine_compose(mono, map.mean[0], map.sdev[0]);    // in u
    const double weight = cm_weighted ? std::sqrt(lam) : 1.0;
    return map.prefactor * weight * abs_poly_gauss_integral(mono);
  }

  unsigned m = m_per_dim;
  if (m == 0) m = d == 2 ? 48u : std::min(24u, max_points_per_dim(d, 1'000'000));
  const GaussHermite1D base = gauss_hermite(m);
  Vec z(d, 0.0);
  double acc = 0.0;
  for_each_tensor_node(base, d, [&](const Vec& u, double w) {
    for (std::size_t i = 0; i < d; ++i) z[i] = map.mean[i] + map.sdev[i] * u[i];
    acc += w * grad_norm_at(partials, kind.space, cm_weighted, z.data());
  });
  return map.prefactor * acc;
}

ContractionReport contraction_probe(const SemigroupKind& kind, const HermiteFunction& f, double t,
                                    const SampleCloud& cloud, unsigned m_per_dim) {
  if (kind.killed())
    throw std::invalid_argument("contraction_probe: probe the base semigroup (killed factors cancel)");
  if (!(t > 0.0)) throw std::invalid_argument("contraction_probe: t must be > 0");
  if (cloud.dim != kind.space.dim()) throw std::invalid_argument("contraction_probe: cloud dim mismatch");
  const bool cm = kind.wiener_side();
  const double rate = cm ? 1.0 : 1.0 / (2.0 * kind.space.lambda_max());
  const std::vector<HermiteFunction> num_partials = apply_spectral(kind, f, t).gradient();
  const std::vector<HermiteFunction> den_partials = f.gradient();
  const double decay = std::exp(-rate * t);

  ContractionReport rep;
  for (std::size_t i = 0; i < cloud.n; ++i) {
    const double* x = cloud.point(i);
    const double den = decay * apply_to_grad_norm(kind, den_partials, cm, t, x, m_per_dim);
    if (den < 1e-12) {
      ++rep.skipped;
      continue;
    }
    const double num = grad_norm_at(num_partials, kind.space, cm, x);
    const double ratio = num / den;
    if (rep.evaluated == 0 || ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.argmax = i;
    }
    ++rep.evaluated;
  }
  return rep;
}

namespace {

// Quadrature of R_t g at x that rejects negative g values at the nodes.
double eval_checked(const SemigroupKind& kind, const RealField& g, double t, const double* x,
                    unsigned m, const char* who) {
  const MehlerMap map = mehler_map(kind, t, x);
  double min_seen = 0.0;
  const double v = quadrature_pass(map, g, m, kind.space.dim(), &min_seen);
  if (min_seen < 0.0)
    throw hypothesis_error(std::string(who) + ": g is negative at a quadrature node");
  return map.prefactor * v;
}

}  // namespace

LogConvexityResult log_convexity_probe(const SemigroupKind& kind, const RealField& g, const Vec& x0,
                                       const Vec& x1, double s, double t, unsigned m_per_dim) {
  if (!(t > 0.0)) throw std::invalid_argument("log_convexity_probe: t must be > 0");
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("log_convexity_probe: s must be in [0,1]");
  const std::size_t d = kind.space.dim();
  if (x0.size() != d || x1.size() != d) throw std::invalid_argument("log_convexity_probe: dim mismatch");
  Vec xs(d), diff(d);
  for (std::size_t i = 0; i < d; ++i) {
    xs[i] = (1.0 - s) * x0[i] + s * x1[i];
    diff[i] = x1[i] - x0[i];
  }
  const double dsq = kind.wiener_side()
                         ? kind.space.cm_inner(diff, diff)
                         : dot(diff, diff);
  const double r0 = eval_checked(kind, g, t, x0.data(), m_per_dim, "log_convexity_probe");
  const double r1 = eval_checked(kind, g, t, x1.data(), m_per_dim, "log_convexity_probe");
  LogConvexityResult out;
  out.lhs = eval_checked(kind, g, t, xs.data(), m_per_dim, "log_convexity_probe");
  const double geo = std::pow(r0, 1.0 - s) * std::pow(r1, s);
  const double e = s * (1.0 - s) * dsq;
  out.rhs_halft = std::exp(e / (2.0 * t)) * geo;
  out.rhs_t = std::exp(e / t) * geo;
  return out;
}

HarnackResult harnack_probe(const GaussianSpace& space, const RealField& g, double alpha, double t,
                            const Vec& x, const Vec& y, unsigned m_per_dim) {
  if (!(alpha > 1.0)) throw std::invalid_argument("harnack_probe: alpha must be > 1");
  if (!(t > 0.0)) throw std::invalid_argument("harnack_probe: t must be > 0");
  if (!space.is_isotropic() || space.lambda()[0] != 1.0)
    throw std::invalid_argument("harnack_probe: requires the standard (lambda = 1) Gaussian space");
  if (x.size() != space.dim() || y.size() != space.dim())
    throw std::invalid_argument("harnack_probe: dim mismatch");
  const SemigroupKind kind{SemigroupVariant::WienerT, space};
  const double tg_x = eval_checked(kind, g, t, x.data(), m_per_dim, "harnack_probe");
  const RealField g_alpha = [&](const double* z) {
    const double gv = g(z);
    if (gv < 0.0) throw hypothesis_error("harnack_probe: g is negative at a quadrature node");
    return std::pow(gv, alpha);
  };
  const double tga_y = eval_checked(kind, g_alpha, t, y.data(), m_per_dim, "harnack_probe");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  const double sigma = std::expm1(2.0 * t);
  HarnackResult out;
  out.lhs = std::pow(tg_x, alpha);
  out.rhs = tga_y * std::exp(alpha * d2 / (2.0 * sigma * (alpha - 1.0)));
  return out;
}

Vec gamma_t_entries(const GaussianSpace& space, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("gamma_t_entries: t must be > 0");
  Vec g(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const double lam = space.lambda()[i];
    g[i] = std::exp(-t / (2.0 * lam)) / std::sqrt(lam * -std::expm1(-t / lam));
  }
  return g;
}

}  // namespace oulab
