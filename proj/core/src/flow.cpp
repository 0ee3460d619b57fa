#include "oulab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Dense>

#include "oulab/lusin.hpp"
#include "oulab/parallel.hpp"
#include "oulab/quadrature.hpp"

namespace oulab {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, unsigned n_points) {
  if (n_points < 3) n_points = 3;
  if (n_points % 2 == 0) ++n_points;
  const double h = (b - a) / (n_points - 1);
  double s = f(a) + f(b);
  for (unsigned k = 1; k + 1 < n_points; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

double log_rho(const GaussianSpace& space, const double* x) {
  const Vec& lam = space.lambda();
  double s = 0.0;
  for (std::size_t i = 0; i < lam.size(); ++i)
    s += -0.5 * x[i] * x[i] / lam[i] - 0.5 * std::log(2.0 * constants::pi * lam[i]);
  return s;
}

// E |z|^p for z standard Gaussian in dimension dm (chi moment).
double chi_moment(std::size_t dm, double p) {
  return std::exp(0.5 * p * std::log(2.0) + std::lgamma(0.5 * (double(dm) + p)) -
                  std::lgamma(0.5 * double(dm)));
}

HermiteFunction embed_to_order(const HermiteFunction& f, unsigned max_order) {
  if (f.max_order() == max_order) return f;
  HermiteFunction out(f.space(), max_order);
  // The basis enumeration is graded, so a lower order's coefficients are a
  // prefix of the higher order's.
  std::copy(f.coeffs().begin(), f.coeffs().end(), out.coeffs().begin());
  return out;
}

// || (sum_c w_c v_c(x)^2)^{1/2} ||_{L^p(m)} with exact paths for the shapes
// the closed-form families produce: constants, centered linear fields, p = 2.
double lp_of_weighted_field(const GaussianSpace& space, const std::vector<HermiteFunction>& comps,
                            const Vec& weights, double p, unsigned m_per_dim) {
  const std::size_t d = space.dim();
  if (!(p >= 1.0)) throw hypothesis_error("L^p field norm: p must be >= 1");

  if (p == 2.0) {
    double s = 0.0;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const double n = comps[c].l2_norm();
      s += weights[c] * n * n;
    }
    return std::sqrt(s);
  }

  bool all_constant = true, all_centered_linear = true;
  for (const auto& f : comps) {
    if (f.degree() > 0) all_constant = false;
    if (f.degree() > 1 || f.coeffs()[0] != 0.0) all_centered_linear = false;
  }
  if (all_constant) {
    double s = 0.0;
    for (std::size_t c = 0; c < comps.size(); ++c) s += weights[c] * comps[c].coeffs()[0] * comps[c].coeffs()[0];
    return std::sqrt(s);
  }
  if (all_centered_linear) {
    // v_c(x) = (A x)_c; with x = Lambda^{1/2} z the squared field is
    // z' S z, S = Lambda^{1/2} A' W A Lambda^{1/2}. Equal or rank-one
    // spectra reduce to chi moments.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(comps.size(), d);
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (std::size_t i = 0; i < d; ++i) {
        std::vector<unsigned> e(d, 0u);
        e[i] = 1u;
        A(c, i) = comps[c].coeff(MultiIndex(e)) / space.sqrt_lambda()[i];
      }
    Eigen::MatrixXd S(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < comps.size(); ++c) s += weights[c] * A(c, i) * A(c, j);
        S(i, j) = space.sqrt_lambda()[i] * s * space.sqrt_lambda()[j];
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    const Eigen::VectorXd mu = es.eigenvalues();
    const double mu_max = mu.maxCoeff();
    if (mu_max <= 0.0) return 0.0;
    std::size_t nonzero = 0;
    bool equal = true;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      if (mu[i] > 1e-12 * mu_max) ++nonzero;
      if (std::abs(mu[i] - mu_max) > 1e-12 * mu_max) equal = false;
    }
    if (equal) return std::sqrt(mu_max) * std::pow(chi_moment(d, p), 1.0 / p);
    if (nonzero == 1) return std::sqrt(mu_max) * std::pow(chi_moment(1, p), 1.0 / p);
  }

  if (m_per_dim == 0) m_per_dim = 40;
  TensorRule rule(space, m_per_dim);
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double* node = rule.node(k);
    double q = 0.0;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const double v = comps[c].eval(node);
      q += weights[c] * v * v;
    }
    acc += rule.weight(k) * std::pow(q, 0.5 * p);
  }
  return std::pow(acc, 1.0 / p);
}

Vec value_weights(const GaussianSpace& space, std::size_t n_comp, NormMode mode) {
  Vec w(n_comp, 1.0);
  if (mode == NormMode::cameron_martin)
    for (std::size_t c = 0; c < n_comp; ++c) w[c] = 1.0 / space.lambda()[c];
  return w;
}

}  // namespace

double FlowFieldSpec::modulation_factor(double t) const {
  return modulation == TimeModulation::constant ? 1.0 : std::cos(mod_freq * t);
}

namespace {
double modulation_integral(const FlowFieldSpec& s, double t) {
  if (s.modulation == TimeModulation::constant || s.mod_freq == 0.0) return t;
  return std::sin(s.mod_freq * t) / s.mod_freq;
}

double rotation_speed(const FlowFieldSpec& s) {
  return s.family == FlowFamily::perturbed_rotation ? s.omega * (1.0 + s.eps) : s.omega;
}
}  // namespace

FlowFieldSpec FlowFieldSpec::rotation_field(GaussianSpace space, double omega, double T) {
  if (space.dim() != 2) throw hypothesis_error("rotation family requires dimension 2");
  FlowFieldSpec s;
  s.family = FlowFamily::rotation;
  s.measure_preserving = space.is_isotropic();
  s.space = std::move(space);
  s.horizon = T;
  s.omega = omega;
  s.closed_form_flow = true;
  return s;
}

FlowFieldSpec FlowFieldSpec::perturbed_rotation_field(GaussianSpace space, double omega, double eps,
                                                      double T) {
  FlowFieldSpec s = rotation_field(std::move(space), omega, T);
  s.family = FlowFamily::perturbed_rotation;
  s.eps = eps;
  return s;
}

FlowFieldSpec FlowFieldSpec::shear_field(GaussianSpace space, double a, double T) {
  if (space.dim() != 2) throw hypothesis_error("shear family requires dimension 2");
  FlowFieldSpec s;
  s.family = FlowFamily::shear;
  s.space = std::move(space);
  s.horizon = T;
  s.shear_a = a;
  s.measure_preserving = false;  // divergence free, but the Gaussian is not invariant
  s.closed_form_flow = true;
  return s;
}

FlowFieldSpec FlowFieldSpec::custom_field(GaussianSpace space, std::vector<HermiteFunction> components,
                                          double T, TimeModulation mod, double mod_freq) {
  if (components.size() != space.dim())
    throw hypothesis_error("custom field needs one component per coordinate");
  for (const auto& f : components)
    if (!(f.space() == space)) throw hypothesis_error("custom field components live on another space");
  FlowFieldSpec s;
  s.family = FlowFamily::custom;
  s.space = std::move(space);
  s.horizon = T;
  s.components = std::move(components);
  s.modulation = mod;
  s.mod_freq = mod_freq;
  HermiteFunction div(s.space, s.components[0].max_order());
  for (std::size_t i = 0; i < s.components.size(); ++i)
    div += embed_to_order(s.components[i].partial(i), div.max_order());
  s.divergence_expansion = std::make_shared<const HermiteFunction>(std::move(div));
  return s;
}

void FlowFieldSpec::eval(double t, const double* x, double* out) const {
  const double c = modulation_factor(t);
  switch (family) {
    case FlowFamily::rotation:
    case FlowFamily::perturbed_rotation: {
      const double w = c * rotation_speed(*this);
      out[0] = -w * x[1];
      out[1] = w * x[0];
      return;
    }
    case FlowFamily::shear:
      out[0] = c * shear_a * x[1];
      out[1] = 0.0;
      return;
    case FlowFamily::custom:
      for (std::size_t i = 0; i < components.size(); ++i) out[i] = c * components[i].eval(x);
      return;
  }
}

double FlowFieldSpec::divergence(double t, const double* x) const {
  if (family != FlowFamily::custom) return 0.0;
  return modulation_factor(t) * divergence_expansion->eval(x);
}

void FlowFieldSpec::exact_flow(double t, const double* x, double* out) const {
  switch (family) {
    case FlowFamily::rotation:
    case FlowFamily::perturbed_rotation: {
      const double th = rotation_speed(*this) * modulation_integral(*this, t);
      const double c = std::cos(th), s = std::sin(th);
      const double x0 = x[0], x1 = x[1];
      out[0] = c * x0 - s * x1;
      out[1] = s * x0 + c * x1;
      return;
    }
    case FlowFamily::shear: {
      out[0] = x[0] + shear_a * modulation_integral(*this, t) * x[1];
      out[1] = x[1];
      return;
    }
    case FlowFamily::custom:
      throw hypothesis_error("custom family has no closed-form flow");
  }
}

std::vector<HermiteFunction> FlowFieldSpec::as_hermite(double t) const {
  const double c = modulation_factor(t);
  if (family == FlowFamily::custom) {
    std::vector<HermiteFunction> out;
    out.reserve(components.size());
    for (const auto& f : components) out.push_back(c * f);
    return out;
  }
  // x_i = sqrt(lambda_i) H_{e_i}
  std::vector<HermiteFunction> out(2, HermiteFunction(space, 1));
  std::vector<unsigned> e0{1u, 0u}, e1{0u, 1u};
  if (family == FlowFamily::shear) {
    out[0].set_coeff(MultiIndex(e1), c * shear_a * space.sqrt_lambda()[1]);
  } else {
    const double w = c * rotation_speed(*this);
    out[0].set_coeff(MultiIndex(e1), -w * space.sqrt_lambda()[1]);
    out[1].set_coeff(MultiIndex(e0), w * space.sqrt_lambda()[0]);
  }
  return out;
}

double FlowFieldSpec::field_lp_norm(double t, double p, NormMode mode, unsigned m_per_dim) const {
  const auto comps = as_hermite(t);
  return lp_of_weighted_field(space, comps, value_weights(space, comps.size(), mode), p, m_per_dim);
}

double FlowFieldSpec::grad_lp_norm(double t, double p, NormMode mode, unsigned m_per_dim) const {
  const auto comps = as_hermite(t);
  const std::size_t d = space.dim();
  std::vector<HermiteFunction> parts;
  Vec weights;
  parts.reserve(comps.size() * d);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (std::size_t i = 0; i < d; ++i) {
      parts.push_back(comps[c].partial(i));
      // Hilbert-Schmidt weight: ambient 1; Cameron-Martin directions carry
      // lambda_i, values measured in |.|_H carry 1/lambda_c.
      weights.push_back(mode == NormMode::ambient ? 1.0 : space.lambda()[i] / space.lambda()[c]);
    }
  return lp_of_weighted_field(space, parts, weights, p, m_per_dim);
}

double FlowFieldSpec::w1p_time_norm(double p, NormMode mode, unsigned time_points) const {
  return simpson(
      [&](double t) { return field_lp_norm(t, p, mode) + grad_lp_norm(t, p, mode); }, 0.0, horizon,
      time_points);
}

FlowEnsemble integrate_flow(const FlowFieldSpec& spec, const SampleCloud& cloud, double dt,
                            OdeScheme scheme, unsigned record_stride, double blowup_bound,
                            unsigned jobs) {
  if (!(dt > 0.0)) throw hypothesis_error("integrate_flow: dt must be positive");
  if (cloud.dim != spec.space.dim()) throw hypothesis_error("integrate_flow: cloud dimension mismatch");
  if (record_stride == 0) record_stride = 1;
  const double T = spec.horizon;
  const long long n_steps = std::llround(T / dt);
  if (n_steps < 1 || std::abs(double(n_steps) * dt - T) > 1e-9 * std::max(1.0, T))
    throw hypothesis_error("integrate_flow: horizon must be an integer number of steps");

  std::vector<long long> slot_of_step(std::size_t(n_steps) + 1, -1);
  long long n_rec = 0;
  for (long long k = 0; k <= n_steps; k += record_stride) slot_of_step[std::size_t(k)] = n_rec++;
  if (slot_of_step[std::size_t(n_steps)] < 0) slot_of_step[std::size_t(n_steps)] = n_rec++;

  FlowEnsemble ens;
  ens.spec = spec;
  ens.cloud = cloud;
  ens.scheme = scheme;
  ens.dt = dt;
  ens.record_stride = record_stride;
  ens.times.resize(std::size_t(n_rec));
  ens.traj.assign(std::size_t(n_rec), Vec(cloud.n * cloud.dim));
  ens.logdiv.assign(std::size_t(n_rec), Vec(cloud.n));
  for (long long k = 0; k <= n_steps; ++k)
    if (slot_of_step[std::size_t(k)] >= 0) ens.times[std::size_t(slot_of_step[std::size_t(k)])] = double(k) * dt;

  const std::size_t d = cloud.dim;
  parallel_for(
      cloud.n,
      [&](std::size_t i) {
        Vec y(d), k1(d), k2(d), k3(d), k4(d), tmp(d);
        std::copy(cloud.point(i), cloud.point(i) + d, y.begin());
        double ell = 0.0;
        std::copy(y.begin(), y.end(), &ens.traj[0][i * d]);
        ens.logdiv[0][i] = 0.0;
        for (long long step = 0; step < n_steps; ++step) {
          const double t = double(step) * dt;
          if (scheme == OdeScheme::Euler) {
            spec.eval(t, y.data(), k1.data());
            ell += dt * spec.divergence(t, y.data());
            for (std::size_t c = 0; c < d; ++c) y[c] += dt * k1[c];
          } else {
            spec.eval(t, y.data(), k1.data());
            const double dl1 = spec.divergence(t, y.data());
            for (std::size_t c = 0; c < d; ++c) tmp[c] = y[c] + 0.5 * dt * k1[c];
            spec.eval(t + 0.5 * dt, tmp.data(), k2.data());
            const double dl2 = spec.divergence(t + 0.5 * dt, tmp.data());
            for (std::size_t c = 0; c < d; ++c) tmp[c] = y[c] + 0.5 * dt * k2[c];
            spec.eval(t + 0.5 * dt, tmp.data(), k3.data());
            const double dl3 = spec.divergence(t + 0.5 * dt, tmp.data());
            for (std::size_t c = 0; c < d; ++c) tmp[c] = y[c] + dt * k3[c];
            spec.eval(t + dt, tmp.data(), k4.data());
            const double dl4 = spec.divergence(t + dt, tmp.data());
            for (std::size_t c = 0; c < d; ++c)
              y[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            ell += dt / 6.0 * (dl1 + 2.0 * dl2 + 2.0 * dl3 + dl4);
          }
          double amax = 0.0;
          for (std::size_t c = 0; c < d; ++c) amax = std::max(amax, std::abs(y[c]));
          if (!(amax <= blowup_bound)) {
            std::ostringstream msg;
            msg << "flow blow-up: |X| = " << amax << " at t = " << double(step + 1) * dt
                << " from point " << i;
            throw blowup_error(msg.str());
          }
          const long long slot = slot_of_step[std::size_t(step + 1)];
          if (slot >= 0) {
            std::copy(y.begin(), y.end(), &ens.traj[std::size_t(slot)][i * d]);
            ens.logdiv[std::size_t(slot)][i] = ell;
          }
        }
      },
      jobs);
  return ens;
}

Vec pushforward_density_values(const FlowEnsemble& ens, std::size_t time_idx) {
  const GaussianSpace& space = ens.spec.space;
  const std::size_t n = ens.cloud.n;
  Vec u(n);
  for (std::size_t i = 0; i < n; ++i)
    u[i] = std::exp(log_rho(space, ens.cloud.point(i)) - log_rho(space, ens.point(time_idx, i)) -
                    ens.logdiv[time_idx][i]);
  return u;
}

CompressibilityReport compressibility_estimate(const FlowEnsemble& ens) {
  CompressibilityReport rep;
  const std::size_t n = ens.cloud.n;
  rep.per_time_sup.resize(ens.n_times());
  for (std::size_t k = 0; k < ens.n_times(); ++k) {
    const Vec u = pushforward_density_values(ens, k);
    std::size_t arg = 0;
    double best = u[0];
    for (std::size_t i = 1; i < n; ++i)
      if (u[i] > best) {
        best = u[i];
        arg = i;
      }
    rep.per_time_sup[k] = best;
    if (k == 0 || best > rep.L_hat) {
      rep.L_hat = best;
      rep.argmax_time = k;
      rep.argmax_point = arg;
    }
  }
  // Under-resolved tail: the max sits on one of the lowest-density samples.
  Vec lr(n);
  for (std::size_t i = 0; i < n; ++i) lr[i] = log_rho(ens.spec.space, ens.cloud.point(i));
  const double lr_arg = lr[rep.argmax_point];
  std::size_t below = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (lr[i] < lr_arg) ++below;
  rep.boundary_warning = below < std::size_t(0.02 * double(n));

  if (ens.spec.measure_preserving && ens.scheme == OdeScheme::RK4 &&
      std::abs(rep.L_hat - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "measure-preserving family produced compressibility estimate " << rep.L_hat;
    throw std::runtime_error(msg.str());
  }
  return rep;
}

LrReport lr_norm_estimate(const FlowEnsemble& ens, double r) {
  if (!(r > 1.0) || !std::isfinite(r)) throw hypothesis_error("L^r estimate: r must lie in (1, inf)");
  LrReport rep;
  rep.per_time.resize(ens.n_times());
  for (std::size_t k = 0; k < ens.n_times(); ++k) {
    const Vec u = pushforward_density_values(ens, k);
    double s = 0.0;
    for (double v : u) s += std::pow(v, r - 1.0);
    rep.per_time[k] = std::pow(s / double(u.size()), 1.0 / r);
    rep.L_r = std::max(rep.L_r, rep.per_time[k]);
  }
  return rep;
}

namespace {

void check_shared_grid(const FlowEnsemble& a, const FlowEnsemble& b) {
  if (a.cloud.n != b.cloud.n || a.cloud.dim != b.cloud.dim || a.cloud.seed != b.cloud.seed ||
      a.n_times() != b.n_times())
    throw hypothesis_error("ensembles must share cloud and recording grid");
  for (std::size_t k = 0; k < a.n_times(); ++k)
    if (std::abs(a.times[k] - b.times[k]) > 1e-12)
      throw hypothesis_error("ensembles must share cloud and recording grid");
}

// Streams dist(X_t, Xbar_t) per recorded time and sample.
template <typename Visit>
void for_each_separation(const FlowEnsemble& a, const FlowEnsemble& b, NormMode norm_mode,
                         Visit&& visit) {
  check_shared_grid(a, b);
  const std::size_t n = a.cloud.n, d = a.cloud.dim;
  const Vec& lam = a.spec.space.lambda();
  for (std::size_t k = 0; k < a.n_times(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = a.point(k, i);
      const double* y = b.point(k, i);
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double dc = x[c] - y[c];
        s += norm_mode == NormMode::cameron_martin ? dc * dc / lam[c] : dc * dc;
      }
      visit(k, i, std::sqrt(s));
    }
  }
}

}  // namespace

SeparationTraces separation_traces(const FlowEnsemble& a, const FlowEnsemble& b, double delta,
                                   NormMode norm_mode) {
  SeparationTraces tr;
  tr.times = a.times;
  tr.phi.assign(a.n_times(), 0.0);
  tr.lhs.assign(a.n_times(), 0.0);
  tr.max_dist.assign(a.n_times(), 0.0);
  const double n = double(a.cloud.n);
  for_each_separation(a, b, norm_mode, [&](std::size_t k, std::size_t, double dist) {
    if (delta > 0.0) tr.phi[k] += std::log1p(dist / delta) / n;
    tr.lhs[k] += std::min(dist, 1.0) / n;
    tr.max_dist[k] = std::max(tr.max_dist[k], dist);
  });
  return tr;
}

Vec phi_functional(const FlowEnsemble& a, const FlowEnsemble& b, double delta, NormMode norm_mode) {
  if (!(delta > 0.0)) throw hypothesis_error("phi functional: delta must be positive");
  return separation_traces(a, b, delta, norm_mode).phi;
}

double field_distance(const FlowFieldSpec& b, const FlowFieldSpec& bbar,
                      const FieldDistanceMode& mode, unsigned time_points, unsigned m_per_dim) {
  if (!(b.space == bbar.space)) throw hypothesis_error("field distance: spaces differ");
  if (b.horizon != bbar.horizon) throw hypothesis_error("field distance: horizons differ");
  const double p_eff = mode.lp ? mode.p : 1.0;
  const auto spatial = [&](double t) {
    auto u = b.as_hermite(t);
    auto v = bbar.as_hermite(t);
    const unsigned mo = std::max(u[0].max_order(), v[0].max_order());
    std::vector<HermiteFunction> diff;
    diff.reserve(u.size());
    for (std::size_t c = 0; c < u.size(); ++c)
      diff.push_back(embed_to_order(u[c], mo) - embed_to_order(v[c], mo));
    return lp_of_weighted_field(b.space, diff, value_weights(b.space, diff.size(), mode.norm), p_eff,
                                m_per_dim);
  };
  return simpson(spatial, 0.0, b.horizon, time_points);
}

namespace {

StabilityReport run_stability(const FlowFieldSpec& b, const FlowFieldSpec& bbar, double p,
                              const SampleCloud& cloud, double dt, NormMode norm_mode,
                              const StabilityOptions& opts, double lr_r,
                              const FieldDistanceMode& dist_mode) {
  StabilityReport rep;
  rep.norm_mode = norm_mode;
  rep.p = p;
  rep.r = lr_r;
  rep.delta = field_distance(b, bbar, dist_mode);
  if (rep.delta >= 1.0) {
    std::ostringstream msg;
    msg << "stability hypothesis requires field distance < 1, got " << rep.delta;
    throw hypothesis_error(msg.str());
  }

  FlowEnsemble ens = integrate_flow(b, cloud, dt, opts.scheme, opts.record_stride, opts.blowup_bound);
  FlowEnsemble ensb =
      integrate_flow(bbar, cloud, dt, opts.scheme, opts.record_stride, opts.blowup_bound);

  if (lr_r > 1.0) {
    rep.L = lr_norm_estimate(ens, lr_r).L_r;
    rep.Lbar = lr_norm_estimate(ensb, lr_r).L_r;
  } else {
    const auto ca = compressibility_estimate(ens);
    const auto cb = compressibility_estimate(ensb);
    rep.L = ca.L_hat;
    rep.Lbar = cb.L_hat;
    rep.compressibility_warning = ca.boundary_warning || cb.boundary_warning;
  }

  if (opts.cp_override > 0.0) {
    rep.cp_raw = opts.cp_override;
    rep.cp_used = opts.cp_override;
  } else {
    LusinConfig cfg;
    cfg.variant = norm_mode == NormMode::cameron_martin ? LusinVariant::Wiener2 : LusinVariant::DaPrato1;
    const SampleCloud cp_cloud = sample(b.space, opts.cp_cloud_size, opts.cp_seed);
    const LusinWeight weight = build_weight(cfg, b.as_hermite(0.0), cp_cloud);
    const auto pairs = sample_pairs(cp_cloud, opts.cp_pair_count, opts.cp_seed ^ 0x9e3779b97f4a7c15ULL,
                                    0.02, norm_mode == NormMode::cameron_martin, &b.space);
    rep.cp_raw = lipschitz_probe(weight, pairs).constant_estimate;
    rep.cp_used = opts.cp_inflation * rep.cp_raw;
  }

  rep.b_w1p = b.w1p_time_norm(p, norm_mode);
  rep.C1 = rep.cp_used * (rep.L + rep.Lbar) * rep.b_w1p + rep.Lbar;
  rep.C = 2.0 * rep.C1 + 1.0;

  rep.times = ens.times;
  rep.phi.assign(ens.n_times(), 0.0);
  rep.lhs.assign(ens.n_times(), 0.0);

  if (rep.delta == 0.0) {
    rep.trivial = true;
    double worst = 0.0;
    for_each_separation(ens, ensb, norm_mode, [&](std::size_t k, std::size_t, double dist) {
      rep.lhs[k] += std::min(dist, 1.0) / double(cloud.n);
      worst = std::max(worst, dist);
    });
    rep.phi_bounded = true;
    rep.chebyshev_ok = true;
    rep.main_inequality = worst <= 1e-12;
    return rep;
  }

  rep.rhs = rep.C / std::abs(std::log(rep.delta));
  rep.s = -std::log(rep.delta) / 2.0;
  const double thr = rep.delta * std::expm1(rep.s);  // E_s = { dist > delta (e^s - 1) }
  Vec measure(ens.n_times(), 0.0);
  for_each_separation(ens, ensb, norm_mode, [&](std::size_t k, std::size_t, double dist) {
    rep.phi[k] += std::log1p(dist / rep.delta) / double(cloud.n);
    rep.lhs[k] += std::min(dist, 1.0) / double(cloud.n);
    if (dist > thr)
      measure[k] += 1.0 / double(cloud.n);
    else
      rep.cheb_offset_max = std::max(rep.cheb_offset_max, dist);
  });
  rep.phi_max = *std::max_element(rep.phi.begin(), rep.phi.end());
  rep.cheb_measure_max = *std::max_element(measure.begin(), measure.end());
  rep.cheb_measure_bound = rep.C1 / rep.s;
  rep.cheb_offset_bound = std::exp(rep.s) * rep.delta;

  const double slack = 1.0 + 1e-12;
  rep.phi_bounded = rep.phi_max <= rep.C1 * slack;
  rep.main_inequality = true;
  for (std::size_t k = 0; k < rep.lhs.size(); ++k)
    if (rep.lhs[k] > rep.rhs * slack) rep.main_inequality = false;
  rep.chebyshev_ok =
      rep.cheb_measure_max <= rep.cheb_measure_bound * slack && rep.cheb_offset_max <= rep.cheb_offset_bound * slack;
  return rep;
}

}  // namespace

StabilityReport stability_check(const FlowFieldSpec& b, const FlowFieldSpec& bbar, double p,
                                const SampleCloud& cloud, double dt, NormMode norm_mode,
                                const StabilityOptions& opts) {
  FieldDistanceMode dist_mode;
  dist_mode.lp = false;
  dist_mode.norm = norm_mode;
  return run_stability(b, bbar, p, cloud, dt, norm_mode, opts, 0.0, dist_mode);
}

StabilityReport lr_stability_check(const FlowFieldSpec& b, const FlowFieldSpec& bbar, double r,
                                   double p, const SampleCloud& cloud, double dt,
                                   const StabilityOptions& opts) {
  if (!(r > 1.0) || !std::isfinite(r)) throw hypothesis_error("L^r stability: r must lie in (1, inf)");
  if (p < r / (r - 1.0) - 1e-12) throw hypothesis_error("L^r stability requires p >= r/(r-1)");
  FieldDistanceMode dist_mode;
  dist_mode.lp = true;
  dist_mode.p = p;
  dist_mode.norm = NormMode::ambient;
  return run_stability(b, bbar, p, cloud, dt, NormMode::ambient, opts, r, dist_mode);
}

}  // namespace oulab
