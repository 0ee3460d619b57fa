#include "oulab/lusin.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "oulab/parallel.hpp"
#include "oulab/quadrature.hpp"

namespace oulab {

namespace {

// Golden-section polish of a smooth interior maximum, bracketed by grid
// neighbors, in log-time coordinates.
double golden_polish(const std::function<double(double)>& val, double t_lo, double t_hi,
                     double best) {
  const double gr = 0.6180339887498949;
  double a = std::log(t_lo), b = std::log(t_hi);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = val(std::exp(c)), fd = val(std::exp(d));
  for (int it = 0; it < 40; ++it) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = val(std::exp(d));
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = val(std::exp(c));
    }
  }
  return std::max(best, std::max(fc, fd));
}

}  // namespace

LusinWeight::LusinWeight(LusinConfig cfg, std::vector<HermiteFunction> components,
                         const SampleCloud& cloud, TimeGrid grid)
    : cfg_(cfg), fs_(std::move(components)),
      kind_{cfg.variant == LusinVariant::DaPrato1 ? SemigroupVariant::DaPratoP
                                                  : SemigroupVariant::WienerT,
            fs_.empty() ? GaussianSpace::standard(1) : fs_.front().space()},
      grid_(std::move(grid)), cloud_(&cloud) {
  if (fs_.empty()) throw std::invalid_argument("LusinWeight: need at least one component");
  for (const auto& f : fs_)
    if (!(f.space() == kind_.space)) throw std::invalid_argument("LusinWeight: mixed spaces");
  if (cloud.dim != kind_.space.dim()) throw std::invalid_argument("LusinWeight: cloud dim mismatch");
  if (cfg_.variant == LusinVariant::Rcd3) {
    if (!(cfg_.alpha > 1.0) || !(cfg_.alpha < 2.0))
      throw std::invalid_argument("LusinWeight: Rcd3 power must lie in (1,2)");
    if (!kind_.space.is_isotropic() || kind_.space.lambda()[0] != 1.0)
      throw std::invalid_argument("LusinWeight: Rcd3 runs on the standard Gaussian space");
  }
  if (grid_.points.empty()) throw std::invalid_argument("LusinWeight: empty time grid");
  for (double t : grid_.points)
    if (!(t > 0.0)) throw std::invalid_argument("LusinWeight: grid times must be > 0");

  partials_.reserve(fs_.size());
  fracs_.reserve(fs_.size());
  const int shift = cfg_.variant == LusinVariant::Rcd3 ? 0 : 1;
  for (const auto& f : fs_) {
    partials_.push_back(f.gradient());
    fracs_.push_back(f.transformed([&](const MultiIndex& a) {
      return std::sqrt(double(shift) + kind_.mu(a));
    }));
  }

  // t -> inf limits: the gradient field averages to its mean, the frac term
  // to the vector of component means.
  {
    const std::size_t d = kind_.space.dim();
    unsigned m = cfg_.m_per_dim;
    if (m == 0) m = d == 1 ? 64u : (d == 2 ? 20u : 10u);
    TensorRule rule(kind_.space, m);
    const double pow_a = cfg_.variant == LusinVariant::Rcd3 ? cfg_.alpha : 1.0;
    grad_limit_infty_ = rule.integrate([&](const double* y) {
      const double v = grad_field(y);
      return pow_a == 1.0 ? v : std::pow(v, pow_a);
    });
  }
  frac_means_.resize(fs_.size());
  for (std::size_t c = 0; c < fs_.size(); ++c) frac_means_[c] = fracs_[c].coeffs()[0];

  // Cache the weight and f on the cloud.
  const std::size_t n = cloud.n, k = fs_.size();
  g_max_.resize(n);
  g_frac_.resize(n);
  g_total_.resize(n);
  f_cache_.resize(n * k);
  parallel_for(n, [&](std::size_t i) {
    const double* x = cloud.point(i);
    g_max_[i] = grad_term_at(x);
    g_frac_[i] = frac_term_at(x);
    g_total_[i] = g_max_[i] + g_frac_[i];
    for (std::size_t c = 0; c < k; ++c) f_cache_[i * k + c] = fs_[c].eval(x);
  });
}

double LusinWeight::grad_field(const double* y) const {
  const bool cm = kind_.wiener_side() && cfg_.variant != LusinVariant::Rcd3;
  double s = 0.0;
  for (const auto& parts : partials_) {
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const double gi = parts[i].eval(y);
      s += (cm ? kind_.space.lambda()[i] : 1.0) * gi * gi;
    }
  }
  return std::sqrt(s);
}

double LusinWeight::mehler_grad_field(double t, const double* x) const {
  const std::size_t d = kind_.space.dim();
  const bool cm = kind_.wiener_side() && cfg_.variant != LusinVariant::Rcd3;
  const bool powered = cfg_.variant == LusinVariant::Rcd3 && cfg_.alpha != 1.0;
  if (fs_.size() == 1 && !powered && d == 1)
    return apply_to_grad_norm(kind_, partials_[0], cm, t, x, cfg_.m_per_dim);

  unsigned m = cfg_.m_per_dim;
  if (m == 0) m = d == 1 ? 64u : (d == 2 ? 20u : 10u);
  const MehlerMap map = mehler_map(kind_, t, x);
  const GaussHermite1D base = gauss_hermite(m);
  // Tensor odometer over standard-normal nodes.
  std::vector<unsigned> idx(d, 0u);
  Vec z(d, 0.0);
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= m;
  double acc = 0.0;
  for (std::size_t kk = 0; kk < total; ++kk) {
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      z[i] = map.mean[i] + map.sdev[i] * base.nodes[idx[i]];
      w *= base.weights[idx[i]];
    }
    const double v = grad_field(z.data());
    acc += w * (powered ? std::pow(v, cfg_.alpha) : v);
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < m) break;
      idx[i] = 0;
    }
  }
  return acc;
}

double LusinWeight::sup_over_grid(const std::function<double(double)>& val, double limit0,
                                  double limit_inf) const {
  const auto& ts = grid_.points;
  double best = -1.0;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double v = val(ts[k]);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  if (!cfg_.grid_only_sup && best_k > 0 && best_k + 1 < ts.size())
    best = golden_polish(val, ts[best_k - 1], ts[best_k + 1], best);
  return std::max(best, std::max(limit0, limit_inf));
}

double LusinWeight::grad_term_at(const double* x) const {
  const bool powered = cfg_.variant == LusinVariant::Rcd3;
  const double l0 = powered ? std::pow(grad_field(x), cfg_.alpha) : grad_field(x);
  const double sup = sup_over_grid([&](double t) { return mehler_grad_field(t, x); }, l0,
                                   grad_limit_infty_);
  return powered ? std::pow(sup, 1.0 / cfg_.alpha) : sup;
}

double LusinWeight::frac_term_at(const double* x) const {
  const std::size_t k = fs_.size();
  // z[c][a] = coeff * H_a(x); the Mehler average in t is a pure decay sum.
  std::vector<Vec> z(k);
  std::vector<Vec> mus(k);
  double lim0_sq = 0.0, liminf_sq = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const Vec B = fracs_[c].basis_values(x);
    const auto& basis = fracs_[c].basis();
    const SemigroupKind base = kind_;  // non-killed
    z[c].resize(B.size());
    mus[c].resize(B.size());
    double v0 = 0.0;
    for (std::size_t a = 0; a < B.size(); ++a) {
      z[c][a] = fracs_[c].coeffs()[a] * B[a];
      mus[c][a] = base.mu(basis[a]);
      v0 += z[c][a];
    }
    lim0_sq += v0 * v0;
    liminf_sq += frac_means_[c] * frac_means_[c];
  }
  const auto val = [&](double t) {
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      double vc = 0.0;
      for (std::size_t a = 0; a < z[c].size(); ++a) vc += z[c][a] * std::exp(-mus[c][a] * t);
      s += vc * vc;
    }
    return std::sqrt(s);
  };
  return sup_over_grid(val, std::sqrt(lim0_sq), std::sqrt(liminf_sq));
}

double LusinWeight::eval_at(const double* x) const { return grad_term_at(x) + frac_term_at(x); }

Vec LusinWeight::f_at(std::size_t i) const {
  const std::size_t k = fs_.size();
  return Vec(f_cache_.begin() + i * k, f_cache_.begin() + (i + 1) * k);
}

Vec LusinWeight::f_eval(const double* x) const {
  Vec out(fs_.size());
  for (std::size_t c = 0; c < fs_.size(); ++c) out[c] = fs_[c].eval(x);
  return out;
}

LusinWeight build_weight(const LusinConfig& cfg, std::vector<HermiteFunction> components,
                         const SampleCloud& cloud, const TimeGrid& grid) {
  return LusinWeight(cfg, std::move(components), cloud, grid);
}

LusinWeight build_weight(const LusinConfig& cfg, const HermiteFunction& f, const SampleCloud& cloud,
                         const TimeGrid& grid) {
  return LusinWeight(cfg, std::vector<HermiteFunction>{f}, cloud, grid);
}

std::vector<PointPair> sample_pairs(const SampleCloud& cloud, std::size_t count, std::uint64_t seed,
                                    double near_fraction, bool cm_geometry,
                                    const GaussianSpace* space) {
  if (cloud.n < 2) throw std::invalid_argument("sample_pairs: cloud too small");
  if (cm_geometry && space == nullptr)
    throw std::invalid_argument("sample_pairs: cm_geometry needs the space");
  const std::size_t n_near = std::size_t(near_fraction * double(count));
  std::vector<PointPair> pairs(count);
  for (std::size_t p = 0; p < count; ++p) {
    std::uint64_t state = derive_stream_state(seed, p);
    PointPair& pr = pairs[p];
    pr.i = std::size_t(splitmix64(state) % cloud.n);
    if (p < n_near) {
      pr.has_offset = true;
      const double u = double(splitmix64(state) >> 11) * 0x1.0p-53;
      const double delta = std::pow(10.0, -3.0 * (1.0 - u));  // log-uniform in [1e-3, 1]
      NormalStream g = NormalStream::with_state(splitmix64(state));
      Vec zdir(cloud.dim);
      double nrm = 0.0;
      for (std::size_t l = 0; l < cloud.dim; ++l) {
        zdir[l] = g.next();
        nrm += zdir[l] * zdir[l];
      }
      nrm = std::sqrt(nrm);
      if (nrm == 0.0) nrm = 1.0;
      pr.y.resize(cloud.dim);
      const double* x = cloud.point(pr.i);
      for (std::size_t l = 0; l < cloud.dim; ++l) {
        // Ambient unit direction, or a Cameron-Martin unit direction
        // (|h|_H = delta) when probing CM shifts.
        const double dir = cm_geometry ? space->sqrt_lambda()[l] * zdir[l] / nrm : zdir[l] / nrm;
        pr.y[l] = x[l] + delta * dir;
      }
    } else {
      pr.j = std::size_t(splitmix64(state) % cloud.n);
      while (pr.j == pr.i) pr.j = std::size_t(splitmix64(state) % cloud.n);
    }
  }
  return pairs;
}

ProbeReport lipschitz_probe(const LusinWeight& weight, const std::vector<PointPair>& pairs,
                            std::uint64_t bootstrap_seed) {
  const SampleCloud& cloud = weight.cloud();
  const bool cm = weight.cm_distance();
  const GaussianSpace& space = weight.base_kind().space;
  const std::size_t k = weight.components().size();

  ProbeReport rep;
  rep.pair_count = pairs.size();
  Vec ratios;
  ratios.reserve(pairs.size());
  std::vector<std::size_t> ratio_pair;  // original index per retained ratio
  ratio_pair.reserve(pairs.size());

  Vec fy, diff(cloud.dim);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const PointPair& pr = pairs[p];
    const double* x = cloud.point(pr.i);
    const double* y = nullptr;
    double gy = 0.0;
    if (pr.has_offset) {
      y = pr.y.data();
      gy = weight.eval_at(y);
      fy = weight.f_eval(y);
    } else {
      y = cloud.point(pr.j);
      gy = weight.values()[pr.j];
      fy = weight.f_at(pr.j);
    }
    for (std::size_t l = 0; l < cloud.dim; ++l) diff[l] = x[l] - y[l];
    const double dist = cm ? space.cm_norm(diff) : norm2(diff);
    const double gsum = weight.values()[pr.i] + gy;
    if (dist < 1e-10 || gsum < 1e-12) {
      ++rep.skipped;
      continue;
    }
    const Vec fx = weight.f_at(pr.i);
    double fd = 0.0;
    for (std::size_t c = 0; c < k; ++c) fd += (fx[c] - fy[c]) * (fx[c] - fy[c]);
    const double ratio = std::sqrt(fd) / (dist * gsum);
    if (ratios.empty() || ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.argmax_pair = p;
    }
    ratios.push_back(ratio);
    ratio_pair.push_back(p);
  }
  rep.constant_estimate = rep.max_ratio;

  // 20 equal bins over [0, max]; degenerate max collapses to one bin.
  const std::size_t nbins = 20;
  rep.bin_edges.resize(nbins + 1);
  rep.histogram.assign(nbins, 0);
  const double top = rep.max_ratio > 0.0 ? rep.max_ratio : 1.0;
  for (std::size_t b = 0; b <= nbins; ++b) rep.bin_edges[b] = top * double(b) / double(nbins);
  for (double r : ratios) {
    std::size_t b = std::min(nbins - 1, std::size_t(r / top * double(nbins)));
    ++rep.histogram[b];
  }

  // Bootstrap distribution of the max ratio (resample pairs with replacement).
  if (!ratios.empty()) {
    const std::size_t B = 100;
    Vec maxes(B);
    for (std::size_t b = 0; b < B; ++b) {
      std::uint64_t state = derive_stream_state(bootstrap_seed, b);
      double mx = 0.0;
      for (std::size_t q = 0; q < ratios.size(); ++q)
        mx = std::max(mx, ratios[splitmix64(state) % ratios.size()]);
      maxes[b] = mx;
    }
    std::sort(maxes.begin(), maxes.end());
    rep.bootstrap_lo = maxes[std::size_t(0.05 * double(B))];
    rep.bootstrap_hi = maxes[std::size_t(0.95 * double(B)) - 1];
  }
  return rep;
}

double brute_force_best_constant(const LusinWeight& weight) {
  const SampleCloud& cloud = weight.cloud();
  if (cloud.dim > 2) throw resource_error("brute_force_best_constant: d must be 1 or 2");
  if (cloud.n > 2000) throw resource_error("brute_force_best_constant: cloud capped at 2000 points");
  const bool cm = weight.cm_distance();
  const GaussianSpace& space = weight.base_kind().space;
  const std::size_t k = weight.components().size();
  double best = 0.0;
  Vec diff(cloud.dim);
  for (std::size_t i = 0; i < cloud.n; ++i) {
    const double* xi = cloud.point(i);
    const Vec fi = weight.f_at(i);
    for (std::size_t j = i + 1; j < cloud.n; ++j) {
      const double* xj = cloud.point(j);
      for (std::size_t l = 0; l < cloud.dim; ++l) diff[l] = xi[l] - xj[l];
      const double dist = cm ? space.cm_norm(diff) : norm2(diff);
      const double gsum = weight.values()[i] + weight.values()[j];
      if (dist < 1e-10 || gsum < 1e-12) continue;
      const Vec fj = weight.f_at(j);
      double fd = 0.0;
      for (std::size_t c = 0; c < k; ++c) fd += (fi[c] - fj[c]) * (fi[c] - fj[c]);
      best = std::max(best, std::sqrt(fd) / (dist * gsum));
    }
  }
  return best;
}

}  // namespace oulab
