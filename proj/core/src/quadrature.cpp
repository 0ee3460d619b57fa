#include "oulab/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oulab {

GaussHermite1D gauss_hermite(unsigned m) {
  if (m == 0) throw std::invalid_argument("gauss_hermite: m must be positive");
  GaussHermite1D rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  if (m == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 1.0;
    return rule;
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (unsigned k = 1; k < m; ++k) {
    const double b = std::sqrt(double(k));
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) throw std::runtime_error("gauss_hermite: eigensolver failed");
  for (unsigned k = 0; k < m; ++k) {
    rule.nodes[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    rule.weights[k] = v0 * v0;  // total weight of N(0,1) is 1
  }
  // Symmetrize: eigenvalues of the Jacobi matrix come in +- pairs; clean
  // roundoff so that the rule integrates odd monomials to exactly 0.
  for (unsigned k = 0; k < m / 2; ++k) {
    const unsigned j = m - 1 - k;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[k]);
    rule.nodes[k] = -x;
    rule.nodes[j] = x;
    const double w = 0.5 * (rule.weights[k] + rule.weights[j]);
    rule.weights[k] = w;
    rule.weights[j] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  return rule;
}

TensorRule::TensorRule(const GaussianSpace& space, unsigned m_per_dim)
    : dim_(space.dim()), m_(m_per_dim) {
  const GaussHermite1D base = gauss_hermite(m_per_dim);
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (total > (std::size_t(1) << 40) / m_per_dim)
      throw std::invalid_argument("TensorRule: node count overflow");
    total *= m_per_dim;
  }
  nodes_.resize(total * dim_);
  weights_.assign(total, 1.0);
  std::vector<unsigned> idx(dim_, 0u);
  for (std::size_t k = 0; k < total; ++k) {
    double w = 1.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      nodes_[k * dim_ + i] = space.sqrt_lambda()[i] * base.nodes[idx[i]];
      w *= base.weights[idx[i]];
    }
    weights_[k] = w;
    for (std::size_t i = dim_; i-- > 0;) {  // last coordinate fastest
      if (++idx[i] < m_per_dim) break;
      idx[i] = 0;
    }
  }
}

unsigned max_points_per_dim(std::size_t dim, std::size_t max_total_nodes) {
  unsigned m = 1;
  while (true) {
    std::size_t total = 1;
    bool fits = true;
    for (std::size_t i = 0; i < dim; ++i) {
      if (total > max_total_nodes / (m + 1)) {
        fits = false;
        break;
      }
      total *= (m + 1);
    }
    if (!fits || total > max_total_nodes) return m;
    ++m;
    if (m >= 1u << 20) return m;  // absurd budgets: stop growing
  }
}

Vec hermite_to_monomial(const Vec& hermite_coeffs) {
  if (hermite_coeffs.empty()) return {0.0};
  const std::size_t n = hermite_coeffs.size() - 1;
  // Monomial rows of He_0..He_n via He_{k+1} = x He_k - k He_{k-1}.
  std::vector<Vec> he(n + 1);
  he[0] = {1.0};
  if (n >= 1) he[1] = {0.0, 1.0};
  for (std::size_t k = 1; k < n; ++k) {
    Vec next(k + 2, 0.0);
    for (std::size_t j = 0; j < he[k].size(); ++j) next[j + 1] += he[k][j];
    for (std::size_t j = 0; j < he[k - 1].size(); ++j) next[j] -= double(k) * he[k - 1][j];
    he[k + 1] = std::move(next);
  }
  Vec out(n + 1, 0.0);
  double fact = 1.0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) fact *= double(k);
    const double c = hermite_coeffs[k] / std::sqrt(fact);  // h_k = He_k / sqrt(k!)
    if (c == 0.0) continue;
    for (std::size_t j = 0; j < he[k].size(); ++j) out[j] += c * he[k][j];
  }
  return out;
}

Vec affine_compose(const Vec& monomial_coeffs, double shift, double scale) {
  // Horner in (shift + scale*u): out <- out * (shift + scale*u) + c_k.
  Vec out(1, 0.0);
  for (std::size_t k = monomial_coeffs.size(); k-- > 0;) {
    Vec next(out.size() + 1, 0.0);
    for (std::size_t j = 0; j < out.size(); ++j) {
      next[j] += out[j] * shift;
      next[j + 1] += out[j] * scale;
    }
    next[0] += monomial_coeffs[k];
    // Trailing zero would grow the vector each round; trim it.
    while (next.size() > 1 && next.back() == 0.0) next.pop_back();
    out = std::move(next);
  }
  return out;
}

namespace {
double normal_pdf(double x) {
  return std::isinf(x) ? 0.0 : std::exp(-0.5 * x * x) / std::sqrt(2.0 * constants::pi);
}
double normal_cdf(double x) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-x / constants::sqrt_2);
}
double pow_or_zero(double x, unsigned k) {
  // x^k with the convention (+-inf)^k * phi(inf) = 0 handled by the caller.
  double r = 1.0;
  for (unsigned i = 0; i < k; ++i) r *= x;
  return r;
}
}  // namespace

Vec gauss_partial_moments(unsigned k_max, double a, double b) {
  Vec M(k_max + 1, 0.0);
  const double fa = normal_pdf(a), fb = normal_pdf(b);
  M[0] = normal_cdf(b) - normal_cdf(a);
  if (k_max >= 1) M[1] = fa - fb;
  for (unsigned k = 2; k <= k_max; ++k) {
    const double ea = std::isinf(a) ? 0.0 : pow_or_zero(a, k - 1) * fa;
    const double eb = std::isinf(b) ? 0.0 : pow_or_zero(b, k - 1) * fb;
    M[k] = double(k - 1) * M[k - 2] + ea - eb;
  }
  return M;
}

Vec poly_real_roots(const Vec& monomial_coeffs) {
  // Strip negligible leading coefficients relative to the largest one.
  double cmax = 0.0;
  for (double c : monomial_coeffs) cmax = std::max(cmax, std::abs(c));
  if (cmax == 0.0) return {};
  std::size_t deg = monomial_coeffs.size() - 1;
  while (deg > 0 && std::abs(monomial_coeffs[deg]) <= 1e-14 * cmax) --deg;
  if (deg == 0) return {};
  if (deg == 1) return {-monomial_coeffs[0] / monomial_coeffs[1]};
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(deg, deg);
  for (std::size_t k = 0; k < deg; ++k) C(k, deg - 1) = -monomial_coeffs[k] / monomial_coeffs[deg];
  for (std::size_t k = 1; k < deg; ++k) C(k, k - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(C);
  Vec roots;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto z = es.eigenvalues()(i);
    if (std::abs(z.imag()) <= 1e-9 * (1.0 + std::abs(z.real()))) roots.push_back(z.real());
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

double abs_poly_gauss_integral(const Vec& monomial_coeffs) {
  if (monomial_coeffs.empty()) return 0.0;
  const Vec roots = poly_real_roots(monomial_coeffs);
  const unsigned k_max = unsigned(monomial_coeffs.size() - 1);
  const double inf = std::numeric_limits<double>::infinity();
  double total = 0.0;
  double lo = -inf;
  for (std::size_t r = 0; r <= roots.size(); ++r) {
    const double hi = r < roots.size() ? roots[r] : inf;
    if (hi > lo) {
      const Vec M = gauss_partial_moments(k_max, lo, hi);
      double piece = 0.0;
      for (unsigned k = 0; k <= k_max; ++k) piece += monomial_coeffs[k] * M[k];
      total += std::abs(piece);
    }
    lo = hi;
  }
  return total;
}

}  // namespace oulab
