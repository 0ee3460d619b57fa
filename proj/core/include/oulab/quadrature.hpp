#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "oulab/common.hpp"
#include "oulab/gaussian_space.hpp"

namespace oulab {

// Gauss nodes/weights for the standard normal weight (probabilists'):
//   int f dN(0,1)  ~=  sum_k w_k f(x_k),  exact for polynomials of degree < 2m.
struct GaussHermite1D {
  Vec nodes;
  Vec weights;
};

// Golub-Welsch on the symmetric Jacobi matrix of the orthonormal Hermite
// recurrence (off-diagonal sqrt(k)); weights are squared first eigenvector
// components. Deterministic for fixed m.
GaussHermite1D gauss_hermite(unsigned m);

// Tensor rule for a Gaussian space: node j of coordinate i is
// sqrt(lambda_i) * x_j. Layout: nodes are enumerated with the last
// coordinate fastest; flat storage point-major.
class TensorRule {
 public:
  TensorRule(const GaussianSpace& space, unsigned m_per_dim);

  std::size_t size() const { return weights_.size(); }
  std::size_t dim() const { return dim_; }
  unsigned points_per_dim() const { return m_; }
  const double* node(std::size_t k) const { return &nodes_[k * dim_]; }
  double weight(std::size_t k) const { return weights_[k]; }

  template <typename Fn>
  double integrate(Fn&& f) const {
    double s = 0.0;
    for (std::size_t k = 0; k < size(); ++k) s += weights_[k] * f(node(k));
    return s;
  }

 private:
  std::size_t dim_;
  unsigned m_;
  Vec nodes_;    // size * dim, point-major
  Vec weights_;  // size
};

// Largest per-dim node count whose tensor rule fits in max_total_nodes
// (at least 1). Used to fall back to Monte Carlo when even m_per_dim = 2
// would not fit.
unsigned max_points_per_dim(std::size_t dim, std::size_t max_total_nodes);

// --- exact 1D piecewise-polynomial integration against N(0,1) ---
// Monomial coefficients are ascending: p(u) = sum_k c[k] u^k.

// Monomial coefficients of sum_n hermite_coeffs[n] h_n(u) (orthonormal h_n).
Vec hermite_to_monomial(const Vec& hermite_coeffs);

// Coefficients of u -> p(shift + scale * u).
Vec affine_compose(const Vec& monomial_coeffs, double shift, double scale);

// Partial Gaussian moments M_k = int_a^b u^k phi(u) du for k = 0..k_max
// (a = -inf / b = +inf allowed).
Vec gauss_partial_moments(unsigned k_max, double a, double b);

// Exact int |p(u)| phi(u) du: real roots from the companion matrix split the
// line into sign-constant pieces, each integrated by partial moments.
double abs_poly_gauss_integral(const Vec& monomial_coeffs);

// Real roots of p (ascending coefficients), sorted.
Vec poly_real_roots(const Vec& monomial_coeffs);

}  // namespace oulab
