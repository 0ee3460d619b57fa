#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "oulab/common.hpp"
#include "oulab/gaussian_space.hpp"
#include "oulab/multi_index.hpp"

namespace oulab {

struct HermiteProduct;

// Finite expansion f = sum_alpha c_alpha H_alpha in the tensor Hermite basis
// orthonormal w.r.t. the space's Gaussian measure:
//   H_alpha(x) = prod_i h_{alpha_i}(x_i / sqrt(lambda_i)).
// Coefficients are stored densely over all |alpha| <= max_order in graded
// lexicographic order; the basis table is shared per (dim, max_order).
class HermiteFunction {
 public:
  HermiteFunction(GaussianSpace space, unsigned max_order);
  HermiteFunction(GaussianSpace space, unsigned max_order, Vec coeffs);

  const GaussianSpace& space() const { return space_; }
  unsigned max_order() const { return max_order_; }
  std::size_t basis_size() const { return basis_->size(); }
  const std::vector<MultiIndex>& basis() const { return *basis_; }
  const Vec& coeffs() const { return coeffs_; }
  Vec& coeffs() { return coeffs_; }

  double coeff(const MultiIndex& alpha) const;
  void set_coeff(const MultiIndex& alpha, double value);

  double eval(const double* x) const;
  double eval(const Vec& x) const { return eval(x.data()); }

  // Values of every basis element at x, aligned with coeffs(). Lets callers
  // evaluate many diagonal reweightings of the same f at the same point
  // without re-walking the Hermite tables.
  Vec basis_values(const double* x) const;

  // Largest |alpha| with a nonzero coefficient (0 for the zero function).
  unsigned degree() const;

  // L2(m) norm; the basis is orthonormal, so this is the coefficient norm.
  double l2_norm() const { return norm2(coeffs_); }
  double integral() const { return coeffs_[0]; }  // <f, H_0> = mean

  HermiteFunction& operator+=(const HermiteFunction& o);
  HermiteFunction& operator-=(const HermiteFunction& o);
  HermiteFunction& operator*=(double s);
  friend HermiteFunction operator+(HermiteFunction a, const HermiteFunction& b) { return a += b; }
  friend HermiteFunction operator-(HermiteFunction a, const HermiteFunction& b) { return a -= b; }
  friend HermiteFunction operator*(double s, HermiteFunction f) { return f *= s; }

  // Ambient partial derivative d/dx_i; exact on the basis:
  //   d/dx_i H_alpha = sqrt(alpha_i / lambda_i) H_{alpha - e_i}.
  HermiteFunction partial(std::size_t i) const;
  std::vector<HermiteFunction> gradient() const;

  // New expansion with coefficients c_alpha * g(alpha); used for diagonal
  // (spectral) operators.
  HermiteFunction transformed(const std::function<double(const MultiIndex&)>& g) const;

  // Pointwise product truncated at max_order_out. `discarded` reports the
  // L2 mass of the dropped tail (exact: the full product has finite degree).
  using Product = HermiteProduct;
  Product product(const HermiteFunction& other, unsigned max_order_out) const;

  // L2 projection of a black-box function onto the basis, via a tensor Gauss
  // rule with m_per_dim nodes (exact if fn is polynomial of coordinate degree
  // <= 2*m_per_dim - 1 - max_order).
  static HermiteFunction project(const GaussianSpace& space, unsigned max_order,
                                 const std::function<double(const double*)>& fn, unsigned m_per_dim);

  // Seeded random expansion: i.i.d. standard normal coefficients damped by
  // decay^|alpha| and normalized to unit L2 norm.
  static HermiteFunction random(const GaussianSpace& space, unsigned max_order, std::uint64_t seed,
                                double decay = 0.5);

 private:
  void check_compatible(const HermiteFunction& o) const;
  std::size_t index_of(const MultiIndex& alpha) const;

  GaussianSpace space_;
  unsigned max_order_;
  std::shared_ptr<const std::vector<MultiIndex>> basis_;
  Vec coeffs_;
};

struct HermiteProduct {
  HermiteFunction value;
  double discarded;
};

double inner(const HermiteFunction& a, const HermiteFunction& b);

}  // namespace oulab
