#include "oulab/gaussian_space.hpp"

#include <cmath>
#include <stdexcept>

#include "oulab/quadrature.hpp"

namespace oulab {

double white_noise_exp_integral(const GaussianSpace& space, const Vec& h, unsigned m_per_dim) {
  if (h.size() != space.dim()) throw std::invalid_argument("white_noise_exp_integral: dimension mismatch");
  TensorRule rule(space, m_per_dim);
  return rule.integrate([&](const double* x) {
    double s = 0.0;
    for (std::size_t i = 0; i < space.dim(); ++i) s += h[i] * x[i] / space.sqrt_lambda()[i];
    return std::exp(s);
  });
}

}  // namespace oulab
