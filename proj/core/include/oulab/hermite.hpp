#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace oulab {

// Orthonormal Hermite polynomials for the standard Gaussian weight:
//   h_0 = 1,  h_1 = x,  h_{n+1} = (x h_n - sqrt(n) h_{n-1}) / sqrt(n+1),
// so that  E[h_m(Z) h_n(Z)] = delta_{mn}  for Z ~ N(0,1).
// The three-term recurrence in this normalization is stable for large n and
// moderate |x| (coefficients stay O(1), no factorial blow-up).

// Fill out[0..n_max] with h_0(x) .. h_{n_max}(x).
inline void hermite_values(unsigned n_max, double x, double* out) {
  out[0] = 1.0;
  if (n_max == 0) return;
  out[1] = x;
  for (unsigned n = 1; n < n_max; ++n)
    out[n + 1] = (x * out[n] - std::sqrt(double(n)) * out[n - 1]) / std::sqrt(double(n + 1));
}

inline std::vector<double> hermite_values(unsigned n_max, double x) {
  std::vector<double> out(n_max + 1);
  hermite_values(n_max, x, out.data());
  return out;
}

inline double hermite_eval(unsigned n, double x) {
  if (n == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (unsigned k = 1; k < n; ++k) {
    double next = (x * cur - std::sqrt(double(k)) * prev) / std::sqrt(double(k + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

// d/dx h_n = sqrt(n) h_{n-1}.
inline double hermite_deriv(unsigned n, double x) {
  return n == 0 ? 0.0 : std::sqrt(double(n)) * hermite_eval(n - 1, x);
}

}  // namespace oulab
