#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace oulab {

// Thrown when an experiment's mathematical hypotheses are not met by the
// supplied data (as opposed to a malformed argument). Callers that sweep
// over configurations catch this and mark the configuration as skipped.
class hypothesis_error : public std::runtime_error {
 public:
  explicit hypothesis_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a computation would exceed a configured budget (node counts,
// cloud sizes) and no fallback is allowed.
class resource_error : public std::runtime_error {
 public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double inv_sqrt_pi = 0.56418958354775628695;  // 1/sqrt(pi)
inline constexpr double sqrt_2 = 1.41421356237309504880;
}  // namespace constants

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

// Log-spaced grid over [lo, hi], n >= 2 points, endpoints exact.
inline Vec log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi, n >= 2");
  Vec g(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t k = 0; k < n; ++k) g[k] = std::exp(llo + (lhi - llo) * double(k) / double(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace oulab
