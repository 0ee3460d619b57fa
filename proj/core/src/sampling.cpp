#include "oulab/sampling.hpp"

#include <cmath>

#include "oulab/parallel.hpp"

namespace oulab {

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0,1], u2 in [0,1); 53-bit mantissas.
  const double u1 = 1.0 - double(splitmix64(state_) >> 11) * 0x1.0p-53;
  const double u2 = double(splitmix64(state_) >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * constants::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

SampleCloud sample(const GaussianSpace& space, std::size_t n, std::uint64_t seed, unsigned jobs) {
  SampleCloud cloud;
  cloud.n = n;
  cloud.dim = space.dim();
  cloud.seed = seed;
  cloud.data.resize(n * cloud.dim);
  parallel_for(
      n,
      [&](std::size_t i) {
        NormalStream g(seed, i);
        double* p = cloud.point(i);
        for (std::size_t j = 0; j < cloud.dim; ++j) p[j] = space.sqrt_lambda()[j] * g.next();
      },
      jobs);
  return cloud;
}

}  // namespace oulab
