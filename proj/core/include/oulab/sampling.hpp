#pragma once

#include <cstdint>
#include <vector>

#include "oulab/common.hpp"
#include "oulab/gaussian_space.hpp"

namespace oulab {

// splitmix64 step; the whole sampling layer is counter-based on top of it so
// that draws depend only on (seed, stream, position), never on thread count.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Independent substream: mixes the stream id through one extra round.
inline std::uint64_t derive_stream_state(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s) ^ (0x9e3779b97f4a7c15ull * (stream + 1));
  return splitmix64(a) ^ a;
}

// Standard normal draws via Box-Muller on splitmix64 output. Bit-exact for
// fixed (seed, stream) regardless of how work is partitioned.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream)
      : state_(derive_stream_state(seed, stream)) {}

  // Continue from a raw splitmix64 state (for callers that interleave
  // uniform and normal draws on one counter).
  static NormalStream with_state(std::uint64_t state) {
    NormalStream g(0, 0);
    g.state_ = state;
    return g;
  }

  double next();

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct SampleCloud {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  Vec data;  // n * dim, point-major

  const double* point(std::size_t i) const { return &data[i * dim]; }
  double* point(std::size_t i) { return &data[i * dim]; }
  Vec point_vec(std::size_t i) const {
    return Vec(data.begin() + i * dim, data.begin() + (i + 1) * dim);
  }
};

// n i.i.d. draws from the space's Gaussian measure. Point i is generated from
// its own substream, so clouds of different sizes share a common prefix.
SampleCloud sample(const GaussianSpace& space, std::size_t n, std::uint64_t seed, unsigned jobs = 0);

}  // namespace oulab
