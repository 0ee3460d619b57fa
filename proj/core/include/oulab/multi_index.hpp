#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oulab {

// Multi-index alpha in N^d addressing the tensor Hermite basis.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : a_(dim, 0u) {}
  MultiIndex(std::initializer_list<unsigned> init) : a_(init) {}
  explicit MultiIndex(std::vector<unsigned> a) : a_(std::move(a)) {}

  std::size_t dim() const { return a_.size(); }
  unsigned operator[](std::size_t i) const { return a_[i]; }
  unsigned& operator[](std::size_t i) { return a_[i]; }

  // |alpha| = sum of entries (total degree of the basis element).
  unsigned order() const { return std::accumulate(a_.begin(), a_.end(), 0u); }

  MultiIndex lowered(std::size_t i) const {
    if (a_[i] == 0) throw std::invalid_argument("MultiIndex::lowered: entry already zero");
    MultiIndex r = *this;
    --r.a_[i];
    return r;
  }
  MultiIndex raised(std::size_t i) const {
    MultiIndex r = *this;
    ++r.a_[i];
    return r;
  }

  bool operator==(const MultiIndex& o) const { return a_ == o.a_; }
  bool operator!=(const MultiIndex& o) const { return a_ != o.a_; }
  // Graded lexicographic: sort by order first, then lexicographically.
  bool operator<(const MultiIndex& o) const {
    unsigned s = order(), t = o.order();
    if (s != t) return s < t;
    return a_ < o.a_;
  }

  const std::vector<unsigned>& entries() const { return a_; }

 private:
  std::vector<unsigned> a_;
};

// All multi-indices of dimension d with order <= max_order, in graded
// lexicographic order. The ordering is deterministic and is relied upon by
// the dense coefficient layout of HermiteFunction.
inline std::vector<MultiIndex> multi_indices_up_to(std::size_t dim, unsigned max_order) {
  if (dim == 0) throw std::invalid_argument("multi_indices_up_to: dim must be positive");
  std::vector<MultiIndex> out;
  std::vector<unsigned> cur(dim, 0u);
  // Enumerate all alpha with |alpha| = n for n = 0..max_order.
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t pos, unsigned rest) {
    if (pos + 1 == dim) {
      cur[pos] = rest;
      out.emplace_back(cur);
      return;
    }
    for (unsigned v = 0; v <= rest; ++v) {
      cur[pos] = v;
      rec(pos + 1, rest - v);
    }
  };
  for (unsigned n = 0; n <= max_order; ++n) rec(0, n);
  return out;
}

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& m) const {
    std::size_t h = 0x9e3779b97f4a7c15ull ^ m.dim();
    for (unsigned v : m.entries()) h = (h ^ v) * 0x100000001b3ull;
    return h;
  }
};

}  // namespace oulab
