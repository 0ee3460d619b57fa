#include "oulab/hermite_function.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "oulab/hermite.hpp"
#include "oulab/quadrature.hpp"
#include "oulab/sampling.hpp"

namespace oulab {

namespace {

struct BasisTable {
  std::shared_ptr<const std::vector<MultiIndex>> list;
  std::shared_ptr<const std::unordered_map<MultiIndex, std::size_t, MultiIndexHash>> lookup;
};

const BasisTable& basis_table(std::size_t dim, unsigned max_order) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, unsigned>, BasisTable> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(dim, max_order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto list = std::make_shared<std::vector<MultiIndex>>(multi_indices_up_to(dim, max_order));
  auto lookup = std::make_shared<std::unordered_map<MultiIndex, std::size_t, MultiIndexHash>>();
  lookup->reserve(list->size());
  for (std::size_t k = 0; k < list->size(); ++k) lookup->emplace((*list)[k], k);
  return cache.emplace(key, BasisTable{std::move(list), std::move(lookup)}).first->second;
}

const std::unordered_map<MultiIndex, std::size_t, MultiIndexHash>& basis_lookup(std::size_t dim,
                                                                                unsigned max_order) {
  return *basis_table(dim, max_order).lookup;
}

}  // namespace

HermiteFunction::HermiteFunction(GaussianSpace space, unsigned max_order)
    : space_(std::move(space)), max_order_(max_order), basis_(basis_table(space_.dim(), max_order).list),
      coeffs_(basis_->size(), 0.0) {}

HermiteFunction::HermiteFunction(GaussianSpace space, unsigned max_order, Vec coeffs)
    : HermiteFunction(std::move(space), max_order) {
  if (coeffs.size() != coeffs_.size())
    throw std::invalid_argument("HermiteFunction: coefficient count does not match basis size");
  coeffs_ = std::move(coeffs);
}

std::size_t HermiteFunction::index_of(const MultiIndex& alpha) const {
  const auto& lut = basis_lookup(space_.dim(), max_order_);
  auto it = lut.find(alpha);
  if (it == lut.end()) throw std::invalid_argument("HermiteFunction: multi-index outside basis");
  return it->second;
}

double HermiteFunction::coeff(const MultiIndex& alpha) const { return coeffs_[index_of(alpha)]; }
void HermiteFunction::set_coeff(const MultiIndex& alpha, double value) { coeffs_[index_of(alpha)] = value; }

double HermiteFunction::eval(const double* x) const {
  const std::size_t d = space_.dim();
  // Per-coordinate tables h_0..h_max(x_i / sqrt(lambda_i)).
  double tables[8 * 32];
  std::vector<double> heap_tables;
  double* tab = tables;
  const std::size_t stride = max_order_ + 1;
  if (d * stride > sizeof(tables) / sizeof(double)) {
    heap_tables.resize(d * stride);
    tab = heap_tables.data();
  }
  for (std::size_t i = 0; i < d; ++i)
    hermite_values(max_order_, x[i] / space_.sqrt_lambda()[i], tab + i * stride);
  double s = 0.0;
  const auto& B = *basis_;
  for (std::size_t k = 0; k < B.size(); ++k) {
    const double c = coeffs_[k];
    if (c == 0.0) continue;
    double term = c;
    for (std::size_t i = 0; i < d; ++i) term *= tab[i * stride + B[k][i]];
    s += term;
  }
  return s;
}

Vec HermiteFunction::basis_values(const double* x) const {
  const std::size_t d = space_.dim();
  const std::size_t stride = max_order_ + 1;
  std::vector<double> tab(d * stride);
  for (std::size_t i = 0; i < d; ++i)
    hermite_values(max_order_, x[i] / space_.sqrt_lambda()[i], tab.data() + i * stride);
  const auto& B = *basis_;
  Vec out(B.size());
  for (std::size_t k = 0; k < B.size(); ++k) {
    double term = 1.0;
    for (std::size_t i = 0; i < d; ++i) term *= tab[i * stride + B[k][i]];
    out[k] = term;
  }
  return out;
}

unsigned HermiteFunction::degree() const {
  unsigned deg = 0;
  for (std::size_t k = 0; k < basis_->size(); ++k)
    if (coeffs_[k] != 0.0) deg = std::max(deg, (*basis_)[k].order());
  return deg;
}

void HermiteFunction::check_compatible(const HermiteFunction& o) const {
  if (!(space_ == o.space_) || max_order_ != o.max_order_)
    throw std::invalid_argument("HermiteFunction: incompatible operands (space or max_order differ)");
}

HermiteFunction& HermiteFunction::operator+=(const HermiteFunction& o) {
  check_compatible(o);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  return *this;
}
HermiteFunction& HermiteFunction::operator-=(const HermiteFunction& o) {
  check_compatible(o);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  return *this;
}
HermiteFunction& HermiteFunction::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

HermiteFunction HermiteFunction::partial(std::size_t i) const {
  if (i >= space_.dim()) throw std::invalid_argument("HermiteFunction::partial: coordinate out of range");
  HermiteFunction out(space_, max_order_ > 0 ? max_order_ - 1 : 0u);
  const auto& lut = basis_lookup(space_.dim(), out.max_order_);
  const auto& B = *basis_;
  for (std::size_t k = 0; k < B.size(); ++k) {
    const double c = coeffs_[k];
    if (c == 0.0 || B[k][i] == 0) continue;
    const double factor = std::sqrt(double(B[k][i]) / space_.lambda()[i]);
    out.coeffs_[lut.at(B[k].lowered(i))] += c * factor;
  }
  return out;
}

std::vector<HermiteFunction> HermiteFunction::gradient() const {
  std::vector<HermiteFunction> g;
  g.reserve(space_.dim());
  for (std::size_t i = 0; i < space_.dim(); ++i) g.push_back(partial(i));
  return g;
}

HermiteFunction HermiteFunction::transformed(const std::function<double(const MultiIndex&)>& g) const {
  HermiteFunction out = *this;
  const auto& B = *basis_;
  for (std::size_t k = 0; k < B.size(); ++k) out.coeffs_[k] = coeffs_[k] * g(B[k]);
  return out;
}

HermiteFunction::Product HermiteFunction::product(const HermiteFunction& other, unsigned max_order_out) const {
  if (!(space_ == other.space_))
    throw std::invalid_argument("HermiteFunction::product: operands live on different spaces");
  const unsigned full_deg = degree() + other.degree();
  // Exactness: integrands f*g*H_gamma have coordinate degree <= full_deg +
  // max_order_out, and f*g*f*g has 2*full_deg.
  const unsigned m = std::max(full_deg + max_order_out, 2 * full_deg) / 2 + 1;
  TensorRule rule(space_, m);
  HermiteFunction out = project(space_, max_order_out,
                                [&](const double* x) { return eval(x) * other.eval(x); }, m);
  const double total_sq = rule.integrate([&](const double* x) {
    const double v = eval(x) * other.eval(x);
    return v * v;
  });
  const double kept_sq = dot(out.coeffs_, out.coeffs_);
  return Product{std::move(out), std::sqrt(std::max(0.0, total_sq - kept_sq))};
}

HermiteFunction HermiteFunction::project(const GaussianSpace& space, unsigned max_order,
                                         const std::function<double(const double*)>& fn,
                                         unsigned m_per_dim) {
  TensorRule rule(space, m_per_dim);
  HermiteFunction out(space, max_order);
  const auto& B = out.basis();
  std::vector<double> fvals(rule.size());
  for (std::size_t k = 0; k < rule.size(); ++k) fvals[k] = fn(rule.node(k));
  const std::size_t d = space.dim();
  std::vector<double> tab(d * (max_order + 1));
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double* x = rule.node(k);
    for (std::size_t i = 0; i < d; ++i)
      hermite_values(max_order, x[i] / space.sqrt_lambda()[i], tab.data() + i * (max_order + 1));
    const double wf = rule.weight(k) * fvals[k];
    for (std::size_t b = 0; b < B.size(); ++b) {
      double term = wf;
      for (std::size_t i = 0; i < d; ++i) term *= tab[i * (max_order + 1) + B[b][i]];
      out.coeffs_[b] += term;
    }
  }
  return out;
}

HermiteFunction HermiteFunction::random(const GaussianSpace& space, unsigned max_order, std::uint64_t seed,
                                        double decay) {
  HermiteFunction out(space, max_order);
  NormalStream g(seed, 0xe9f17f4e1ull);
  const auto& B = out.basis();
  for (std::size_t k = 0; k < B.size(); ++k) out.coeffs_[k] = g.next() * std::pow(decay, B[k].order());
  const double n = out.l2_norm();
  if (n > 0.0) out *= 1.0 / n;
  return out;
}

double inner(const HermiteFunction& a, const HermiteFunction& b) {
  if (!(a.space() == b.space()) || a.max_order() != b.max_order())
    throw std::invalid_argument("inner: incompatible Hermite expansions");
  return dot(a.coeffs(), b.coeffs());
}

}  // namespace oulab
