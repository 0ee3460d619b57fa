#include <cmath>

#include "doctest.h"
#include "oulab/sampling.hpp"
#include "oulab/semigroup.hpp"

using namespace oulab;

namespace {

HermiteFunction x_squared(const GaussianSpace& space) {
  // x^2 = sqrt(2) h_2 + h_0 on the standard line
  HermiteFunction f(space, 2);
  f.set_coeff(MultiIndex{2}, std::sqrt(2.0));
  f.set_coeff(MultiIndex{0}, 1.0);
  return f;
}

}  // namespace

TEST_CASE("wiener semigroup on x^2: T_t x^2 = e^{-2t} x^2 + (1 - e^{-2t})") {
  const GaussianSpace space = GaussianSpace::standard(1);
  const SemigroupKind kind{SemigroupVariant::WienerT, space};
  const HermiteFunction f = x_squared(space);
  const HermiteFunction ft = apply_spectral(kind, f, 0.3);
  CHECK(ft.eval(Vec{0.7}) == doctest::Approx(0.7201060655920465).epsilon(1e-14));

  // quadrature route agrees without touching coefficients
  const SemigroupEvalReport rep =
      apply_pointwise(kind, [&](const double* x) { return f.eval(x); }, 0.3, Vec{0.7}.data());
  CHECK(rep.value == doctest::Approx(0.7201060655920465).epsilon(1e-12));
}

TEST_CASE("da prato multiplier is alpha/(2 lambda)") {
  const GaussianSpace space(Vec{2.0});
  const SemigroupKind kind{SemigroupVariant::DaPratoP, space};
  CHECK(kind.mu(MultiIndex{1}) == doctest::Approx(0.25).epsilon(1e-15));
  HermiteFunction f(space, 1);
  f.set_coeff(MultiIndex{1}, 1.0);
  const HermiteFunction ft = apply_spectral(kind, f, 1.0);
  CHECK(ft.coeff(MultiIndex{1}) == doctest::Approx(0.7788007830714049).epsilon(1e-14));
}

TEST_CASE("killed variants shift the multiplier by one") {
  const GaussianSpace space = GaussianSpace::standard(2);
  const SemigroupKind killed{SemigroupVariant::KilledT, space};
  CHECK(killed.mu(MultiIndex{0, 0}) == doctest::Approx(1.0));
  CHECK(killed.mu(MultiIndex{2, 1}) == doctest::Approx(4.0));
  CHECK(killed.base().variant == SemigroupVariant::WienerT);

  HermiteFunction c(space, 0);
  c.set_coeff(MultiIndex{0, 0}, 3.0);
  const HermiteFunction ct = apply_spectral(killed, c, 0.5);
  CHECK(ct.coeff(MultiIndex{0, 0}) == doctest::Approx(3.0 * 0.6065306597126334).epsilon(1e-14));
}

TEST_CASE("mehler map moves the mean and fills in the variance") {
  const GaussianSpace space = GaussianSpace::standard(1);
  const SemigroupKind kind{SemigroupVariant::WienerT, space};
  // T_t x = e^{-t} x checked through the black-box route
  const SemigroupEvalReport rep =
      apply_pointwise(kind, [](const double* x) { return x[0]; }, 0.4, Vec{1.1}.data());
  CHECK(rep.value == doctest::Approx(0.7373520506392033).epsilon(1e-12));

  const MehlerMap map = mehler_map(kind, 0.4, Vec{1.1}.data());
  CHECK(map.mean[0] == doctest::Approx(std::exp(-0.4) * 1.1).epsilon(1e-13));
  CHECK(map.sdev[0] == doctest::Approx(std::sqrt(1.0 - std::exp(-0.8))).epsilon(1e-13));
}

TEST_CASE("semigroup property and t=0 identity on the spectral route") {
  const GaussianSpace space(Vec{1.0, 0.5});
  const SemigroupKind kind{SemigroupVariant::DaPratoP, space};
  const HermiteFunction f = HermiteFunction::random(space, 4, 21);
  const HermiteFunction a = apply_spectral(kind, apply_spectral(kind, f, 0.3), 0.7);
  const HermiteFunction b = apply_spectral(kind, f, 1.0);
  for (std::size_t k = 0; k < a.coeffs().size(); ++k)
    CHECK(a.coeffs()[k] == doctest::Approx(b.coeffs()[k]).epsilon(1e-13));
  const HermiteFunction id = apply_spectral(kind, f, 0.0);
  CHECK(id.coeffs() == f.coeffs());
}

TEST_CASE("gradient contraction: equality for linear f, inequality in general") {
  const GaussianSpace space = GaussianSpace::standard(1);
  const SampleCloud cloud = sample(space, 16, 77);

  for (const SemigroupVariant v : {SemigroupVariant::DaPratoP, SemigroupVariant::WienerT}) {
    const SemigroupKind kind{v, space};
    HermiteFunction lin(space, 1);
    lin.set_coeff(MultiIndex{1}, 0.8);
    lin.set_coeff(MultiIndex{0}, -0.2);
    const ContractionReport eq = contraction_probe(kind, lin, 0.9, cloud);
    CHECK(eq.evaluated == cloud.n);
    CHECK(std::abs(eq.max_ratio - 1.0) < 1e-12);  // 1d denominator is exact

    const HermiteFunction f = HermiteFunction::random(space, 4, 31);
    const ContractionReport rep = contraction_probe(kind, f, 0.9, cloud);
    CHECK(rep.max_ratio <= 1.0 + 1e-10);
    CHECK(rep.max_ratio > 0.0);
  }
}

TEST_CASE("anisotropic spaces: scalar-rate commutation is a wiener-side identity") {
  const GaussianSpace space(Vec{2.0, 0.5});
  const SampleCloud cloud = sample(space, 8, 79);
  HermiteFunction lin(space, 1);
  lin.set_coeff(MultiIndex{0, 1}, 1.0);  // along the fast coordinate

  const ContractionReport wien =
      contraction_probe({SemigroupVariant::WienerT, space}, lin, 0.6, cloud);
  CHECK(std::abs(wien.max_ratio - 1.0) < 1e-10);

  // da prato decays this coordinate at e^{-t/(2*0.5)} against the reference
  // rate e^{-t/(2*2)}: the ratio is e^{-3t/4} < 1, not an equality
  const ContractionReport dap =
      contraction_probe({SemigroupVariant::DaPratoP, space}, lin, 0.6, cloud);
  CHECK(dap.max_ratio == doctest::Approx(std::exp(-0.75 * 0.6)).epsilon(1e-9));
}

TEST_CASE("contraction probe rejects killed kinds") {
  const GaussianSpace space = GaussianSpace::standard(1);
  const SemigroupKind kind{SemigroupVariant::KilledP, space};
  const HermiteFunction f = HermiteFunction::random(space, 2, 3);
  const SampleCloud cloud = sample(space, 4, 1);
  CHECK_THROWS_AS(contraction_probe(kind, f, 1.0, cloud), std::invalid_argument);
}

TEST_CASE("log-convexity probe: inequality, exponent relation, sign guard") {
  const GaussianSpace space = GaussianSpace::standard(1);
  const SemigroupKind kind{SemigroupVariant::WienerT, space};
  const HermiteFunction h = HermiteFunction::random(space, 2, 11);
  const HermiteFunction g = h.product(h, 4).value;
  const auto field = [&](const double* x) { return g.eval(x); };

  const Vec x0{-0.4}, x1{1.0};
  const double s = 0.3, t = 0.8;
  const LogConvexityResult r = log_convexity_probe(kind, field, x0, x1, s, t);
  CHECK(r.lhs > 0.0);
  CHECK(r.lhs <= r.rhs_t * (1.0 + 1e-12));
  // rhs_t / rhs_halft = exp(w/(2t)), w = |x1-x0|^2 s(1-s)
  const double w = 1.4 * 1.4 * s * (1.0 - s);
  CHECK(r.rhs_t / r.rhs_halft == doctest::Approx(std::exp(w / (2.0 * t))).epsilon(1e-12));

  CHECK_THROWS_AS(
      log_convexity_probe(kind, [](const double*) { return -1.0; }, x0, x1, s, t),
      hypothesis_error);
}

TEST_CASE("harnack probe on the standard space") {
  const GaussianSpace space = GaussianSpace::standard(2);
  const HermiteFunction h = HermiteFunction::random(space, 2, 13);
  const HermiteFunction g = h.product(h, 4).value;
  const auto field = [&](const double* x) { return g.eval(x); };

  const HarnackResult r =
      harnack_probe(space, field, 1.5, 0.7, Vec{0.2, -0.5}, Vec{-0.3, 0.4});
  CHECK(r.lhs > 0.0);
  CHECK(r.lhs <= r.rhs * (1.0 + 1e-12));

  // x = y reduces to Jensen: (T_t g)^a <= T_t g^a with no exponential factor
  const Vec x{0.25, 0.1};
  const HarnackResult j = harnack_probe(space, field, 2.0, 0.5, x, x);
  CHECK(j.lhs <= j.rhs * (1.0 + 1e-12));

  const GaussianSpace aniso(Vec{1.0, 2.0});
  CHECK_THROWS_AS(harnack_probe(aniso, field, 1.5, 0.7, Vec{0.0, 0.0}, Vec{0.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("gamma_t entries and the 1/sqrt(t) operator bound") {
  const GaussianSpace space = GaussianSpace::standard(1);
  const Vec g1 = gamma_t_entries(space, 1.0);
  CHECK(g1[0] == doctest::Approx(0.7628739783668902).epsilon(1e-13));

  const GaussianSpace mix(Vec{0.5, 1.0, 3.0});
  for (double t : log_grid(1e-3, 1e2, 40)) {
    const Vec g = gamma_t_entries(mix, t);
    for (double v : g) CHECK(v <= 1.0 / std::sqrt(t) * (1.0 + 1e-12));
  }
}

TEST_CASE("monte carlo fallback stays within its error estimate") {
  const GaussianSpace space = GaussianSpace::standard(5);
  const SemigroupKind kind{SemigroupVariant::WienerT, space};
  const HermiteFunction f = HermiteFunction::random(space, 2, 17);
  SemigroupOptions opts;
  opts.node_budget = 20;  // below the 2^5 tensor floor, forcing the fallback
  const Vec x(5, 0.3);
  const SemigroupEvalReport rep =
      apply_pointwise(kind, [&](const double* y) { return f.eval(y); }, 0.6, x.data(), opts);
  CHECK(rep.method == EvalMethod::monte_carlo);
  const double exact = apply_spectral(kind, f, 0.6).eval(x);
  CHECK(std::abs(rep.value - exact) < 5.0 * rep.error_estimate + 1e-3);

  opts.allow_monte_carlo = false;
  CHECK_THROWS_AS(
      apply_pointwise(kind, [&](const double* y) { return f.eval(y); }, 0.6, x.data(), opts),
      resource_error);
}
