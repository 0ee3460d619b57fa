#include <cmath>

#include "doctest.h"
#include "oulab/fractional.hpp"
#include "oulab/sampling.hpp"

using namespace oulab;

TEST_CASE("kernel point values on both branches") {
  // s < t: K = -pi^{-1/2} s^{-1/2}
  CHECK(kernel_K(0.5, 1.0) == doctest::Approx(-0.7978845608028653).epsilon(1e-14));
  // s > t: both branches live
  CHECK(kernel_K(2.0, 1.0) == doctest::Approx(0.16524730314632363).epsilon(1e-13));
  CHECK_THROWS_AS(kernel_K(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("kernel total variation mass is (4/sqrt(pi)) sqrt(t)") {
  const KernelIntegralResult r1 = kernel_abs_integral(1.0);
  CHECK(r1.value == doctest::Approx(2.256758334191025).epsilon(1e-10));
  CHECK(r1.error_estimate < 1e-8);
  const KernelIntegralResult r4 = kernel_abs_integral(4.0);
  CHECK(r4.value == doctest::Approx(2.0 * 2.256758334191025).epsilon(1e-10));
}

TEST_CASE("scalar subordination identities") {
  const ScalarIdentityResult r = scalar_identity_check(1.0, 1.0);
  CHECK(r.lhs == doctest::Approx(-0.6321205588285577).epsilon(1e-14));
  CHECK(r.gap < 1e-10);
  CHECK(r.decay_gap < 1e-10);

  // b = 0 collapses both sides
  const ScalarIdentityResult z = scalar_identity_check(0.0, 2.0);
  CHECK(z.gap < 1e-12);

  // grid corner with large b t
  const ScalarIdentityResult g = scalar_identity_check(10.0, 10.0);
  CHECK(g.gap < 1e-9);
}

TEST_CASE("apply_frac multiplies coefficients by sqrt(shift + mu)") {
  const GaussianSpace space = GaussianSpace::standard(1);
  const SemigroupKind kind{SemigroupVariant::WienerT, space};
  HermiteFunction f(space, 2);
  f.set_coeff(MultiIndex{2}, 1.0);
  f.set_coeff(MultiIndex{0}, 5.0);

  const HermiteFunction sq = apply_frac({kind, 0}, f);
  CHECK(sq.coeff(MultiIndex{2}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(sq.coeff(MultiIndex{0}) == doctest::Approx(0.0));  // sqrt(-L) kills constants

  const HermiteFunction sh = apply_frac({kind, 1}, f);
  CHECK(sh.coeff(MultiIndex{2}) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(sh.coeff(MultiIndex{0}) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("representation formula at a point") {
  const GaussianSpace space(Vec{1.0, 0.5});
  const HermiteFunction f = HermiteFunction::random(space, 4, 201);
  const Vec x{0.4, -0.9};
  for (const SemigroupVariant v :
       {SemigroupVariant::DaPratoP, SemigroupVariant::KilledT}) {
    const RepresentationResult r = representation_check({v, space}, f, 0.7, x);
    CHECK(r.gap < 1e-8);
    CHECK(std::abs(r.lhs - r.rhs) == doctest::Approx(r.gap));
  }
}

TEST_CASE("increment bound J_t holds on a sampled cloud") {
  const GaussianSpace space = GaussianSpace::standard(2);
  const HermiteFunction f = HermiteFunction::random(space, 3, 303);
  const SampleCloud cloud = sample(space, 50, 9);
  const Vec times = log_grid(1e-3, 30.0, 40);
  for (const SemigroupVariant v : {SemigroupVariant::KilledP, SemigroupVariant::KilledT}) {
    const JtReport rep = jt_bound_check({v, space}, f, cloud, times);
    CHECK(rep.max_ratio <= 1.0 + 1e-8);
    CHECK(rep.evaluated + rep.skipped == cloud.n * times.size());
  }
}

TEST_CASE("coarser sup grids only tighten the J_t check") {
  const GaussianSpace space = GaussianSpace::standard(1);
  const HermiteFunction f = HermiteFunction::random(space, 3, 404);
  const SampleCloud cloud = sample(space, 20, 10);
  const Vec times = log_grid(1e-2, 10.0, 10);
  const SemigroupKind kind{SemigroupVariant::KilledT, space};
  const JtReport coarse = jt_bound_check(kind, f, cloud, times, log_grid(1e-2, 10.0, 6));
  const JtReport fine = jt_bound_check(kind, f, cloud, times, log_grid(1e-4, 1e2, 96));
  CHECK(coarse.max_ratio >= fine.max_ratio - 1e-12);
  CHECK(coarse.max_ratio <= 1.0 + 1e-6);
}

TEST_CASE("p=2 riesz identity with the side-dependent factor") {
  const GaussianSpace space(Vec{1.0, 2.0});
  const HermiteFunction f = HermiteFunction::random(space, 4, 505);

  const RieszResult wiener = riesz_empirical({SemigroupVariant::WienerT, space}, f, 2.0);
  REQUIRE(wiener.p2_checked);
  CHECK(wiener.p2_factor == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(wiener.p2_spectral == doctest::Approx(wiener.p2_dirichlet).epsilon(1e-11));

  const RieszResult daprato = riesz_empirical({SemigroupVariant::DaPratoP, space}, f, 2.0);
  REQUIRE(daprato.p2_checked);
  CHECK(daprato.p2_factor == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(daprato.p2_spectral == doctest::Approx(0.5 * daprato.p2_dirichlet).epsilon(1e-11));

  // at p = 2 the empirical two-sided data collapses to the same identity
  CHECK(wiener.lhs_norm > 0.0);
  CHECK(wiener.rhs_norm > 0.0);
  CHECK(wiener.ratio == doctest::Approx(wiener.lhs_norm / wiener.rhs_norm).epsilon(1e-13));
}

TEST_CASE("riesz ratios stay two-sided at p=4") {
  const GaussianSpace space = GaussianSpace::standard(1);
  const HermiteFunction f = HermiteFunction::random(space, 4, 606);
  const RieszResult r = riesz_empirical({SemigroupVariant::WienerT, space}, f, 4.0);
  CHECK(r.ratio > 0.05);
  CHECK(r.ratio < 20.0);
  CHECK_FALSE(r.p2_checked);
}
