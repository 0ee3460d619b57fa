#include <cmath>

#include "doctest.h"
#include "oulab/gaussian_space.hpp"
#include "oulab/hermite_function.hpp"
#include "oulab/quadrature.hpp"
#include "oulab/sampling.hpp"

using namespace oulab;

TEST_CASE("gauss-hermite m=2 is the two-point rule at +-1") {
  const GaussHermite1D r = gauss_hermite(2);
  REQUIRE(r.nodes.size() == 2);
  CHECK(r.nodes[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(r.nodes[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.weights[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("gauss-hermite integrates moments exactly below degree 2m") {
  const GaussHermite1D r = gauss_hermite(6);
  double m2 = 0.0, m4 = 0.0, m10 = 0.0;
  for (std::size_t k = 0; k < r.nodes.size(); ++k) {
    const double u = r.nodes[k], w = r.weights[k];
    m2 += w * u * u;
    m4 += w * u * u * u * u;
    m10 += w * std::pow(u, 10);
  }
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(m10 == doctest::Approx(945.0).epsilon(1e-12));  // 9!! = 945, degree 10 < 12
}

TEST_CASE("tensor rule nodes carry the sqrt(lambda) scaling") {
  const GaussianSpace space(Vec{4.0});
  const TensorRule rule(space, 2);
  CHECK(rule.integrate([](const double* x) { return x[0] * x[0]; }) ==
        doctest::Approx(4.0).epsilon(1e-14));
  CHECK(rule.node(0)[0] == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("exact 1d machinery: roots, partial moments, |p| integral") {
  const Vec roots = poly_real_roots({-1.0, 0.0, 1.0});  // u^2 - 1
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(roots[1] == doctest::Approx(1.0).epsilon(1e-12));

  const Vec m = gauss_partial_moments(2, 0.0, std::numeric_limits<double>::infinity());
  CHECK(m[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m[1] == doctest::Approx(0.3989422804014327).epsilon(1e-14));  // 1/sqrt(2 pi)
  CHECK(m[2] == doctest::Approx(0.5).epsilon(1e-14));

  // int |u| dN(0,1) = sqrt(2/pi)
  CHECK(abs_poly_gauss_integral({0.0, 1.0}) ==
        doctest::Approx(0.7978845608028653).epsilon(1e-14));
}

TEST_CASE("hermite-to-monomial and affine composition round-trip") {
  // h_2(u) = (u^2 - 1)/sqrt(2)
  const Vec mono = hermite_to_monomial({0.0, 0.0, 1.0});
  REQUIRE(mono.size() == 3);
  CHECK(mono[0] == doctest::Approx(-0.7071067811865476).epsilon(1e-14));
  CHECK(mono[1] == doctest::Approx(0.0));
  CHECK(mono[2] == doctest::Approx(0.7071067811865476).epsilon(1e-14));

  const Vec q = affine_compose({0.0, 0.0, 1.0}, 1.0, 2.0);  // (1 + 2u)^2
  CHECK(q[0] == doctest::Approx(1.0));
  CHECK(q[1] == doctest::Approx(4.0));
  CHECK(q[2] == doctest::Approx(4.0));
}

TEST_CASE("gaussian space densities and cameron-martin geometry") {
  const GaussianSpace std1 = GaussianSpace::standard(1);
  CHECK(std1.log_density(Vec{0.0}) == doctest::Approx(-0.9189385332046727).epsilon(1e-14));

  const GaussianSpace space(Vec{4.0, 0.25});
  CHECK(space.cm_norm(Vec{2.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(space.cm_inner(Vec{2.0, 1.0}, Vec{1.0, 1.0}) == doctest::Approx(0.5 + 4.0).epsilon(1e-14));
  CHECK(space.is_isotropic() == false);
  CHECK(GaussianSpace::standard(3).is_isotropic() == true);

  // d N(v,Q)/d N(0,Q) at x = v equals exp(|v|_H^2 / 2)
  const Vec v{1.0, 0.5};
  const double h2 = space.cm_inner(v, v);
  CHECK(space.cameron_martin_density(v, v) == doctest::Approx(std::exp(h2 / 2.0)).epsilon(1e-13));
}

TEST_CASE("white noise pairing has ambient variance") {
  const GaussianSpace space(Vec{4.0, 0.25});
  const Vec h{0.3, 0.5};
  // W_h(x) = sum h_i x_i / sqrt(lambda_i)
  const Vec x{1.0, -2.0};
  CHECK(space.white_noise(h, x) ==
        doctest::Approx(0.3 * 1.0 / 2.0 + 0.5 * (-2.0) / 0.5).epsilon(1e-14));
  // E exp(W_h) = exp(|h|^2/2), |h| ambient
  const double expect = std::exp((0.3 * 0.3 + 0.5 * 0.5) / 2.0);
  CHECK(white_noise_exp_integral(space, h) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("sampling is deterministic with a shared prefix across sizes") {
  const GaussianSpace space(Vec{1.0, 2.0});
  const SampleCloud a = sample(space, 5, 42);
  const SampleCloud b = sample(space, 5, 42);
  CHECK(a.data == b.data);
  const SampleCloud c = sample(space, 3, 42);
  for (std::size_t i = 0; i < c.data.size(); ++i) CHECK(c.data[i] == a.data[i]);
  const SampleCloud d = sample(space, 5, 43);
  CHECK(d.data != a.data);
}

TEST_CASE("sample moments match the covariance") {
  const GaussianSpace space(Vec{1.0, 4.0});
  const SampleCloud cloud = sample(space, 200000, 7);
  double m1 = 0.0, v0 = 0.0, v1 = 0.0;
  for (std::size_t i = 0; i < cloud.n; ++i) {
    const double* x = cloud.point(i);
    m1 += x[0];
    v0 += x[0] * x[0];
    v1 += x[1] * x[1];
  }
  const double n = double(cloud.n);
  CHECK(std::abs(m1 / n) < 0.01);
  CHECK(v0 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(v1 / n == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("normalized hermite values: h3(1.5) = (x^3 - 3x)/sqrt(6)") {
  const GaussianSpace space = GaussianSpace::standard(1);
  HermiteFunction f(space, 3);
  f.set_coeff(MultiIndex{3}, 1.0);
  CHECK(f.eval(Vec{1.5}) == doctest::Approx(-0.4592793267718459).epsilon(1e-14));
}

TEST_CASE("basis scaling: H_alpha uses x / sqrt(lambda)") {
  const GaussianSpace space(Vec{4.0});
  HermiteFunction f(space, 1);
  f.set_coeff(MultiIndex{1}, 1.0);  // h_1(x/2) = x/2
  CHECK(f.eval(Vec{3.0}) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("l2 norm agrees with quadrature of f^2") {
  const GaussianSpace space(Vec{1.0, 0.7});
  const HermiteFunction f = HermiteFunction::random(space, 3, 99);
  CHECK(f.l2_norm() == doctest::Approx(1.0).epsilon(1e-12));  // random() normalizes
  const TensorRule rule(space, 8);
  const double q = rule.integrate([&](const double* x) {
    const double v = f.eval(x);
    return v * v;
  });
  CHECK(std::sqrt(q) == doctest::Approx(f.l2_norm()).epsilon(1e-12));
}

TEST_CASE("partial derivative lowers the index with sqrt(alpha/lambda)") {
  const GaussianSpace space(Vec{2.0});
  HermiteFunction f(space, 3);
  f.set_coeff(MultiIndex{3}, 1.0);
  const HermiteFunction d = f.partial(0);
  CHECK(d.coeff(MultiIndex{2}) == doctest::Approx(std::sqrt(3.0 / 2.0)).epsilon(1e-14));
  CHECK(d.coeff(MultiIndex{1}) == doctest::Approx(0.0));
  // chain: d/dx h_3(x/sqrt(2)) at x = 1 vs finite differences
  const double x = 1.0, eps = 1e-6;
  const double fd = (f.eval(Vec{x + eps}) - f.eval(Vec{x - eps})) / (2.0 * eps);
  CHECK(d.eval(Vec{x}) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("product is exact for polynomial expansions") {
  const GaussianSpace space = GaussianSpace::standard(1);
  HermiteFunction h1(space, 1);
  h1.set_coeff(MultiIndex{1}, 1.0);
  // x * x = sqrt(2) h_2 + h_0
  const auto prod = h1.product(h1, 2);
  CHECK(prod.discarded == doctest::Approx(0.0));
  CHECK(prod.value.coeff(MultiIndex{2}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK(prod.value.coeff(MultiIndex{0}) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(prod.value.coeff(MultiIndex{1}) == doctest::Approx(0.0));

  // truncation reports the dropped l2 mass
  const auto cut = h1.product(h1, 1);
  CHECK(cut.discarded == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));  // |sqrt(2) h_2|_2
}

TEST_CASE("projection recovers an expansion from black-box evaluations") {
  const GaussianSpace space(Vec{1.0, 1.4});
  const HermiteFunction f = HermiteFunction::random(space, 3, 123);
  const HermiteFunction g =
      HermiteFunction::project(space, 3, [&](const double* x) { return f.eval(x); }, 8);
  for (std::size_t k = 0; k < f.coeffs().size(); ++k)
    CHECK(g.coeffs()[k] == doctest::Approx(f.coeffs()[k]).epsilon(1e-11));
}

TEST_CASE("inner product is the coefficient dot product") {
  const GaussianSpace space = GaussianSpace::standard(2);
  const HermiteFunction f = HermiteFunction::random(space, 2, 5);
  const HermiteFunction g = HermiteFunction::random(space, 2, 6);
  CHECK(inner(f, g) == doctest::Approx(dot(f.coeffs(), g.coeffs())).epsilon(1e-13));
}

TEST_CASE("graded-lex basis: lower-order coefficients form a prefix") {
  const GaussianSpace space = GaussianSpace::standard(2);
  const HermiteFunction lo = HermiteFunction::random(space, 1, 9);
  HermiteFunction hi(space, 3);
  for (std::size_t k = 0; k < lo.coeffs().size(); ++k) hi.coeffs()[k] = lo.coeffs()[k];
  const Vec x{0.3, -1.1};
  CHECK(hi.eval(x) == doctest::Approx(lo.eval(x)).epsilon(1e-14));
}
