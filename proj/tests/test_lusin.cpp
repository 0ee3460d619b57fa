#include <cmath>

#include "doctest.h"
#include "oulab/lusin.hpp"
#include "oulab/sampling.hpp"

using namespace oulab;

TEST_CASE("time grid refinement is a superset") {
  const TimeGrid g = TimeGrid::standard();
  const TimeGrid r = g.refined();
  REQUIRE(r.points.size() == 2 * g.points.size() - 1);
  for (std::size_t k = 0; k < g.points.size(); ++k) CHECK(r.points[2 * k] == g.points[k]);
}

TEST_CASE("weight of a linear function has a closed form (da prato variant)") {
  // f = a h_1 on the standard line: |grad f| = a everywhere, so the gradient
  // term is a at every t. sqrt(I-L) f = sqrt(1 + 1/2) f decays monotonically,
  // so its sup sits at t -> 0: the frac term is sqrt(3/2) a |x|.
  const GaussianSpace space = GaussianSpace::standard(1);
  const double a = 0.7;
  HermiteFunction f(space, 1);
  f.set_coeff(MultiIndex{1}, a);
  const SampleCloud cloud = sample(space, 64, 111);
  const LusinWeight w = build_weight(LusinConfig{}, f, cloud);
  for (std::size_t i = 0; i < cloud.n; ++i) {
    const double x = cloud.point(i)[0];
    CHECK(w.grad_term()[i] == doctest::Approx(a).epsilon(1e-10));
    CHECK(w.frac_term()[i] ==
          doctest::Approx(1.224744871391589 * a * std::abs(x)).epsilon(1e-9));
    CHECK(w.values()[i] == doctest::Approx(w.grad_term()[i] + w.frac_term()[i]).epsilon(1e-12));
  }
}

TEST_CASE("wiener variant weights use the unit-speed side") {
  // On the standard line T_t and the CM gradient coincide with the ambient
  // ones; the multiplier for |alpha| = 1 is 1, so the frac sup is sqrt(2) a |x|.
  const GaussianSpace space = GaussianSpace::standard(1);
  HermiteFunction f(space, 1);
  f.set_coeff(MultiIndex{1}, 0.5);
  const SampleCloud cloud = sample(space, 32, 21);
  LusinConfig cfg;
  cfg.variant = LusinVariant::Wiener2;
  const LusinWeight w = build_weight(cfg, f, cloud);
  for (std::size_t i = 0; i < cloud.n; ++i) {
    const double x = cloud.point(i)[0];
    CHECK(w.grad_term()[i] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(w.frac_term()[i] ==
          doctest::Approx(std::sqrt(2.0) * 0.5 * std::abs(x)).epsilon(1e-9));
  }
}

TEST_CASE("rcd variant applies the alpha power average") {
  const GaussianSpace space = GaussianSpace::standard(2);
  const HermiteFunction f = HermiteFunction::random(space, 3, 77, 0.6);
  const SampleCloud cloud = sample(space, 40, 31);
  LusinConfig cfg;
  cfg.variant = LusinVariant::Rcd3;
  cfg.alpha = 1.5;
  const LusinWeight w = build_weight(cfg, f, cloud);
  for (double v : w.values()) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }

  cfg.alpha = 2.5;
  CHECK_THROWS_AS(build_weight(cfg, f, cloud), std::invalid_argument);
  cfg.alpha = 1.5;
  const GaussianSpace skew(Vec{1.0, 2.0});
  CHECK_THROWS_AS(
      build_weight(cfg, HermiteFunction::random(skew, 2, 5), sample(skew, 8, 3)),
      std::invalid_argument);
}

TEST_CASE("eval_at matches the cached build on cloud points") {
  const GaussianSpace space(Vec{1.3});
  const HermiteFunction f = HermiteFunction::random(space, 3, 99, 0.6);
  const SampleCloud cloud = sample(space, 24, 41);
  const LusinWeight w = build_weight(LusinConfig{}, f, cloud);
  for (std::size_t i = 0; i < cloud.n; i += 5)
    CHECK(w.eval_at(cloud.point(i)) == doctest::Approx(w.values()[i]).epsilon(1e-12));
}

TEST_CASE("pair sampling is deterministic and respects the near fraction") {
  const GaussianSpace space = GaussianSpace::standard(2);
  const SampleCloud cloud = sample(space, 100, 51);
  const auto pairs = sample_pairs(cloud, 1000, 7, 0.5);
  CHECK(pairs.size() == 1000);
  std::size_t offsets = 0;
  for (const auto& p : pairs) {
    CHECK(p.i < cloud.n);
    if (p.has_offset) {
      ++offsets;
      REQUIRE(p.y.size() == 2);
    } else {
      CHECK(p.j < cloud.n);
      CHECK(p.i != p.j);
    }
  }
  CHECK(offsets == 500);

  const auto again = sample_pairs(cloud, 1000, 7, 0.5);
  CHECK(again.size() == pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    CHECK(again[k].i == pairs[k].i);
    CHECK(again[k].j == pairs[k].j);
    CHECK(again[k].has_offset == pairs[k].has_offset);
  }

  CHECK_THROWS_AS(sample_pairs(cloud, 10, 1, 0.1, true, nullptr), std::invalid_argument);
}

TEST_CASE("probe max over index pairs never exceeds the brute-force max") {
  const GaussianSpace space = GaussianSpace::standard(2);
  const HermiteFunction f = HermiteFunction::random(space, 3, 13, 0.6);
  const SampleCloud cloud = sample(space, 300, 61);
  const LusinWeight w = build_weight(LusinConfig{}, f, cloud);
  const double brute = brute_force_best_constant(w);
  CHECK(brute > 0.0);

  const auto pairs = sample_pairs(cloud, 20000, 71, 0.0);
  const ProbeReport rep = lipschitz_probe(w, pairs);
  CHECK(rep.max_ratio <= brute * (1.0 + 1e-12));
  CHECK(rep.max_ratio > 0.5 * brute);  // dense sampling on a small cloud
  CHECK(rep.constant_estimate == rep.max_ratio);
  CHECK(rep.bootstrap_lo <= rep.bootstrap_hi + 1e-15);
  CHECK(rep.bootstrap_hi <= rep.max_ratio * (1.0 + 1e-12));

  std::size_t total = 0;
  for (std::size_t c : rep.histogram) total += c;
  CHECK(total == rep.pair_count - rep.skipped);
  REQUIRE(rep.bin_edges.size() == rep.histogram.size() + 1);
}

TEST_CASE("near pairs evaluate the weight off the cloud without blowing up") {
  const GaussianSpace space(Vec{1.0, 0.6});
  const HermiteFunction f = HermiteFunction::random(space, 2, 17, 0.6);
  const SampleCloud cloud = sample(space, 50, 81);
  LusinConfig cfg;
  cfg.variant = LusinVariant::Wiener2;
  const LusinWeight w = build_weight(cfg, f, cloud);
  const auto pairs = sample_pairs(cloud, 200, 91, 1.0, true, &space);
  const ProbeReport rep = lipschitz_probe(w, pairs);
  CHECK(rep.pair_count == 200);
  CHECK(std::isfinite(rep.max_ratio));
  CHECK(rep.max_ratio > 0.0);
}

TEST_CASE("brute force guards its resource caps") {
  const GaussianSpace d3 = GaussianSpace::standard(3);
  const HermiteFunction f3 = HermiteFunction::random(d3, 2, 7);
  const SampleCloud c3 = sample(d3, 10, 5);
  const LusinWeight w3 = build_weight(LusinConfig{}, f3, c3);
  CHECK_THROWS_AS(brute_force_best_constant(w3), resource_error);
}

TEST_CASE("probe seeds move the max by little on a well-covered cloud") {
  const GaussianSpace space(Vec{1.3});
  const HermiteFunction f = HermiteFunction::random(space, 3, 23, 0.6);
  const SampleCloud cloud = sample(space, 400, 101);
  const LusinWeight w = build_weight(LusinConfig{}, f, cloud);
  Vec maxes;
  for (std::uint64_t s = 1; s <= 3; ++s)
    maxes.push_back(lipschitz_probe(w, sample_pairs(cloud, 30000, s, 0.0)).max_ratio);
  const double lo = *std::min_element(maxes.begin(), maxes.end());
  const double hi = *std::max_element(maxes.begin(), maxes.end());
  CHECK(hi <= lo * 1.2);
}
