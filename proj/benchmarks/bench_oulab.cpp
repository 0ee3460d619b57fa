#include <benchmark/benchmark.h>

#include "oulab/flow.hpp"
#include "oulab/fractional.hpp"
#include "oulab/lusin.hpp"
#include "oulab/sampling.hpp"
#include "oulab/semigroup.hpp"

using namespace oulab;

static void BM_HermiteEval(benchmark::State& state) {
  const GaussianSpace space = GaussianSpace::standard(2);
  const HermiteFunction f = HermiteFunction::random(space, unsigned(state.range(0)), 7);
  const double x[2] = {0.3, -1.1};
  for (auto _ : state) benchmark::DoNotOptimize(f.eval(x));
}
BENCHMARK(BM_HermiteEval)->Arg(2)->Arg(6)->Arg(10);

static void BM_KernelMass(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kernel_abs_integral(1.0).value);
}
BENCHMARK(BM_KernelMass);

static void BM_ApplySpectral(benchmark::State& state) {
  const GaussianSpace space = GaussianSpace::standard(3);
  const HermiteFunction f = HermiteFunction::random(space, unsigned(state.range(0)), 11);
  const SemigroupKind kind{SemigroupVariant::WienerT, space};
  for (auto _ : state) benchmark::DoNotOptimize(apply_spectral(kind, f, 0.5).coeff(MultiIndex{0, 0, 0}));
}
BENCHMARK(BM_ApplySpectral)->Arg(4)->Arg(8);

static void BM_ApplyPointwise(benchmark::State& state) {
  const GaussianSpace space = GaussianSpace::standard(2);
  const HermiteFunction f = HermiteFunction::random(space, 5, 13);
  const SemigroupKind kind{SemigroupVariant::DaPratoP, space};
  const double x[2] = {0.4, 0.9};
  SemigroupOptions opts;
  opts.m_per_dim = unsigned(state.range(0));
  const RealField field = [&f](const double* y) { return f.eval(y); };
  for (auto _ : state) benchmark::DoNotOptimize(apply_pointwise(kind, field, 0.5, x, opts).value);
}
BENCHMARK(BM_ApplyPointwise)->Arg(8)->Arg(24)->Arg(48);

static void BM_GradNormSemigroup(benchmark::State& state) {
  const GaussianSpace space = GaussianSpace::standard(2);
  const HermiteFunction f = HermiteFunction::random(space, 4, 17);
  const auto partials = f.gradient();
  const SemigroupKind kind{SemigroupVariant::WienerT, space};
  const double x[2] = {0.2, -0.5};
  for (auto _ : state)
    benchmark::DoNotOptimize(apply_to_grad_norm(kind, partials, true, 0.7, x));
}
BENCHMARK(BM_GradNormSemigroup);

static void BM_IntegrateFlow(benchmark::State& state) {
  const GaussianSpace space = GaussianSpace::standard(2);
  const FlowFieldSpec spec = FlowFieldSpec::rotation_field(space, 1.0, 1.0);
  const SampleCloud cloud = sample(space, std::size_t(state.range(0)), 23);
  for (auto _ : state) {
    const FlowEnsemble ens = integrate_flow(spec, cloud, 1.0 / 128.0, OdeScheme::RK4, 16);
    benchmark::DoNotOptimize(ens.traj.back()[0]);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 128);
}
BENCHMARK(BM_IntegrateFlow)->Arg(256)->Arg(1024);

static void BM_BuildWeight(benchmark::State& state) {
  const GaussianSpace space = GaussianSpace::standard(1);
  const HermiteFunction f = HermiteFunction::random(space, 3, 29, 0.6);
  const SampleCloud cloud = sample(space, std::size_t(state.range(0)), 31);
  LusinConfig cfg;
  cfg.variant = LusinVariant::DaPrato1;
  for (auto _ : state) benchmark::DoNotOptimize(build_weight(cfg, f, cloud).values()[0]);
}
BENCHMARK(BM_BuildWeight)->Arg(32)->Arg(128);

static void BM_LipschitzProbe(benchmark::State& state) {
  const GaussianSpace space = GaussianSpace::standard(2);
  const HermiteFunction f = HermiteFunction::random(space, 3, 37, 0.6);
  const SampleCloud cloud = sample(space, 400, 41);
  LusinConfig cfg;
  cfg.variant = LusinVariant::Wiener2;
  const LusinWeight weight = build_weight(cfg, f, cloud);
  const auto pairs = sample_pairs(cloud, std::size_t(state.range(0)), 43, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(lipschitz_probe(weight, pairs).max_ratio);
}
BENCHMARK(BM_LipschitzProbe)->Arg(10000)->Arg(50000);

BENCHMARK_MAIN();
