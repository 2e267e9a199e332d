#include <benchmark/benchmark.h>

#include "ricci_lab/discrete_calculus.hpp"
#include "ricci_lab/field_family.hpp"
#include "ricci_lab/heat_semigroup.hpp"
#include "ricci_lab/inequality_lab.hpp"
#include "ricci_lab/manifold_models.hpp"
#include "ricci_lab/noncollapse.hpp"
#include "ricci_lab/ricci_flow.hpp"

namespace {

using namespace rlab;

void BM_Decompose(benchmark::State& state) {
  const Discretization g = discretize(make_round_sphere(2, 1.0), static_cast<int>(state.range(0)));
  const DiscreteOperator op = schrodinger_operator(g, potential_hs(g));
  for (auto _ : state) benchmark::DoNotOptimize(decompose(op));
}
BENCHMARK(BM_Decompose)->Arg(64)->Arg(128)->Arg(256);

void BM_KernelOneToInf(benchmark::State& state) {
  const Discretization g = discretize(make_round_sphere(2, 1.0), static_cast<int>(state.range(0)));
  const HeatSemigroup h = HeatSemigroup::for_state(g);
  for (auto _ : state) benchmark::DoNotOptimize(h.norm(NormPair::kOneToInf, 0.01));
}
BENCHMARK(BM_KernelOneToInf)->Arg(64)->Arg(128)->Arg(256);

void BM_ConformalStep(benchmark::State& state) {
  const MetricState s = make_conformal_s2("bumped", static_cast<int>(state.range(0)), 1.0, {0.3, 0.6});
  const double dt = max_stable_step(s);
  for (auto _ : state) benchmark::DoNotOptimize(step_flow(s, dt));
}
BENCHMARK(BM_ConformalStep)->Arg(128)->Arg(512);

void BM_FieldFamily(benchmark::State& state) {
  const Discretization g = discretize(make_round_sphere(2, 1.0), 128);
  for (auto _ : state)
    benchmark::DoNotOptimize(make_field_family(g, {static_cast<int>(state.range(0)), 1}));
}
BENCHMARK(BM_FieldFamily)->Arg(200);

void BM_SobolevEstimate(benchmark::State& state) {
  const Discretization g = discretize(make_round_sphere(2, 1.0), 128);
  const FieldFamily family = make_field_family(g, {200, 1});
  const SobolevExponents e(2, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_sobolev_constant(e, g, family));
}
BENCHMARK(BM_SobolevEstimate);

void BM_GeodesicBall(benchmark::State& state) {
  const Discretization g = discretize(make_conformal_s2("bumped", 128, 1.0, {0.3, 0.6}));
  for (auto _ : state) benchmark::DoNotOptimize(geodesic_ball(g, 0.7));
}
BENCHMARK(BM_GeodesicBall);

}  // namespace

BENCHMARK_MAIN();
