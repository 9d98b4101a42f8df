// Serial reference loops against the OpenMP kernels on the three hot paths.

#include <benchmark/benchmark.h>

#include "gbclab/divergence.hpp"
#include "gbclab/horizon.hpp"
#include "gbclab/integration.hpp"
#include "gbclab/sampling.hpp"

using namespace gbclab;

namespace {

const char* kProfile =
    "0.8*(1+x1^2+x2^2+x3^2+x4^2+x5^2)^(-0.25); 0.6*(1+x1^2+x2^2+x3^2+x4^2+x5^2)^(-0.25)";
const char* kGeneric =
    "0.3*x1*x2 + 0.2*sin(x3) + 0.1*x4^2 - 0.15*x5*x1; 0.25*x2^2 - 0.2*x3*x4 + 0.1*cos(x5) + 0.05*x1*x3";

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_SurfaceFlux(benchmark::State& state) {
  const MapSpec map = parse_map(kProfile, 5, 2);
  const QuadratureRule rule = sphere_rule(5, 5);
  for (auto _ : state) benchmark::DoNotOptimize(surface_flux(map, {MassKind::P2}, 16.0, rule, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(rule.size()));
}

void BM_IdentitySweep(benchmark::State& state) {
  const MapSpec map = parse_map(kGeneric, 5, 2);
  const auto points = annulus_points(50, 5, 1.0, 4.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(sweep(map, {IdentityKind::P2}, points, {}, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(points.size()));
}

void BM_HorizonReport(benchmark::State& state) {
  const auto spec = parse_hypersurface("1/sqrt(u1^2/1.1^2 + u2^2 + u3^2/0.95^2 + u4^2 + u5^2)", 5);
  const QuadratureRule rule = sphere_rule(5, 8);
  for (auto _ : state) benchmark::DoNotOptimize(horizon_report(spec, rule, 0.5, exec_of(state)).area);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(rule.size()));
}

}  // namespace

BENCHMARK(BM_SurfaceFlux)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IdentitySweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HorizonReport)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
