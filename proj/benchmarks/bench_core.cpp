#include <benchmark/benchmark.h>

#include "neurobif/codim2.hpp"
#include "neurobif/cycles.hpp"
#include "neurobif/equilibria.hpp"
#include "neurobif/linalg.hpp"
#include "neurobif/scenarios.hpp"

using namespace neurobif;

namespace {

void BM_FieldAndJacobian(benchmark::State& state)
{
    const ModelParams p = state.range(0) ? preset("wc-default") : preset("jr-default");
    const Vec x = equilibrium_from_X(p, 3.0).state.values;
    for (auto _ : state) {
        benchmark::DoNotOptimize(field(p, x));
        benchmark::DoNotOptimize(jacobian(p, x));
    }
}
BENCHMARK(BM_FieldAndJacobian)->Arg(0)->Arg(1);

void BM_Eigen(benchmark::State& state)
{
    const ModelParams p = preset("wc-default");
    const Mat J = jacobian_at_X(p, 3.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(eigen(J));
}
BENCHMARK(BM_Eigen);

void BM_Codim1Report(benchmark::State& state)
{
    const ModelParams p = preset("jr-default");
    for (auto _ : state)
        benchmark::DoNotOptimize(codim1_report(p, default_sweep(ModelKind::jansen_rit)));
}
BENCHMARK(BM_Codim1Report)->Unit(benchmark::kMillisecond);

void BM_PlaneScan(benchmark::State& state)
{
    const ModelParams p = preset("jr-default");
    for (auto _ : state)
        benchmark::DoNotOptimize(analyze_plane(p, "j", 4.0, 16.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PlaneScan)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_FindAlphaCycle(benchmark::State& state)
{
    const ModelParams p = with_primary(preset("jr-default"), 3.0);
    const Vec x0 = equilibrium_from_X(p, 4.3).state.values;
    for (auto _ : state)
        benchmark::DoNotOptimize(find_cycle(p, x0, {}));
}
BENCHMARK(BM_FindAlphaCycle)->Unit(benchmark::kMillisecond);

// Cost of 1000 time units of the noisy Jansen-Rit model (1e6 Heun steps).
void BM_SdeJansenRit(benchmark::State& state)
{
    const ModelParams p = preset("jr-default");
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_sde(p, NoiseSpec{1.8, 0.0, 0.5, 1}, 1000.0));
}
BENCHMARK(BM_SdeJansenRit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
