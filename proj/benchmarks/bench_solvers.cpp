#include <benchmark/benchmark.h>

#include "fpme/asymptotics.hpp"
#include "fpme/frlap.hpp"
#include "fpme/laneemden.hpp"
#include "fpme/stepper.hpp"

using namespace fpme;

static void BM_Assemble(benchmark::State& state) {
    const Grid g = make_grid(-1.0, 1.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        StiffnessForm form = assemble_form(g, 0.5);
        benchmark::DoNotOptimize(form.matrix().data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Assemble)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_Apply(benchmark::State& state) {
    const Grid g = make_grid(-1.0, 1.0, static_cast<int>(state.range(0)));
    const StiffnessForm form = assemble_form(g, 0.5);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(g.n(), -1.0, 1.0);
    for (auto _ : state) {
        Eigen::VectorXd y = form.apply(x);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Apply)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

static void BM_SpectralBound(benchmark::State& state) {
    const StiffnessForm form = assemble_form(make_grid(-1.0, 1.0, static_cast<int>(state.range(0))), 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(spectral_bound(form));
}
BENCHMARK(BM_SpectralBound)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_GroundState(benchmark::State& state) {
    const StiffnessForm form = assemble_form(make_grid(-1.0, 1.0, static_cast<int>(state.range(0))), 0.5);
    const EnergyParams p(0.5, 2.0, 1.0);
    for (auto _ : state) {
        GroundState gs = ground_state(form, p);
        benchmark::DoNotOptimize(gs.lambda1);
    }
}
BENCHMARK(BM_GroundState)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_Step(benchmark::State& state) {
    const Grid g = make_grid(-1.0, 1.0, static_cast<int>(state.range(0)));
    const StiffnessForm form = assemble_form(g, 0.5);
    const EnergyParams p(0.5, 2.0, 1.0);
    const GroundState gs = ground_state(form, p);
    const GridFunction v0 = bump_mix(gs.w, 0.008, -0.8, 0.4, 2.0);
    StepOptions opt;
    opt.lipschitz = spectral_bound(form);
    for (auto _ : state) {
        StepResult r = step(form, p, 0.02, v0, opt);
        benchmark::DoNotOptimize(r.energy_new);
        state.counters["inner"] = r.inner_iterations;
    }
}
BENCHMARK(BM_Step)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
