// Serial reference vs OpenMP trial loop on the same experiment.

#include <benchmark/benchmark.h>

#include "mcprobe/experiment.hpp"

using namespace mcprobe;

namespace {

ExperimentConfig config(int trials)
{
    ExperimentConfig cfg;
    cfg.route = {Scheme::bbt_t2, 8};
    cfg.loss.high_loss_count = 2;
    cfg.loss.light = {0.0, 0.02};
    cfg.trials = trials;
    return cfg;
}

const Topology& renater()
{
    static const Topology t = resolve_topology("renater");
    return t;
}

void BM_serial(benchmark::State& state)
{
    const auto cfg = config(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(renater(), cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_openmp(benchmark::State& state)
{
    const auto cfg = config(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(renater(), cfg, static_cast<int>(state.range(1))));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_serial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_openmp)->Args({1000, 1})->Args({1000, 2})->Args({1000, 4})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
