#include <benchmark/benchmark.h>

#include "fogplace/graph.hpp"
#include "fogplace/placement.hpp"
#include "fogplace/scenario.hpp"
#include "fogplace/sim.hpp"

using namespace fogplace;

static void BM_EdgeBetweenness_BA100(benchmark::State& state) {
    const auto g = generate_barabasi_albert(100, 2, 1);
    for (auto _ : state) {
        auto scores = edge_betweenness(g);
        benchmark::DoNotOptimize(scores);
    }
}
BENCHMARK(BM_EdgeBetweenness_BA100)->Unit(benchmark::kMillisecond);

static void BM_GirvanNewman_BA100(benchmark::State& state) {
    const auto g = generate_barabasi_albert(100, 2, 1);
    for (auto _ : state) {
        auto dendrogram = girvan_newman(g);
        benchmark::DoNotOptimize(dendrogram);
    }
}
BENCHMARK(BM_GirvanNewman_BA100)->Unit(benchmark::kMillisecond);

static void BM_GenerateScenario_Default(benchmark::State& state) {
    const ExperimentParams params{};
    std::uint64_t seed = 1;
    for (auto _ : state) {
        auto scenario = generate_scenario(params, seed++);
        benchmark::DoNotOptimize(scenario);
    }
}
BENCHMARK(BM_GenerateScenario_Default)->Unit(benchmark::kMillisecond);

static void BM_PartitionPlace_Default(benchmark::State& state) {
    const auto scenario = generate_scenario(ExperimentParams{}, 1);
    const auto dendrogram = girvan_newman(fog_graph(scenario.infra));
    for (auto _ : state) {
        auto p = partition_place(scenario.infra, dendrogram, scenario.apps, scenario.workloads);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_PartitionPlace_Default)->Unit(benchmark::kMillisecond);

static void BM_GreedyPlace_Default(benchmark::State& state) {
    const auto scenario = generate_scenario(ExperimentParams{}, 1);
    for (auto _ : state) {
        auto p = greedy_baseline_place(scenario.infra, scenario.apps, scenario.workloads);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_GreedyPlace_Default)->Unit(benchmark::kMillisecond);

static void BM_Simulate_FullFailures(benchmark::State& state) {
    const auto scenario = generate_scenario(ExperimentParams{}, 1);
    const auto dendrogram = girvan_newman(fog_graph(scenario.infra));
    const auto p =
        partition_place(scenario.infra, dendrogram, scenario.apps, scenario.workloads);
    const double duration = static_cast<double>(state.range(0));
    const auto schedule = build_failure_schedule(scenario.infra, duration, 1);
    for (auto _ : state) {
        auto metrics = run_simulation(scenario, p, schedule, duration);
        benchmark::DoNotOptimize(metrics);
    }
}
BENCHMARK(BM_Simulate_FullFailures)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
