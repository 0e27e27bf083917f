// Serial reference vs OpenMP population evaluation on use case 1.

#include <benchmark/benchmark.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "uavmp/population.hpp"

using namespace uavmp;

namespace {

const PlanningContext& context() {
    static const std::unique_ptr<PlanningContext> ctx = [] {
        const std::string dir = std::string(UAVMP_SOURCE_DIR) + "/fixtures";
        std::ifstream f(dir + "/usecase1.json");
        std::stringstream ss;
        ss << f.rdbuf();
        Mission m = parse_mission(ss.str());
        auto grid = load_mission_grid(m, dir);
        return std::make_unique<PlanningContext>(std::move(m), std::move(grid));
    }();
    return *ctx;
}

std::vector<PlanGenome> population(std::size_t n) {
    Rng rng(7);
    std::vector<PlanGenome> pop;
    for (std::size_t i = 0; i < n; ++i) {
        pop.push_back(random_genome(context(), rng));
        repair(context(), pop.back(), rng);
    }
    return pop;
}

void BM_serial(benchmark::State& state) {
    const auto pop = population(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_population_serial(context(), pop));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_parallel(benchmark::State& state) {
    const auto pop = population(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_population(context(), pop));
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.counters["threads"] = evaluation_threads();
}

} // namespace

BENCHMARK(BM_serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
