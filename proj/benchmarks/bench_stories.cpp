#include <benchmark/benchmark.h>

#include <string>

#include "storycheck/concretize.hpp"
#include "storycheck/io.hpp"
#include "storycheck/scenario.hpp"

using namespace storycheck;

namespace {

std::string fixture(const char* name) { return std::string(STORYCHECK_FIXTURES) + "/" + name; }

void BM_InfluenceTable(benchmark::State& state) {
    for (auto _ : state) {
        auto model = load_model(fixture("resources.model.json"));
        std::size_t n = 0;
        for (const auto& a : model->rules())
            for (const auto& b : model->rules()) n += model->positive(a, b).size() + model->negative(a, b).size();
        benchmark::DoNotOptimize(n);
    }
}
BENCHMARK(BM_InfluenceTable)->Unit(benchmark::kMillisecond);

void BM_AbstractFig6(benchmark::State& state) {
    auto model = load_model(fixture("fig6.model.json"));
    Trace t = load_trace(fixture("fig6.trace.json"), *model);
    for (auto _ : state) benchmark::DoNotOptimize(abstract_trace(t, *model));
}
BENCHMARK(BM_AbstractFig6)->Unit(benchmark::kMicrosecond);

void BM_ConcretizeResources(benchmark::State& state) {
    auto model = load_model(fixture("resources.model.json"));
    Poset p = load_poset(fixture("resources_ax.poset.json"));
    std::size_t n = 0;
    for (auto _ : state) {
        auto r = search_concretizations(p, *model);
        n = r.solutions.size();
        benchmark::DoNotOptimize(r);
    }
    state.counters["solutions"] = static_cast<double>(n);
}
BENCHMARK(BM_ConcretizeResources)->Unit(benchmark::kMillisecond);

void BM_ScenarioAll(benchmark::State& state) {
    auto model = load_model(fixture("resources.model.json"));
    Poset s1 = load_poset(fixture("resources_ax.poset.json")), s2 = load_poset(fixture("resources_ay.poset.json"));
    ScenarioOptions o;
    o.all = true;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            find_scenario(s1, s1.index_of("eAX"), s2, s2.index_of("eAY"), Polarity::Negative, *model, o));
}
BENCHMARK(BM_ScenarioAll)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
