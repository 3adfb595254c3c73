#include <benchmark/benchmark.h>

#include <string>

#include "storycheck/canonical.hpp"
#include "storycheck/catops.hpp"
#include "storycheck/dsl.hpp"

using namespace storycheck;

namespace {

SignaturePtr chain_signature() {
    auto sig = std::make_shared<Signature>();
    sig->add("A", 2);
    return sig;
}

// A_0 - A_1 - ... - A_{n-1} through site 1 of each agent and site 0 of the next;
// `ring` closes the chain.
std::string chain(int n, bool ring) {
    std::string out;
    for (int k = 0; k < n; ++k) {
        if (k) out += ", ";
        std::string left = k == 0 ? (ring ? std::to_string(n) : std::string(".")) : std::to_string(k);
        std::string right = k == n - 1 ? (ring ? std::to_string(n) : std::string(".")) : std::to_string(k + 1);
        out += "A(0[" + left + "],1[" + right + "])";
    }
    return out;
}

void BM_PushoutChains(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    auto sig = chain_signature();
    GraphPtr g = share(parse_graph(chain(n, false), sig));
    GraphPtr o = share(parse_graph("A(0[.])", sig));
    Span span{Morphism(o, g, AgentMap({{0, 0}})), Morphism(o, g, AgentMap({{0, 0}}))};
    GraphPtr single = share(parse_graph("A()", sig));
    Span end_to_end{Morphism(single, g, AgentMap({{0, static_cast<AgentId>(n - 1)}})),
                    Morphism(single, g, AgentMap({{0, 0}}))};
    for (auto _ : state) {
        benchmark::DoNotOptimize(pushout(span));
        benchmark::DoNotOptimize(pushout(end_to_end));
    }
}
BENCHMARK(BM_PushoutChains)->RangeMultiplier(4)->Range(4, 256);

void BM_MultisumChains(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    auto sig = chain_signature();
    GraphPtr a = share(parse_graph(chain(n, false), sig));
    GraphPtr b = share(parse_graph(chain(n, false), sig));
    std::size_t members = 0;
    for (auto _ : state) {
        auto ms = multisum(a, b);
        members = ms.size();
        benchmark::DoNotOptimize(ms);
    }
    state.counters["members"] = static_cast<double>(members);
}
BENCHMARK(BM_MultisumChains)->DenseRange(1, 4);

void BM_CanonicalRing(benchmark::State& state) {
    auto sig = chain_signature();
    SiteGraph g = parse_graph(chain(static_cast<int>(state.range(0)), true), sig);
    for (auto _ : state) benchmark::DoNotOptimize(iso_canonical(g));
}
BENCHMARK(BM_CanonicalRing)->RangeMultiplier(4)->Range(4, 64);

void BM_MonosIntoChain(benchmark::State& state) {
    auto sig = chain_signature();
    GraphPtr pattern = share(parse_graph("A(1[1]), A(0[1])", sig));
    GraphPtr host = share(parse_graph(chain(static_cast<int>(state.range(0)), false), sig));
    std::size_t found = 0;
    for (auto _ : state) {
        auto ms = enumerate_monos(pattern, host);
        found = ms.size();
        benchmark::DoNotOptimize(ms);
    }
    state.counters["monos"] = static_cast<double>(found);
}
BENCHMARK(BM_MonosIntoChain)->RangeMultiplier(4)->Range(4, 1024);

}  // namespace

BENCHMARK_MAIN();
