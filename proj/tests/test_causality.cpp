#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "properties.hpp"
#include "storycheck/causality.hpp"
#include "storycheck/dsl.hpp"
#include "storycheck/io.hpp"

using namespace storycheck;
using namespace storycheck::testing;

namespace {

std::set<std::pair<std::size_t, std::size_t>> pairs_of(const std::vector<TraceRelation>& rs) {
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (const auto& r : rs) out.emplace(r.from_index, r.to_index);
    return out;
}

}  // namespace

// Four transitions: r1 binds A-C, r2 needs that bond, r3 breaks it, r4 needs
// what r2 and r3 made. r2 enables r4 although r3 happens in between.
TEST(Causality, FourStepTraceRelations) {
    auto model = load_model(fixture("fig6.model.json"));
    Trace tr = load_trace(fixture("fig6.trace.json"), *model);
    ASSERT_EQ(tr.size(), 4u);
    std::set<std::pair<std::size_t, std::size_t>> en{{0, 1}, {0, 2}, {1, 3}, {2, 3}};
    EXPECT_EQ(pairs_of(enablements(tr, *model)), en);
    std::set<std::pair<std::size_t, std::size_t>> pr{{2, 1}};
    EXPECT_EQ(pairs_of(preventions(tr, *model)), pr);
}

TEST(Causality, TransportFollowsSurvivors) {
    auto model = load_model(fixture("fig6.model.json"));
    Trace tr = load_trace(fixture("fig6.trace.json"), *model);
    // The comatching of r1 names the A-C bond, which r3 removes.
    auto h = tr[0].comatching;
    EXPECT_TRUE(transport(tr, 1, 2, h).has_value());
    EXPECT_FALSE(transport(tr, 1, 3, h).has_value());
    auto id = transport(tr, 0, 0, tr[0].matching);
    ASSERT_TRUE(id.has_value());
    EXPECT_EQ(id->map(), tr[0].matching.map());
}

TEST(Causality, IndependenceInputChecks) {
    auto model = load_model(fixture("fig6.model.json"));
    Trace tr = load_trace(fixture("fig6.trace.json"), *model);
    EXPECT_THROW(sequential_independence(tr[0], tr[2]), NotComposable);
    EXPECT_THROW(parallel_independence(tr[0], tr[1]), SourcesDiffer);
    EXPECT_FALSE(sequential_independence(tr[0], tr[1]));
}

TEST(Causality, AdjacentPairsMatchOracles) {
    auto rep = check_adjacent_correspondence(150, 41);
    EXPECT_EQ(rep.cases, 150u);
    EXPECT_GT(rep.positives, 10u);
    EXPECT_GT(rep.negatives, 10u);
    for (std::size_t k = 0; k < std::min<std::size_t>(rep.failures.size(), 10); ++k) ADD_FAILURE() << rep.failures[k];
}
