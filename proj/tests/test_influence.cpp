#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "storycheck/dsl.hpp"
#include "storycheck/influence.hpp"
#include "storycheck/io.hpp"

using namespace storycheck;
using namespace storycheck::testing;

TEST(Influence, IntroModel) {
    auto model = load_model(fixture("fig2.model.json"));
    auto r = [&](const char* n) { return model->rule(n); };
    EXPECT_FALSE(positive_influences(r("rAC"), r("rAX")).empty());
    EXPECT_FALSE(positive_influences(r("rAB"), r("rAY")).empty());
    EXPECT_TRUE(positive_influences(r("rAX"), r("rAC")).empty());
    EXPECT_TRUE(positive_influences(r("rAC"), r("rAY")).empty());
    // rAC consumes a free A.site3 that rAB also requires.
    EXPECT_FALSE(negative_influences(r("rAC"), r("rAB")).empty());
    EXPECT_FALSE(negative_influences(r("rAX"), r("rAY")).empty());
    for (const auto& w : positive_influences(r("rAC"), r("rAX"))) {
        EXPECT_EQ(w.polarity, Polarity::Positive);
        EXPECT_TRUE(overlap_escapes(w.overlap.left, w.source->q));
        EXPECT_TRUE(w.overlap.left.is_mono());
        EXPECT_TRUE(w.overlap.right.is_mono());
    }
    EXPECT_THROW(model->rule("nope"), UnknownRuleName);
}

TEST(Influence, CountsMatchBruteForceOnRandomRules) {
    std::mt19937 rng(31);
    auto sig = three_type_signature();
    std::size_t pairs = 0, nonempty = 0;
    for (int round = 0; round < 60; ++round) {
        auto rt = random_trace(sig, rng, 3, 5);
        const auto& rules = rt.model->rules();
        for (const auto& a : rules)
            for (const auto& b : rules) {
                ++pairs;
                auto pos = positive_influences(a, b);
                auto neg = negative_influences(a, b);
                nonempty += !pos.empty();
                EXPECT_EQ(pos.size(), oracle_influence_count(*a, *b, true)) << format_rule(*a) << " / " << format_rule(*b);
                EXPECT_EQ(neg.size(), oracle_influence_count(*a, *b, false)) << format_rule(*a) << " / " << format_rule(*b);
            }
    }
    EXPECT_GT(pairs, 100u);
    EXPECT_GT(nonempty, 10u);
}

TEST(Model, CacheIsStableAcrossThreads) {
    auto model = load_model(fixture("resources.model.json"));
    std::vector<std::size_t> sizes(4);
    std::vector<std::thread> ts;
    for (std::size_t k = 0; k < sizes.size(); ++k)
        ts.emplace_back([&, k] {
            std::size_t s = 0;
            for (const auto& a : model->rules())
                for (const auto& b : model->rules()) s += model->positive(a, b).size() + model->negative(a, b).size();
            sizes[k] = s;
        });
    for (auto& t : ts) t.join();
    for (auto s : sizes) EXPECT_EQ(s, sizes[0]);
    const auto* first = &model->positive(model->rule("rAC"), model->rule("rAX"));
    EXPECT_EQ(first, &model->positive(model->rule("rAC"), model->rule("rAX")));
}

TEST(Model, RejectsDuplicatesAndForeignSignatures) {
    auto model = load_model(fixture("fig2.model.json"));
    EXPECT_THROW(model->add_rule(model->rule("rAB")), InputError);
    auto other = std::make_shared<Signature>();
    other->add("A", 4);
    EXPECT_THROW(model->add_rule(parse_rule("z: A(0) -> A(0)", other)), InputError);
}
