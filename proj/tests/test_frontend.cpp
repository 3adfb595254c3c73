#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "generators.hpp"
#include "storycheck/canonical.hpp"
#include "storycheck/dot.hpp"
#include "storycheck/dsl.hpp"
#include "storycheck/io.hpp"

using namespace storycheck;
using namespace storycheck::testing;

TEST(Dsl, ParsesSiteForms) {
    auto model = load_model(fixture("fig2.model.json"));
    auto sig = model->signature_ptr();
    SiteGraph g = parse_graph("A(0, 1[?], 2[.], 3[1]), C(0[1])", sig);
    EXPECT_FALSE(g.link(Node{0, 0}).has_value());
    EXPECT_FALSE(g.link(Node{0, 1}).has_value());
    EXPECT_TRUE(g.link(Node{0, 2})->free);
    EXPECT_EQ(g.link(Node{0, 3})->partner, (Node{1, 0}));
    EXPECT_EQ(parse_graph("0", sig).agent_count(), 0u);
    EXPECT_EQ(parse_graph("", sig).agent_count(), 0u);
}

TEST(Dsl, Errors) {
    auto model = load_model(fixture("fig2.model.json"));
    auto sig = model->signature_ptr();
    EXPECT_THROW(parse_graph("Q(0)", sig), SyntaxError);
    EXPECT_THROW(parse_graph("A(9)", sig), SyntaxError);
    EXPECT_THROW(parse_graph("A(0,0)", sig), SyntaxError);
    EXPECT_THROW(parse_graph("A(0[1])", sig), InputError);
    EXPECT_THROW(parse_graph("A(0[c.0])", sig), SyntaxError);
    EXPECT_THROW(parse_rule("A(0) B(0)", sig, "r"), SyntaxError);
    EXPECT_THROW(parse_rule("A(0) -> A(0)", sig), InputError);  // unnamed
    try {
        parse_graph("A(0), B(0", sig);
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.position(), 9u);
    }
}

TEST(Dsl, PairingByLabelOrPosition) {
    auto model = load_model(fixture("fig2.model.json"));
    auto sig = model->signature_ptr();
    auto pos = parse_rule("r: A(0), B(0) -> A(0), C(0)", sig);
    EXPECT_EQ(pos->kept->agent_count(), 1u);
    EXPECT_EQ(pos->created_agents.size(), 1u);
    auto lab = parse_rule("r: x:A(0), y:B(0) -> y:B(0), x:A(0)", sig);
    EXPECT_EQ(lab->kept->agent_count(), 2u);
    auto swapped = parse_rule("r: A(0), B(0) -> B(0), A(0)", sig);
    EXPECT_EQ(swapped->kept->agent_count(), 0u);
    EXPECT_THROW(parse_rule("r: x:A(0) -> x:B(0)", sig), SyntaxError);
}

TEST(Dsl, FormatRoundTrip) {
    std::mt19937 rng(61);
    auto sig = three_type_signature();
    for (int round = 0; round < 100; ++round) {
        SiteGraph g = random_graph(sig, rng, rng() % 5);
        SiteGraph back = parse_graph(format_graph(g), sig);
        EXPECT_TRUE(isomorphic(g, back)) << format_graph(g);
    }
    for (int round = 0; round < 30; ++round) {
        auto rt = random_trace(sig, rng, 3, 5);
        for (const auto& r : rt.model->rules()) {
            RulePtr again = parse_rule(format_rule(*r), sig);
            EXPECT_EQ(again->name, r->name);
            EXPECT_TRUE(isomorphic(*again->left, *r->left));
            EXPECT_TRUE(isomorphic(*again->right, *r->right));
            EXPECT_EQ(again->kept->agent_count(), r->kept->agent_count());
            EXPECT_EQ(again->created_edges.size(), r->created_edges.size());
            EXPECT_EQ(again->deleted_edges.size(), r->deleted_edges.size());
        }
    }
}

TEST(Json, GraphRoundTrip) {
    std::mt19937 rng(67);
    auto sig = three_type_signature();
    for (int round = 0; round < 50; ++round) {
        SiteGraph g = random_graph(sig, rng, rng() % 6);
        EXPECT_EQ(read_graph(write_graph(g), sig), g);
    }
}

TEST(Json, ModelRoundTrip) {
    auto model = load_model(fixture("resources.model.json"));
    std::string once = write_model(*model);
    auto again = read_model(once);
    EXPECT_EQ(write_model(*again), once);
    ASSERT_EQ(again->rules().size(), model->rules().size());
    for (std::size_t k = 0; k < model->rules().size(); ++k) {
        EXPECT_EQ(write_graph(*again->rules()[k]->left), write_graph(*model->rules()[k]->left));
        EXPECT_EQ(write_graph(*again->rules()[k]->right), write_graph(*model->rules()[k]->right));
        EXPECT_EQ(write_rule(*again->rules()[k]), write_rule(*model->rules()[k]));
    }
}

TEST(Json, PosetRoundTrip) {
    Poset p = load_poset(fixture("resources_ax.poset.json"));
    Poset q = read_poset(write_poset(p));
    EXPECT_EQ(q.events, p.events);
    EXPECT_EQ(q.labels, p.labels);
    EXPECT_EQ(q.leq, p.leq);
    EXPECT_EQ(q.turnstile, p.turnstile);
    EXPECT_EQ(write_poset(q), write_poset(p));
}

TEST(Json, TraceRoundTripReverifies) {
    auto model = load_model(fixture("fig6.model.json"));
    Trace tr = load_trace(fixture("fig6.trace.json"), *model);
    std::string full = write_trace(tr);
    Trace again = read_trace(full, *model);
    ASSERT_EQ(again.size(), tr.size());
    for (std::size_t k = 0; k < tr.size(); ++k) EXPECT_EQ(*again[k].target, *tr[k].target);
    EXPECT_EQ(write_trace(again), full);
    // Tampering with a stored target is detected on load.
    std::string bad = full;
    auto at = bad.find("\"target\"");
    ASSERT_NE(at, std::string::npos);
    auto fr = bad.find("\"free\"", at);
    ASSERT_NE(fr, std::string::npos);
    bad.replace(fr, 6, "[0, 0]");
    EXPECT_THROW(read_trace(bad, *model), InputError);
}

TEST(Json, Errors) {
    EXPECT_THROW(read_model("{"), ParseError);
    EXPECT_THROW(read_model("{\"rules\": []}"), InputError);
    auto model = load_model(fixture("fig6.model.json"));
    EXPECT_THROW(read_trace("{\"steps\": [{\"rule\": \"zz\", \"matching\": []}]}", *model), UnknownRuleName);
    EXPECT_THROW(read_poset("{\"events\": [{\"id\": \"a\", \"label\": \"r\"}], \"lt\": [[\"a\", \"b\"]]}"),
                 EventNotInPoset);
    EXPECT_THROW(load_model("/nonexistent/model.json"), InputError);
}

TEST(Dot, PosetStableAndStyled) {
    auto model = load_model(fixture("fig6.model.json"));
    Trace tr = load_trace(fixture("fig6.trace.json"), *model);
    Poset p = abstract_trace(tr, *model);
    std::string a = poset_to_dot(p), b = poset_to_dot(abstract_trace(tr, *model));
    EXPECT_EQ(a, b);
    EXPECT_NE(a.find("\"e1\" [label=\"r1\"]"), std::string::npos);
    EXPECT_NE(a.find("\"e1\" -> \"e2\";"), std::string::npos);
    EXPECT_NE(a.find("\"e2\" -> \"e3\" [style=dashed];"), std::string::npos);
    EXPECT_EQ(a.find("\"e1\" -> \"e4\""), std::string::npos);  // covering pairs only
}

TEST(Dot, GraphPorts) {
    auto model = load_model(fixture("fig2.model.json"));
    SiteGraph g = parse_graph("A(2[b.0],3[.]), B(0[a.2])", model->signature_ptr());
    std::string d = graph_to_dot(g, "G");
    EXPECT_NE(d.find("<s2>2"), std::string::npos);
    EXPECT_NE(d.find("a0:s2 -- a1:s0;"), std::string::npos);
    EXPECT_EQ(d, graph_to_dot(g, "G"));
}
