#pragma once

#include <string>
#include <vector>

#include "storycheck/concretize.hpp"

namespace storycheck {

// A way an event can occur: the transition realising it in a concretization
// of its causal past.
struct OccurrenceContext {
    Transition transition;  // source/matching and target/comatching
};

// Distinct up to isomorphism of (state, matching); throws EventNotInPoset.
std::vector<OccurrenceContext> occurrence_contexts(const Poset& s, std::size_t e, const Model& model,
                                                   const ConcretizeOptions& options = {});

struct ScenarioOptions {
    bool all = false;                 // collect every scenario, not just the first
    bool allow_self = false;          // let an event interfere with itself
    ConcretizeOptions concretize{};
};

struct Scenario {
    GraphPtr graph;
    Cospan legs;                 // occurrence contexts -> scenario graph
    std::size_t context1 = 0;
    std::size_t context2 = 0;
    const InfluenceWitness* witness = nullptr;
};

struct ScenarioResult {
    bool exists = false;
    std::vector<Scenario> scenarios;    // distinct up to isomorphism of the graph
    std::vector<std::string> failures;  // why candidate gluings failed
};

// Mode Negative: can e1 of s1 prevent e2 of s2; Positive: can e1 enable e2.
ScenarioResult find_scenario(const Poset& s1, std::size_t e1, const Poset& s2, std::size_t e2, Polarity mode,
                             const Model& model, const ScenarioOptions& options = {});

}  // namespace storycheck
