#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "storycheck/poset.hpp"

namespace storycheck {

// A trace together with the transition realising each event.
struct Concretization {
    Trace trace;
    std::vector<std::size_t> concrete;  // event index -> transition index
};

// One influence witness chosen for every covering pair of the poset.
struct SpanAssignment {
    struct Choice {
        Polarity polarity;
        std::size_t from;  // positive: enabling event; negative: prevented event
        std::size_t to;    // positive: enabled event; negative: preventing event
        const InfluenceWitness* witness;
    };
    std::vector<Choice> choices;
};

struct ConcretizeOptions {
    std::size_t budget = 0;         // 0: POSET_SEARCH_BUDGET or 1e6
    std::size_t max_solutions = 0;  // 0: all
};

struct ConcretizeResult {
    std::vector<Concretization> solutions;
    bool exhausted = false;
    std::size_t expansions = 0;
};

std::size_t default_search_budget();

// Witness choices whose created (resp. consumed) parts do not collide.
std::vector<SpanAssignment> consistent_assignments(const Poset& s, const Model& model);

// Traces, up to isomorphism, whose abstraction is the given poset.
ConcretizeResult search_concretizations(const Poset& s, const Model& model, const ConcretizeOptions& options = {});

// As above; throws Unconcretizable when none exists and BudgetExhausted
// when the search stops early without a result.
std::vector<Concretization> concretize(const Poset& s, const Model& model, const ConcretizeOptions& options = {});

// Whether the trace is a concretization of the poset; returns one event map.
std::optional<Concretization> match_concretization(const Poset& s, const Model& model, const Trace& trace);

bool traces_isomorphic(const Trace& a, const Trace& b);

}  // namespace storycheck
