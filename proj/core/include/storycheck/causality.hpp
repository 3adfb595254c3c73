#pragma once

#include <optional>
#include <vector>

#include "storycheck/influence.hpp"
#include "storycheck/rewrite.hpp"

namespace storycheck {

// A realised influence between two transitions of a trace. For enablements
// `from_index` enables `to_index` (from < to). For preventions `from_index`
// is the preventer and `to_index` the earlier transition it prevents.
struct TraceRelation {
    std::size_t from_index;
    std::size_t to_index;
    InfluenceWitness witness;
};

std::vector<TraceRelation> enablements(const Trace& trace, const Model& model);
std::vector<TraceRelation> preventions(const Trace& trace, const Model& model);

// Whether some witness realises the enablement of transition j by i (i < j).
bool enables(const Trace& trace, std::size_t i, std::size_t j, const InfluenceWitness& w);
// Whether some witness realises the prevention of transition i by j (i < j).
bool prevents(const Trace& trace, std::size_t j, std::size_t i, const InfluenceWitness& w);

// Both throw on ill-formed input: NotComposable when t1's target is not t2's
// source, SourcesDiffer when the transitions start from different states.
bool sequential_independence(const Transition& t1, const Transition& t2);
bool parallel_independence(const Transition& t1, const Transition& t3);

// Pushes a morphism into state M_from of the trace along M_from ⇀ ... ⇀ M_to
// (states are numbered 0..size, step k goes from state k to state k+1).
// Empty when some element of the image is consumed on the way.
std::optional<Morphism> transport(const Trace& trace, std::size_t from_state, std::size_t to_state, Morphism h);

// Pushes a morphism along one transition's trace span.
std::optional<Morphism> transport(const Transition& t, const Morphism& h);

// Whether every element of f's image lies in the image of the mono `leg`.
bool image_within(const Morphism& f, const Morphism& leg);

}  // namespace storycheck
