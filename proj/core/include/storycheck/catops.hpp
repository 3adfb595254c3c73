#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "storycheck/sitegraph.hpp"

namespace storycheck {

// Why a span of monos has no pushout in the category of site graphs.
struct Obstruction {
    enum class Kind {
        BoundAndFree,     // one side binds the node, the other marks it free
        PartnerMismatch,  // forced partners disagree on type or site
        SameSideMerge     // gluing would identify two agents of one graph
    };
    Kind kind;
    Node node;  // in the left graph when it has the agent, else in the right one
    std::string type;
    std::string message;
    std::string where() const { return type + ".site" + std::to_string(node.site); }
};

struct NoPushout {
    std::vector<Obstruction> obstructions;
    std::string reason() const;
};

using PushoutResult = std::variant<Cospan, NoPushout>;

// Pushout of a span of monos G1 <- O -> G2. Agents of G1 keep their
// identifiers; agents only in G2 get fresh ones starting at `fresh_base`
// (default: one past the largest identifier of G1), in ascending G2 order.
PushoutResult pushout(const Span& span, std::optional<AgentId> fresh_base = std::nullopt);

// Whether the cospan is a pushout of the span: the canonical comparison
// map from the computed pushout exists and is an isomorphism.
bool is_pushout_square(const Span& span, const Cospan& cospan);

// Gluing of G1 and G2 that identifies exactly the agent pairs in `sigma`
// and nothing else. Empty when the union is not a site graph.
std::optional<Cospan> glue(const GraphPtr& g1, const GraphPtr& g2, const AgentMap& sigma,
                           std::optional<AgentId> fresh_base = std::nullopt);

// Pullback of a cospan; the apex agents are numbered 0.. in order of
// (left agent, right agent) pairs.
Span pullback(const Cospan& cospan);

// All minimal gluings of G1 and G2, one member per non-empty or empty
// partial type-preserving identification, ordered by that identification.
struct MultisumMember {
    AgentMap sigma;  // G1 agent -> G2 agent
    Cospan gluing;
};
std::vector<MultisumMember> multisum(const GraphPtr& g1, const GraphPtr& g2);

// Partial morphism G ⇀ H presented by its domain of definition.
struct PartialMorphism {
    GraphPtr source;
    GraphPtr target;
    GraphPtr domain;     // subgraph of source, identifiers as in source
    Morphism defined;    // domain -> target

    bool defined_on(AgentId a) const { return domain->has_agent(a); }
    bool defined_on(Node n) const { return domain->has_node(n); }
    bool defined_on(const Edge& e) const { return domain->has_edge(e); }
    AgentId operator()(AgentId a) const { return defined(a); }
    Node operator()(Node n) const { return defined(n); }
    Edge operator()(const Edge& e) const { return defined(e); }
};

// Span with a mono left leg read as a partial morphism; throws LeftLegNotMono.
PartialMorphism span_to_partial(const Span& s);
Span partial_to_span(const PartialMorphism& p);

// Composition of spans A <- X -> B and B <- Y -> C through the pullback of X -> B <- Y.
Span compose_spans(const Span& first, const Span& second);

PartialMorphism compose(const PartialMorphism& second, const PartialMorphism& first);
PartialMorphism partial_identity(const GraphPtr& g);

}  // namespace storycheck
