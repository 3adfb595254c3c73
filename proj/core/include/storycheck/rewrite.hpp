#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "storycheck/catops.hpp"
#include "storycheck/sitegraph.hpp"

namespace storycheck {

// Rewriting rule L <-p- K -q-> R with mono legs.
struct Rule {
    std::string name;
    GraphPtr left;
    GraphPtr kept;
    GraphPtr right;
    Morphism p;  // K -> L
    Morphism q;  // K -> R

    // Elements of L outside p(K) and of R outside q(K).
    std::set<AgentId> deleted_agents;
    std::set<Node> deleted_nodes;
    std::set<Edge> deleted_edges;
    std::set<AgentId> created_agents;
    std::set<Node> created_nodes;
    std::set<Edge> created_edges;
};

using RulePtr = std::shared_ptr<const Rule>;

struct RuleViolation {
    enum class Kind { SignatureMismatch, NotMorphism, NotMono, SideConditionViolated };
    Kind kind;
    std::string message;
};

std::variant<Rule, std::vector<RuleViolation>> validate_rule(std::string name, GraphPtr left, GraphPtr kept,
                                                             GraphPtr right, AgentMap p, AgentMap q);
// Throws InputError listing every violation.
RulePtr make_rule(std::string name, GraphPtr left, GraphPtr kept, GraphPtr right, AgentMap p, AgentMap q);

// Rule between graphs whose shared agents carry equal identifiers: K is the
// largest common part (the shared agents with their nodes and the edges that
// agree on both sides).
RulePtr make_rule_by_ids(std::string name, const SiteGraph& left, const SiteGraph& right,
                         const std::set<AgentId>& preserved);

// One DPO step M <- D -> N. D has the identifiers of M; agents created by
// the rule take fresh identifiers above those of M in ascending R order.
struct Transition {
    RulePtr rule;
    GraphPtr source;
    GraphPtr context;
    GraphPtr target;
    Morphism matching;        // L -> M
    Morphism comatching;      // R -> N
    Morphism context_left;    // D -> M
    Morphism context_right;   // D -> N
    Morphism kept_to_context; // K -> D
};

struct NoContext {
    enum class Reason { NotAMatch, DanglingEdge, DanglingNode, RightSquareFailed };
    Reason reason;
    std::string message;
};

struct DpoOptions {
    bool certify = true;  // check both squares are pushouts
};

std::variant<Transition, NoContext> apply_dpo(const GraphPtr& m, const RulePtr& rule, const Morphism& matching,
                                              const DpoOptions& options = {});

// Matchings of the rule into M, in enumeration order.
std::vector<Morphism> matchings(const RulePtr& rule, const GraphPtr& m);

// Trace span M <- D -> N of a transition.
Span mix(const Transition& t);

// Rebuilds a transition from its parts, checking well-formedness.
Transition make_transition(const RulePtr& rule, const GraphPtr& source, const Morphism& matching);

struct Trace {
    std::vector<Transition> steps;
    std::size_t size() const { return steps.size(); }
    const Transition& operator[](std::size_t i) const { return steps[i]; }
    GraphPtr initial() const { return steps.empty() ? nullptr : steps.front().source; }
    GraphPtr final_state() const { return steps.empty() ? nullptr : steps.back().target; }
};

// Throws NotComposable at the first pair whose middle states differ.
Trace compose_trace(std::vector<Transition> steps);

bool same_state(const GraphPtr& a, const GraphPtr& b);

}  // namespace storycheck
