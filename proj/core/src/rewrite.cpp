#include "storycheck/rewrite.hpp"

#include <algorithm>

namespace storycheck {

namespace {

std::set<SiteIndex> sites_of(const SiteGraph& g, AgentId a) {
    std::set<SiteIndex> s;
    for (Node n : g.nodes_of(a)) s.insert(n.site);
    return s;
}

}  // namespace

std::variant<Rule, std::vector<RuleViolation>> validate_rule(std::string name, GraphPtr left, GraphPtr kept,
                                                             GraphPtr right, AgentMap pmap, AgentMap qmap) {
    using K = RuleViolation::Kind;
    std::vector<RuleViolation> bad;
    if (!same_signature(*left, *kept) || !same_signature(*kept, *right)) {
        bad.push_back({K::SignatureMismatch, "rule sides use different signatures"});
        return bad;
    }
    Morphism p(kept, left, std::move(pmap));
    Morphism q(kept, right, std::move(qmap));
    for (const auto& [leg, f] : {std::pair<const char*, const Morphism*>{"left", &p}, {"right", &q}}) {
        for (const auto& v : f->violations()) bad.push_back({K::NotMorphism, std::string(leg) + " leg: " + v});
        if (!f->is_mono()) bad.push_back({K::NotMono, std::string(leg) + " leg is not injective"});
    }
    if (!bad.empty()) return bad;
    for (const auto& [k, t] : kept->agents()) {
        auto ks = sites_of(*kept, k);
        if (sites_of(*left, p(k)) != ks || sites_of(*right, q(k)) != ks)
            bad.push_back({K::SideConditionViolated,
                           "preserved agent " + std::to_string(k) + " of type " + kept->type_name(k) +
                               " does not mention the same sites on both sides"});
    }
    if (!bad.empty()) return bad;

    Rule r{std::move(name), left, kept, right, p, q, {}, {}, {}, {}, {}, {}};
    std::set<AgentId> kl, kr;
    std::set<Node> nl, nr;
    std::set<Edge> el, er;
    for (const auto& [k, t] : kept->agents()) {
        kl.insert(p(k));
        kr.insert(q(k));
    }
    for (const auto& [n, l] : kept->nodes()) {
        nl.insert(p(n));
        nr.insert(q(n));
    }
    for (const auto& e : kept->edges()) {
        el.insert(p(e));
        er.insert(q(e));
    }
    for (const auto& [a, t] : left->agents())
        if (!kl.count(a)) r.deleted_agents.insert(a);
    for (const auto& [n, l] : left->nodes())
        if (!nl.count(n)) r.deleted_nodes.insert(n);
    for (const auto& e : left->edges())
        if (!el.count(e)) r.deleted_edges.insert(e);
    for (const auto& [a, t] : right->agents())
        if (!kr.count(a)) r.created_agents.insert(a);
    for (const auto& [n, l] : right->nodes())
        if (!nr.count(n)) r.created_nodes.insert(n);
    for (const auto& e : right->edges())
        if (!er.count(e)) r.created_edges.insert(e);
    return r;
}

RulePtr make_rule(std::string name, GraphPtr left, GraphPtr kept, GraphPtr right, AgentMap p, AgentMap q) {
    std::string label = name;
    auto r = validate_rule(std::move(name), std::move(left), std::move(kept), std::move(right), std::move(p),
                           std::move(q));
    if (auto* bad = std::get_if<std::vector<RuleViolation>>(&r)) {
        std::vector<std::string> msgs;
        for (const auto& v : *bad) msgs.push_back(v.message);
        throw InputError("invalid rule '" + label + "': " + msgs.front(), msgs);
    }
    return std::make_shared<const Rule>(std::get<Rule>(std::move(r)));
}

RulePtr make_rule_by_ids(std::string name, const SiteGraph& left, const SiteGraph& right,
                         const std::set<AgentId>& preserved) {
    SiteGraph k(left.signature_ptr());
    std::vector<std::pair<AgentId, AgentId>> id;
    for (AgentId a : preserved) {
        if (!left.has_agent(a) || !right.has_agent(a) || left.type_of(a) != right.type_of(a))
            throw InputError("rule '" + name + "': preserved agent " + std::to_string(a) +
                             " must appear with the same type on both sides");
        k.add_agent(a, left.type_of(a));
        id.emplace_back(a, a);
    }
    for (AgentId a : preserved)
        for (Node n : left.nodes_of(a))
            if (right.has_node(n)) k.add_node(n);
    for (const auto& e : left.edges()) {
        if (!k.has_node(e.first) || !right.has_edge(e)) continue;
        if (!e.second.free && !k.has_node(e.second.partner)) continue;
        k.add_edge(e);
    }
    return make_rule(std::move(name), share(left), share(std::move(k)), share(right), AgentMap(id), AgentMap(id));
}

std::variant<Transition, NoContext> apply_dpo(const GraphPtr& m, const RulePtr& rule, const Morphism& matching,
                                              const DpoOptions& options) {
    using R = NoContext::Reason;
    if (!(matching.source_ptr() == rule->left || matching.source() == *rule->left) || !same_state(matching.target_ptr(), m))
        return NoContext{R::NotAMatch, "matching does not go from the rule's left side into the state"};
    if (!matching.is_mono() || !matching.is_valid())
        return NoContext{R::NotAMatch, "matching is not a monomorphism into the state"};

    SiteGraph d = *m;
    for (const auto& e : rule->deleted_edges) d.remove_edge(matching(e));
    for (Node n : rule->deleted_nodes) {
        Node mn = matching(n);
        if (d.link(mn))
            return NoContext{R::DanglingEdge, "an edge at a deleted node of " + d.type_name(mn.agent) + ".site" +
                                                  std::to_string(mn.site) + " is not removed by the rule"};
        d.remove_node(mn);
    }
    for (AgentId a : rule->deleted_agents) {
        AgentId ma = matching(a);
        for (Node n : d.nodes_of(ma)) {
            if (d.link(n))
                return NoContext{R::DanglingEdge, "an edge of a deleted agent " + d.type_name(ma) + " at site " +
                                                      std::to_string(n.site) + " is not removed by the rule"};
            return NoContext{R::DanglingNode, "a deleted agent " + d.type_name(ma) + " keeps site " +
                                                  std::to_string(n.site) + " not mentioned by the rule"};
        }
        d.remove_agent(ma);
    }
    auto dp = share(std::move(d));
    std::vector<std::pair<AgentId, AgentId>> kd;
    for (const auto& [k, l] : rule->p.map().pairs()) kd.emplace_back(k, matching(l));
    Morphism k_to_d(rule->kept, dp, AgentMap(std::move(kd)));
    Morphism d_to_m = Morphism::inclusion(dp, m);

    auto po = pushout(Span{k_to_d, rule->q}, m->next_agent_id());
    auto* right = std::get_if<Cospan>(&po);
    if (!right) return NoContext{R::RightSquareFailed, std::get<NoPushout>(po).reason()};

    if (options.certify) {
        if (!k_to_d.is_valid() || !is_pushout_square(Span{rule->p, k_to_d}, Cospan{matching, d_to_m}))
            throw Error("internal: left square of the DPO step is not a pushout");
        if (!right->right.is_mono() || !right->right.is_valid())
            throw Error("internal: comatching is not a monomorphism");
    }
    return Transition{rule, m, dp, right->left.target_ptr(), matching, right->right, d_to_m, right->left, k_to_d};
}

std::vector<Morphism> matchings(const RulePtr& rule, const GraphPtr& m) { return enumerate_monos(rule->left, m); }

Span mix(const Transition& t) { return Span{t.context_left, t.context_right}; }

Transition make_transition(const RulePtr& rule, const GraphPtr& source, const Morphism& matching) {
    auto r = apply_dpo(source, rule, matching);
    if (auto* nc = std::get_if<NoContext>(&r)) throw InputError("rule '" + rule->name + "' cannot be applied: " + nc->message);
    return std::get<Transition>(std::move(r));
}

bool same_state(const GraphPtr& a, const GraphPtr& b) { return a == b || (a && b && *a == *b); }

Trace compose_trace(std::vector<Transition> steps) {
    for (std::size_t i = 0; i + 1 < steps.size(); ++i)
        if (!same_state(steps[i].target, steps[i + 1].source)) throw NotComposable(i);
    return Trace{std::move(steps)};
}

}  // namespace storycheck
