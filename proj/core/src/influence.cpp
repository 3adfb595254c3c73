#include "storycheck/influence.hpp"

namespace storycheck {

bool overlap_escapes(const Morphism& overlap_leg, const Morphism& kept_leg) {
    std::set<AgentId> agents;
    std::set<Node> nodes;
    std::set<Edge> edges;
    for (const auto& [k, a] : kept_leg.map().pairs()) agents.insert(a);
    for (const auto& [n, l] : kept_leg.source().nodes()) nodes.insert(kept_leg(n));
    for (const auto& e : kept_leg.source().edges()) edges.insert(kept_leg(e));
    const SiteGraph& o = overlap_leg.source();
    for (const auto& [a, t] : o.agents())
        if (!agents.count(overlap_leg(a))) return true;
    for (const auto& [n, l] : o.nodes())
        if (!nodes.count(overlap_leg(n))) return true;
    for (const auto& e : o.edges())
        if (!edges.count(overlap_leg(e))) return true;
    return false;
}

namespace {

std::vector<InfluenceWitness> influences(const RulePtr& r1, const RulePtr& r2, Polarity pol) {
    const GraphPtr& g1 = pol == Polarity::Positive ? r1->right : r1->left;
    const Morphism& kept_leg = pol == Polarity::Positive ? r1->q : r1->p;
    std::vector<InfluenceWitness> out;
    for (auto& member : multisum(g1, r2->left)) {
        if (member.sigma.size() == 0) continue;
        Span o = pullback(member.gluing);
        if (!overlap_escapes(o.left, kept_leg)) continue;
        out.push_back(InfluenceWitness{r1, r2, pol, std::move(member.sigma), std::move(o), std::move(member.gluing)});
    }
    return out;
}

}  // namespace

std::vector<InfluenceWitness> positive_influences(const RulePtr& r1, const RulePtr& r2) {
    return influences(r1, r2, Polarity::Positive);
}

std::vector<InfluenceWitness> negative_influences(const RulePtr& r1, const RulePtr& r2) {
    return influences(r1, r2, Polarity::Negative);
}

void Model::add_rule(RulePtr r) {
    if (r->left->signature_ptr() != sig_)
        throw InputError("rule '" + r->name + "' uses a different signature");
    if (by_name_.count(r->name)) throw InputError("duplicate rule name '" + r->name + "'");
    by_name_[r->name] = r;
    rules_.push_back(std::move(r));
}

RulePtr Model::find_rule(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : it->second;
}

RulePtr Model::rule(const std::string& name) const {
    auto r = find_rule(name);
    if (!r) throw UnknownRuleName("unknown rule '" + name + "'");
    return r;
}

const std::vector<InfluenceWitness>& Model::positive(const RulePtr& r1, const RulePtr& r2) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(r1.get(), r2.get());
    auto it = pos_cache_.find(key);
    if (it == pos_cache_.end()) it = pos_cache_.emplace(key, positive_influences(r1, r2)).first;
    return it->second;
}

const std::vector<InfluenceWitness>& Model::negative(const RulePtr& r1, const RulePtr& r2) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(r1.get(), r2.get());
    auto it = neg_cache_.find(key);
    if (it == neg_cache_.end()) it = neg_cache_.emplace(key, negative_influences(r1, r2)).first;
    return it->second;
}

}  // namespace storycheck
