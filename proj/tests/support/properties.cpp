#include "properties.hpp"

#include <random>

#include "generators.hpp"
#include "oracles.hpp"
#include "storycheck/causality.hpp"
#include "storycheck/concretize.hpp"
#include "storycheck/dsl.hpp"
#include "storycheck/poset.hpp"

namespace storycheck::testing {

namespace {

Elements minus(Elements a, const Elements& b) {
    for (const auto& x : b) a.erase(x);
    return a;
}

bool meet(const Elements& a, const Elements& b) {
    for (const auto& x : a)
        if (b.count(x)) return true;
    return false;
}

Elements used(const Transition& t) { return image(*t.rule->left, t.matching.map()); }
Elements kept_in_source(const Transition& t) {
    return image(*t.rule->kept, oracle_compose(t.matching.map(), t.rule->p.map()));
}
Elements kept_in_target(const Transition& t) {
    return image(*t.rule->kept, oracle_compose(t.comatching.map(), t.rule->q.map()));
}
Elements produced(const Transition& t) { return image(*t.rule->right, t.comatching.map()); }
Elements consumed(const Transition& t) { return minus(used(t), kept_in_source(t)); }
Elements created(const Transition& t) { return minus(produced(t), kept_in_target(t)); }

// Prevention of t1 by the next step t2 through a critical overlap: some
// identification of L2 with L1 along agents that t1 carries into the source
// of t2 glues into a site graph, and its overlap holds an element t2 consumes
// while every overlap element survives t1.
bool oracle_prevents_next(const Transition& t1, const Transition& t2) {
    std::vector<std::pair<AgentId, AgentId>> coincident;  // L2 agent, L1 agent
    for (const auto& [b, m1b] : t1.matching.map().pairs()) {
        std::optional<AgentId> d = t1.context_left.map().preimage(m1b);
        if (!d) continue;
        AgentId carried = t1.context_right(*d);
        for (const auto& [a, m2a] : t2.matching.map().pairs())
            if (m2a == carried) coincident.emplace_back(a, b);
    }
    const SiteGraph &l1 = *t1.rule->left, &l2 = *t2.rule->left;
    Elements gone2 = minus(elements(l2), image(*t2.rule->kept, t2.rule->p.map()));
    Elements kept1 = kept_in_source(t1);
    for (std::size_t mask = 1; mask < (std::size_t(1) << coincident.size()); ++mask) {
        std::vector<std::pair<AgentId, AgentId>> sel, inv;
        for (std::size_t k = 0; k < coincident.size(); ++k)
            if (mask >> k & 1) {
                sel.push_back(coincident[k]);
                inv.emplace_back(coincident[k].second, coincident[k].first);
            }
        AgentMap sigma(sel), back(inv);
        if (!oracle_union_is_site_graph(l2, l1, sigma)) continue;
        bool hits = false;
        for (const auto& x : oracle_overlap(l2, l1, sigma)) hits = hits || gone2.count(x);
        if (!hits) continue;
        bool survives = true;
        Elements o_in_l1 = oracle_overlap(l1, l2, back);
        // Map L1-named overlap elements into the source of t1.
        SiteGraph sub(l1.signature_ptr());
        for (const auto& [a, t] : l1.agents())
            if (o_in_l1.count(agent_key(a))) sub.add_agent(a, t);
        for (const auto& [n, l] : l1.nodes())
            if (o_in_l1.count(node_key(n))) sub.add_node(n);
        for (const auto& e : l1.edges())
            if (o_in_l1.count(edge_key(e))) sub.add_edge(e);
        std::vector<std::pair<AgentId, AgentId>> restrict;
        for (const auto& [a, t] : sub.agents()) restrict.emplace_back(a, t1.matching(a));
        for (const auto& x : image(sub, AgentMap(restrict))) survives = survives && kept1.count(x);
        if (survives) return true;
    }
    return false;
}

std::string describe(const Trace& tr) {
    std::string s = tr.initial()->to_string();
    for (const auto& t : tr.steps) s += " =" + t.rule->name + "=> " + t.target->to_string();
    for (const auto& t : tr.steps) s += "\n    " + format_rule(*t.rule) + "  @" + t.matching.source().to_string();
    return s;
}

}  // namespace

PropertyReport check_adjacent_correspondence(std::size_t traces, unsigned seed) {
    PropertyReport rep;
    std::mt19937 rng(seed);
    auto sig = three_type_signature();
    std::size_t attempts = 0;
    while (rep.cases < traces && attempts++ < traces * 20) {
        auto rt = random_trace(sig, rng, 2, 5);
        if (rt.trace.size() != 2) continue;
        ++rep.cases;
        const Trace& tr = rt.trace;
        const Transition &t1 = tr[0], &t2 = tr[1];
        bool e_ref = meet(created(t1), used(t2));
        bool p_raw = meet(kept_in_target(t1), consumed(t2));
        bool p_ref = oracle_prevents_next(t1, t2);
        bool e_got = false, p_got = false;
        for (const auto& r : enablements(tr, *rt.model)) e_got = e_got || (r.from_index == 0 && r.to_index == 1);
        for (const auto& r : preventions(tr, *rt.model)) p_got = p_got || (r.from_index == 1 && r.to_index == 0);
        bool via_witness = false;
        for (const auto& w : rt.model->positive(t1.rule, t2.rule)) via_witness = via_witness || enables(tr, 0, 1, w);
        bool seq = sequential_independence(t1, t2);
        (e_ref || p_raw ? rep.positives : rep.negatives)++;
        if (meet(created(t1), image(*t1.context, t1.context_right.map())))
            rep.failures.push_back("generator made a rule that re-creates context: " + describe(tr));
        if (e_got != e_ref) rep.failures.push_back("enablement " + std::to_string(e_got) + ": " + describe(tr));
        if (via_witness != e_ref) rep.failures.push_back("enables() disagrees: " + describe(tr));
        if (p_got != p_ref) rep.failures.push_back("prevention " + std::to_string(p_got) + ": " + describe(tr));
        if (seq == (e_ref || p_raw))
            rep.failures.push_back("sequential independence " + std::to_string(seq) + ": " + describe(tr));

        // A second step from the same source as t1, for parallel independence.
        std::vector<std::pair<RulePtr, Morphism>> alts;
        for (const auto& r : rt.model->rules())
            for (const auto& m : matchings(r, t1.source)) alts.emplace_back(r, m);
        std::shuffle(alts.begin(), alts.end(), rng);
        for (const auto& [r, m] : alts) {
            auto res = apply_dpo(t1.source, r, m);
            auto* t3 = std::get_if<Transition>(&res);
            if (!t3) continue;
            bool conflict = meet(consumed(t1), used(*t3)) || meet(consumed(*t3), used(t1));
            if (parallel_independence(t1, *t3) == conflict)
                rep.failures.push_back("parallel independence disagrees: " + t1.rule->name + ", " + r->name +
                                       " on " + t1.source->to_string());
            if (conflict && rt.model->negative(r, t1.rule).empty() && rt.model->negative(t1.rule, r).empty())
                rep.failures.push_back("conflict without a critical overlap: " + t1.rule->name + ", " + r->name);
            break;
        }
    }
    if (rep.cases < traces) rep.failures.push_back("only " + std::to_string(rep.cases) + " traces generated");
    return rep;
}

RoundTripReport check_round_trip(std::size_t traces, unsigned seed, std::size_t steps, std::size_t agents) {
    RoundTripReport rep;
    std::mt19937 rng(seed);
    auto sig = three_type_signature();
    std::size_t attempts = 0;
    while (rep.traces < traces && attempts++ < traces * 20) {
        std::size_t n = 1 + rng() % steps;
        auto rt = random_trace(sig, rng, n, agents);
        if (rt.trace.size() == 0) continue;
        ++rep.traces;
        const Model& model = *rt.model;
        Poset p = abstract_trace(rt.trace, model);
        std::string where = describe(rt.trace);
        for (auto [i, j] : p.lt.without_diagonal().pairs()) {
            ++rep.edges;
            if (model.positive(model.rule(p.labels[i]), model.rule(p.labels[j])).empty())
                rep.lemma_failures.push_back("no positive influence for " + p.events[i] + " < " + p.events[j] + ": " +
                                             where);
        }
        for (auto [i, j] : p.inh.without_diagonal().pairs()) {
            ++rep.edges;
            if (model.negative(model.rule(p.labels[j]), model.rule(p.labels[i])).empty())
                rep.lemma_failures.push_back("no negative influence for " + p.events[i] + " |- " + p.events[j] + ": " +
                                             where);
        }
        if (!match_concretization(p, model, rt.trace))
            rep.theorem_failures.push_back("trace is not a concretization of its abstraction: " + where);
        ConcretizeResult res = search_concretizations(p, model);
        if (res.exhausted) rep.theorem_failures.push_back("search budget exhausted: " + where);
        if (res.solutions.empty()) rep.theorem_failures.push_back("no concretization found: " + where);
        for (const auto& c : res.solutions) {
            ++rep.solutions;
            Poset again = abstract_trace(c.trace, model);
            if (!poset_iso(again, p))
                rep.theorem_failures.push_back("concretization re-abstracts differently: " + where + "  vs  " +
                                               describe(c.trace));
        }
    }
    if (rep.traces < traces) rep.theorem_failures.push_back("only " + std::to_string(rep.traces) + " traces generated");
    return rep;
}

}  // namespace storycheck::testing
