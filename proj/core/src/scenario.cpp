#include "storycheck/scenario.hpp"

#include <set>

#include "storycheck/canonical.hpp"

namespace storycheck {

std::vector<OccurrenceContext> occurrence_contexts(const Poset& s, std::size_t e, const Model& model,
                                                   const ConcretizeOptions& options) {
    CausalPast past = causal_past(s, e);
    auto res = search_concretizations(past.poset, model, options);
    if (res.solutions.empty() && res.exhausted)
        throw BudgetExhausted(options.budget ? options.budget : default_search_budget());
    std::vector<OccurrenceContext> out;
    std::set<std::string> seen;
    for (const auto& c : res.solutions) {
        const Transition& t = c.trace[c.concrete[past.event]];
        if (seen.insert(pointed_certificate(t.matching)).second) out.push_back(OccurrenceContext{t});
    }
    return out;
}

ScenarioResult find_scenario(const Poset& s1, std::size_t e1, const Poset& s2, std::size_t e2, Polarity mode,
                             const Model& model, const ScenarioOptions& options) {
    if (e1 >= s1.size()) throw EventNotInPoset("event index out of range in poset " + s1.name);
    if (e2 >= s2.size()) throw EventNotInPoset("event index out of range in poset " + s2.name);
    ScenarioResult result;
    if (&s1 == &s2 && e1 == e2 && !options.allow_self) {
        result.failures.push_back("an event does not interfere with itself");
        return result;
    }
    RulePtr r1 = model.rule(s1.labels[e1]);
    RulePtr r2 = model.rule(s2.labels[e2]);
    const auto& witnesses = mode == Polarity::Negative ? model.negative(r1, r2) : model.positive(r1, r2);
    if (witnesses.empty()) {
        result.failures.push_back("rule " + r1->name + " has no " +
                                  (mode == Polarity::Negative ? "negative" : "positive") + " influence on " + r2->name);
        return result;
    }
    auto c1 = occurrence_contexts(s1, e1, model, options.concretize);
    auto c2 = occurrence_contexts(s2, e2, model, options.concretize);
    if (c1.empty()) result.failures.push_back("event " + s1.events[e1] + " of " + s1.name + " cannot occur");
    if (c2.empty()) result.failures.push_back("event " + s2.events[e2] + " of " + s2.name + " cannot occur");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < c1.size(); ++i)
        for (std::size_t j = 0; j < c2.size(); ++j)
            for (const auto& w : witnesses) {
                const Transition& t1 = c1[i].transition;
                const Transition& t2 = c2[j].transition;
                const Morphism& into1 = mode == Polarity::Negative ? t1.matching : t1.comatching;
                Span span{compose(into1, w.overlap.left), compose(t2.matching, w.overlap.right)};
                auto po = pushout(span);
                if (auto* fail = std::get_if<NoPushout>(&po)) {
                    std::string why = fail->reason();
                    bool dup = false;
                    for (const auto& f : result.failures) dup = dup || f == why;
                    if (!dup) result.failures.push_back(why);
                    continue;
                }
                auto& cos = std::get<Cospan>(po);
                result.exists = true;
                std::string cert = iso_canonical(cos.apex()).certificate;
                if (seen.insert(cert).second)
                    result.scenarios.push_back(Scenario{cos.left.target_ptr(), cos, i, j, &w});
                if (!options.all) return result;
            }
    return result;
}

}  // namespace storycheck
