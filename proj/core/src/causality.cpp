#include "storycheck/causality.hpp"

namespace storycheck {

bool image_within(const Morphism& f, const Morphism& leg) { return !overlap_escapes(f, leg); }

std::optional<Morphism> transport(const Transition& t, const Morphism& h) {
    if (!image_within(h, t.context_left)) return std::nullopt;
    std::map<AgentId, AgentId> back;
    for (const auto& [d, m] : t.context_left.map().pairs()) back[m] = d;
    std::vector<std::pair<AgentId, AgentId>> pairs;
    for (const auto& [o, m] : h.map().pairs()) pairs.emplace_back(o, t.context_right(back.at(m)));
    return Morphism(h.source_ptr(), t.target, AgentMap(std::move(pairs)));
}

std::optional<Morphism> transport(const Trace& trace, std::size_t from_state, std::size_t to_state, Morphism h) {
    for (std::size_t k = from_state; k < to_state; ++k) {
        auto next = transport(trace[k], h);
        if (!next) return std::nullopt;
        h = std::move(*next);
    }
    return h;
}

bool enables(const Trace& trace, std::size_t i, std::size_t j, const InfluenceWitness& w) {
    const Transition& ti = trace[i];
    const Transition& tj = trace[j];
    auto h = transport(trace, i + 1, j, compose(ti.comatching, w.overlap.left));
    return h && h->map() == compose(tj.matching, w.overlap.right).map();
}

bool prevents(const Trace& trace, std::size_t j, std::size_t i, const InfluenceWitness& w) {
    const Transition& ti = trace[i];
    const Transition& tj = trace[j];
    auto h = transport(trace, i, j, compose(ti.matching, w.overlap.right));
    return h && h->map() == compose(tj.matching, w.overlap.left).map();
}

std::vector<TraceRelation> enablements(const Trace& trace, const Model& model) {
    std::vector<TraceRelation> out;
    for (std::size_t i = 0; i < trace.size(); ++i)
        for (std::size_t j = i + 1; j < trace.size(); ++j)
            for (const auto& w : model.positive(trace[i].rule, trace[j].rule))
                if (enables(trace, i, j, w)) out.push_back({i, j, w});
    return out;
}

std::vector<TraceRelation> preventions(const Trace& trace, const Model& model) {
    std::vector<TraceRelation> out;
    for (std::size_t i = 0; i < trace.size(); ++i)
        for (std::size_t j = i + 1; j < trace.size(); ++j)
            for (const auto& w : model.negative(trace[j].rule, trace[i].rule))
                if (prevents(trace, j, i, w)) out.push_back({j, i, w});
    return out;
}

bool sequential_independence(const Transition& t1, const Transition& t2) {
    if (!same_state(t1.target, t2.source)) throw NotComposable(0);
    return image_within(t1.comatching, t2.context_left) && image_within(t2.matching, t1.context_right);
}

bool parallel_independence(const Transition& t1, const Transition& t3) {
    if (!same_state(t1.source, t3.source)) throw SourcesDiffer();
    return image_within(t3.matching, t1.context_left) && image_within(t1.matching, t3.context_left);
}

}  // namespace storycheck
