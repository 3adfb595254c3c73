#include "storycheck/poset.hpp"

#include <algorithm>
#include <set>

namespace storycheck {

Relation Relation::from_pairs(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    Relation r(n);
    for (auto [i, j] : pairs) {
        if (i >= n || j >= n) throw InputError("relation pair out of range");
        r.set(i, j);
    }
    return r;
}

Relation Relation::reflexive_transitive_closure() const {
    Relation r = *this;
    for (std::size_t i = 0; i < n_; ++i) r.set(i, i);
    for (std::size_t k = 0; k < n_; ++k)
        for (std::size_t i = 0; i < n_; ++i)
            if (r(i, k))
                for (std::size_t j = 0; j < n_; ++j)
                    if (r(k, j)) r.set(i, j);
    return r;
}

Relation Relation::without_diagonal() const {
    Relation r = *this;
    for (std::size_t i = 0; i < n_; ++i) r.set(i, i, false);
    return r;
}

Relation Relation::reduction() const {
    Relation c = reflexive_transitive_closure().without_diagonal();
    Relation r = c;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
            if (!c(i, j)) continue;
            for (std::size_t k = 0; k < n_; ++k)
                if (k != i && k != j && c(i, k) && c(k, j)) {
                    r.set(i, j, false);
                    break;
                }
        }
    return r;
}

bool Relation::acyclic() const {
    Relation c = reflexive_transitive_closure();
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j)
            if (c(i, j) && c(j, i)) return false;
    for (std::size_t i = 0; i < n_; ++i)
        if ((*this)(i, i)) return false;
    return true;
}

Relation Relation::restrict_to(const std::vector<std::size_t>& keep) const {
    Relation r(keep.size());
    for (std::size_t a = 0; a < keep.size(); ++a)
        for (std::size_t b = 0; b < keep.size(); ++b) r.set(a, b, (*this)(keep[a], keep[b]));
    return r;
}

Relation Relation::united(const Relation& o) const {
    Relation r = *this;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if (o(i, j)) r.set(i, j);
    return r;
}

std::vector<std::pair<std::size_t, std::size_t>> Relation::pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if ((*this)(i, j)) out.emplace_back(i, j);
    return out;
}

Poset Poset::make(std::string name, std::vector<std::string> events, std::vector<std::string> labels,
                  const std::vector<std::pair<std::size_t, std::size_t>>& lt,
                  const std::vector<std::pair<std::size_t, std::size_t>>& inh) {
    if (events.size() != labels.size()) throw InputError("every event needs exactly one label");
    std::set<std::string> seen;
    for (const auto& e : events)
        if (!seen.insert(e).second) throw InputError("duplicate event '" + e + "' in poset " + name);
    std::size_t n = events.size();
    Relation l = Relation::from_pairs(n, lt);
    Relation h = Relation::from_pairs(n, inh);
    if (!l.without_diagonal().united(h.without_diagonal()).acyclic())
        throw InputError("poset " + name + " has a cycle through its precedence and inhibition pairs");
    Poset p{std::move(name), std::move(events), std::move(labels), l, h, l.reflexive_transitive_closure(),
            h.reflexive_transitive_closure()};
    return p;
}

std::optional<std::size_t> Poset::find(const std::string& event) const {
    auto it = std::find(events.begin(), events.end(), event);
    if (it == events.end()) return std::nullopt;
    return static_cast<std::size_t>(it - events.begin());
}

std::size_t Poset::index_of(const std::string& event) const {
    auto i = find(event);
    if (!i) throw EventNotInPoset("event '" + event + "' is not in poset " + name);
    return *i;
}

IntermediateStructure abstract_step1(const Trace& trace, const Model& model) {
    IntermediateStructure s;
    for (const auto& t : trace.steps) s.labels.push_back(t.rule->name);
    s.positive = enablements(trace, model);
    s.negative = preventions(trace, model);
    return s;
}

Poset abstract_step2(const IntermediateStructure& s, std::string name) {
    std::vector<std::string> events;
    for (std::size_t i = 0; i < s.labels.size(); ++i) events.push_back("e" + std::to_string(i + 1));
    std::vector<std::pair<std::size_t, std::size_t>> lt, inh;
    for (const auto& r : s.positive) lt.emplace_back(r.from_index, r.to_index);
    for (const auto& r : s.negative) inh.emplace_back(r.to_index, r.from_index);
    std::sort(lt.begin(), lt.end());
    lt.erase(std::unique(lt.begin(), lt.end()), lt.end());
    std::sort(inh.begin(), inh.end());
    inh.erase(std::unique(inh.begin(), inh.end()), inh.end());
    return Poset::make(std::move(name), std::move(events), s.labels, lt, inh);
}

Poset abstract_trace(const Trace& trace, const Model& model, std::string name) {
    return abstract_step2(abstract_step1(trace, model), std::move(name));
}

std::optional<std::vector<std::size_t>> poset_iso(const Poset& a, const Poset& b) {
    std::size_t n = a.size();
    if (b.size() != n) return std::nullopt;
    auto profile = [](const Poset& p, std::size_t i) {
        std::size_t up = 0, down = 0, tin = 0, tout = 0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            up += p.leq(i, j);
            down += p.leq(j, i);
            tout += p.turnstile(i, j);
            tin += p.turnstile(j, i);
        }
        return std::make_tuple(p.labels[i], up, down, tin, tout);
    };
    std::vector<std::size_t> map(n), used(n, 0);
    auto rec = [&](auto&& self, std::size_t i) -> bool {
        if (i == n) return true;
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j] || profile(a, i) != profile(b, j)) continue;
            bool ok = true;
            for (std::size_t k = 0; k < i && ok; ++k)
                ok = a.leq(i, k) == b.leq(j, map[k]) && a.leq(k, i) == b.leq(map[k], j) &&
                     a.turnstile(i, k) == b.turnstile(j, map[k]) && a.turnstile(k, i) == b.turnstile(map[k], j);
            if (!ok) continue;
            map[i] = j;
            used[j] = 1;
            if (self(self, i + 1)) return true;
            used[j] = 0;
        }
        return false;
    };
    if (!rec(rec, 0)) return std::nullopt;
    return map;
}

std::vector<Poset> quotient_by_iso(const std::vector<Poset>& posets) {
    std::vector<Poset> out;
    for (const auto& p : posets) {
        bool dup = false;
        for (const auto& q : out)
            if (poset_iso(p, q)) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(p);
    }
    return out;
}

CausalPast causal_past(const Poset& s, std::size_t e) {
    if (e >= s.size()) throw EventNotInPoset("event index out of range in poset " + s.name);
    std::vector<std::size_t> keep;
    std::vector<char> in(s.size(), 0);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.leq(i, e)) {
            keep.push_back(i);
            in[i] = 1;
        }
    bool crosses = false;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            if (s.inhibits(i, j) && in[i] != in[j]) crosses = true;
    std::vector<std::string> events, labels;
    for (std::size_t i : keep) {
        events.push_back(s.events[i]);
        labels.push_back(s.labels[i]);
    }
    Relation lt = s.lt.restrict_to(keep).united(s.leq.restrict_to(keep).reduction());
    Relation inh = s.inh.restrict_to(keep).united(s.turnstile.restrict_to(keep).reduction());
    Poset p = Poset::make(s.name + "[" + s.events[e] + "]", events, labels, lt.without_diagonal().pairs(),
                          inh.without_diagonal().pairs());
    std::size_t self = static_cast<std::size_t>(std::find(keep.begin(), keep.end(), e) - keep.begin());
    return CausalPast{std::move(p), std::move(keep), self, crosses};
}

}  // namespace storycheck
