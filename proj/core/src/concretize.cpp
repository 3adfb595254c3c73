#include "storycheck/concretize.hpp"

#include "storycheck/canonical.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <tuple>

namespace storycheck {

namespace {

using Key = std::tuple<int, AgentId, SiteIndex, int, AgentId, SiteIndex>;

Key key_of(AgentId a) { return {0, a, 0, 0, 0, 0}; }
Key key_of(Node n) { return {1, n.agent, n.site, 0, 0, 0}; }
Key key_of(const Edge& e) {
    return {2, e.first.agent, e.first.site, e.second.free ? 1 : 0, e.second.free ? 0 : e.second.partner.agent,
            e.second.free ? 0 : e.second.partner.site};
}

std::set<Key> image_keys(const Morphism& f) {
    std::set<Key> out;
    for (const auto& [a, b] : f.map().pairs()) out.insert(key_of(b));
    for (const auto& [n, l] : f.source().nodes()) out.insert(key_of(f(n)));
    for (const auto& e : f.source().edges()) out.insert(key_of(f(e)));
    return out;
}

// Right images of the overlap elements whose left image lies outside `kept`.
std::set<Key> escaping(const Span& overlap, const Morphism& kept) {
    std::set<Key> k = image_keys(kept);
    std::set<Key> out;
    const SiteGraph& o = overlap.apex();
    for (const auto& [a, t] : o.agents())
        if (!k.count(key_of(overlap.left(a)))) out.insert(key_of(overlap.right(a)));
    for (const auto& [n, l] : o.nodes())
        if (!k.count(key_of(overlap.left(n)))) out.insert(key_of(overlap.right(n)));
    for (const auto& e : o.edges())
        if (!k.count(key_of(overlap.left(e)))) out.insert(key_of(overlap.right(e)));
    return out;
}

bool disjoint(const std::set<Key>& a, const std::set<Key>& b) {
    for (const auto& x : a)
        if (b.count(x)) return false;
    return true;
}

struct Cover {
    Polarity polarity;
    std::size_t from;
    std::size_t to;
    std::vector<const InfluenceWitness*> candidates;
};

struct Plan {
    const Poset& s;
    const Model& model;
    std::vector<RulePtr> rules;
    std::vector<Cover> covers;

    Plan(const Poset& poset, const Model& m) : s(poset), model(m) {
        for (const auto& l : s.labels) rules.push_back(model.rule(l));
        Relation lt = s.leq.reduction();
        Relation inh = s.turnstile.reduction();
        for (auto [i, j] : lt.pairs()) {
            Cover c{Polarity::Positive, i, j, {}};
            for (const auto& w : model.positive(rules[i], rules[j])) c.candidates.push_back(&w);
            covers.push_back(std::move(c));
        }
        for (auto [i, j] : inh.pairs()) {
            Cover c{Polarity::Negative, i, j, {}};
            for (const auto& w : model.negative(rules[j], rules[i]))
                if (image_within(w.overlap.right, rules[i]->p)) c.candidates.push_back(&w);
            covers.push_back(std::move(c));
        }
    }

    bool must_precede(std::size_t i, std::size_t j) const { return s.less(i, j) || s.inhibits(i, j); }

    std::set<Key> produced(const Cover& c, const InfluenceWitness& w) const {
        // Positive: parts of L_to created by `from`. Negative: parts of L_from consumed by `to`.
        return escaping(w.overlap, c.polarity == Polarity::Positive ? rules[c.from]->q : rules[c.to]->p);
    }

    std::vector<SpanAssignment> assignments() const {
        std::vector<SpanAssignment> out;
        std::vector<SpanAssignment::Choice> chosen;
        std::vector<std::set<Key>> marks;
        auto rec = [&](auto&& self, std::size_t k) -> void {
            if (k == covers.size()) {
                out.push_back(SpanAssignment{chosen});
                return;
            }
            const Cover& c = covers[k];
            for (const InfluenceWitness* w : c.candidates) {
                std::set<Key> mine = produced(c, *w);
                bool ok = true;
                for (std::size_t x = 0; x < chosen.size() && ok; ++x) {
                    const auto& o = chosen[x];
                    if (o.polarity != c.polarity) continue;
                    bool same_site = c.polarity == Polarity::Positive ? o.to == c.to : o.from == c.from;
                    if (same_site && !disjoint(marks[x], mine)) ok = false;
                }
                if (!ok) continue;
                chosen.push_back({c.polarity, c.from, c.to, w});
                marks.push_back(std::move(mine));
                self(self, k + 1);
                chosen.pop_back();
                marks.pop_back();
            }
        };
        rec(rec, 0);
        return out;
    }
};

// Symbolic agent: one of the initial state or the one created by a step.
struct Ref {
    int kind = 0;  // 0 initial, 1 created
    AgentId id = 0;
    std::size_t step = 0;
    auto operator<=>(const Ref&) const = default;
    static Ref initial(AgentId a) { return Ref{0, a, 0}; }
    static Ref created(std::size_t step, AgentId r) { return Ref{1, r, step}; }
};

struct Partial {
    SiteGraph m0;
    AgentId next_initial = 0;
    std::vector<std::size_t> order;
    std::vector<std::map<AgentId, Ref>> refs;
    std::vector<Transition> steps;
    std::vector<std::map<Ref, AgentId>> alive;  // per state

    GraphPtr state(std::size_t k) const { return k == 0 ? share(m0) : steps[k - 1].target; }
};

bool replay(Partial& p, const std::vector<RulePtr>& rules, std::size_t upto) {
    p.steps.clear();
    p.alive.assign(1, {});
    GraphPtr cur = share(p.m0);
    for (const auto& [a, t] : p.m0.agents()) p.alive[0][Ref::initial(a)] = a;
    DpoOptions opt{false};
    for (std::size_t k = 0; k < upto; ++k) {
        const RulePtr& r = rules[p.order[k]];
        std::vector<std::pair<AgentId, AgentId>> pairs;
        for (const auto& [l, ref] : p.refs[k]) {
            auto it = p.alive[k].find(ref);
            if (it == p.alive[k].end()) return false;
            pairs.emplace_back(l, it->second);
        }
        Morphism m(r->left, cur, AgentMap(std::move(pairs)));
        auto res = apply_dpo(cur, r, m, opt);
        auto* t = std::get_if<Transition>(&res);
        if (!t) return false;
        std::map<AgentId, AgentId> back;
        for (const auto& [d, x] : t->context_left.map().pairs()) back[x] = d;
        std::map<Ref, AgentId> next;
        for (const auto& [ref, id] : p.alive[k]) {
            auto it = back.find(id);
            if (it != back.end()) next[ref] = t->context_right(it->second);
        }
        for (AgentId c : r->created_agents) next[Ref::created(k, c)] = t->comatching(c);
        cur = t->target;
        p.steps.push_back(std::move(*t));
        p.alive.push_back(std::move(next));
    }
    return true;
}

// Identifies initial agent `drop` with `keep` in M0.
bool merge_initial(Partial& p, AgentId keep, AgentId drop) {
    const SiteGraph& g = p.m0;
    auto ren = [&](Node n) { return n.agent == drop ? Node{keep, n.site} : n; };
    std::map<Node, std::optional<Link>> links;
    for (const auto& [n, l] : g.nodes()) {
        Node rn = ren(n);
        std::optional<Link> rl;
        if (l) rl = l->free ? *l : Link::to(ren(l->partner));
        if (rl && !rl->free && rl->partner == rn) return false;
        auto [it, fresh] = links.emplace(rn, rl);
        if (fresh || !rl) continue;
        if (!it->second)
            it->second = rl;
        else if (*it->second != *rl)
            return false;
    }
    SiteGraph out(g.signature_ptr());
    for (const auto& [a, t] : g.agents())
        if (a != drop) out.add_agent(a, t);
    for (const auto& [n, l] : links) out.add_node(n);
    for (const auto& [n, l] : links) {
        if (!l) continue;
        if (l->free)
            out.bind_free(n);
        else if (n < l->partner) {
            const auto& back = links.at(l->partner);
            if (!back || *back != Link::to(n)) return false;
            out.bind(n, l->partner);
        }
    }
    p.m0 = std::move(out);
    for (auto& step : p.refs)
        for (auto& [l, ref] : step)
            if (ref == Ref::initial(drop)) ref = Ref::initial(keep);
    return true;
}

class Search {
public:
    Search(const Plan& plan, const SpanAssignment& assignment, std::size_t budget, std::size_t& expansions,
           bool& exhausted)
        : plan_(plan), asg_(assignment), budget_(budget), expansions_(expansions), exhausted_(exhausted) {}

    void run(std::vector<Concretization>& out, std::size_t max_solutions) {
        out_ = &out;
        max_ = max_solutions;
        Partial start{SiteGraph(plan_.model.signature_ptr()), 0, {}, {}, {}, {}};
        replay(start, plan_.rules, 0);
        dfs(start);
    }

private:
    const Plan& plan_;
    const SpanAssignment& asg_;
    std::size_t budget_;
    std::size_t& expansions_;
    bool& exhausted_;
    std::vector<Concretization>* out_ = nullptr;
    std::size_t max_ = 0;

    bool stop() const { return exhausted_ || (max_ && out_->size() >= max_); }

    static std::optional<std::size_t> position(const Partial& p, std::size_t e) {
        auto it = std::find(p.order.begin(), p.order.end(), e);
        if (it == p.order.end()) return std::nullopt;
        return static_cast<std::size_t>(it - p.order.begin());
    }

    void dfs(const Partial& p) {
        if (stop()) return;
        std::size_t n = plan_.s.size();
        if (p.order.size() == n) {
            accept(p);
            return;
        }
        for (std::size_t e = 0; e < n && !stop(); ++e) {
            if (position(p, e)) continue;
            bool ready = true;
            for (std::size_t i = 0; i < n && ready; ++i)
                if (plan_.must_precede(i, e) && !position(p, i)) ready = false;
            if (!ready) continue;
            if (++expansions_ > budget_) {
                exhausted_ = true;
                return;
            }
            auto next = extend(p, e);
            if (next && relations_ok(*next)) dfs(*next);
        }
    }

    void accept(const Partial& p) {
        Concretization c{compose_trace(p.steps), std::vector<std::size_t>(plan_.s.size())};
        for (std::size_t k = 0; k < p.order.size(); ++k) c.concrete[p.order[k]] = k;
        // Re-run with certification on.
        std::vector<Transition> certified;
        GraphPtr cur = c.trace.initial();
        for (const auto& t : c.trace.steps) {
            Morphism m(t.rule->left, cur, t.matching.map());
            certified.push_back(make_transition(t.rule, cur, m));
            cur = certified.back().target;
        }
        c.trace = compose_trace(std::move(certified));
        for (const auto& old : *out_)
            if (old.concrete == c.concrete && traces_isomorphic(old.trace, c.trace)) return;
        out_->push_back(std::move(c));
    }

    // Images forced on the new event's left-hand side by assigned witnesses.
    std::optional<std::vector<std::pair<AgentId, Ref>>> forced(const Partial& p, std::size_t e) const {
        std::size_t k = p.order.size();
        std::map<AgentId, Ref> by_id;
        for (const auto& [ref, id] : p.alive[k]) by_id[id] = ref;
        std::vector<std::pair<AgentId, Ref>> out;
        Trace t{p.steps};
        for (const auto& c : asg_.choices) {
            if (c.to != e) continue;
            const Span& o = c.witness->overlap;
            std::optional<Morphism> h;
            const Morphism* into_l = nullptr;
            if (c.polarity == Polarity::Positive) {
                std::size_t sf = *position(p, c.from);
                h = transport(t, sf + 1, k, compose(p.steps[sf].comatching, o.left));
                into_l = &o.right;
            } else {
                std::size_t sf = *position(p, c.from);
                h = transport(t, sf, k, compose(p.steps[sf].matching, o.right));
                into_l = &o.left;
            }
            if (!h) return std::nullopt;
            for (const auto& [x, y] : h->map().pairs()) out.emplace_back((*into_l)(x), by_id.at(y));
        }
        return out;
    }

    std::optional<Partial> extend(const Partial& base, std::size_t e) const {
        const RulePtr& rule = plan_.rules[e];
        Partial p = base;
        std::map<AgentId, Ref> refs;
        for (int guard = 0;; ++guard) {
            if (guard > 64) return std::nullopt;
            auto f = forced(p, e);
            if (!f) return std::nullopt;
            refs.clear();
            std::optional<std::pair<Ref, Ref>> merge;
            for (const auto& [l, ref] : *f) {
                auto [it, fresh] = refs.emplace(l, ref);
                if (fresh || it->second == ref) continue;
                if (it->second.kind == 0 && ref.kind == 0) {
                    merge = std::make_pair(std::min(it->second, ref), std::max(it->second, ref));
                    break;
                }
                return std::nullopt;
            }
            if (!merge) break;
            if (!merge_initial(p, merge->first.id, merge->second.id)) return std::nullopt;
            if (!replay(p, plan_.rules, p.order.size())) return std::nullopt;
        }
        std::set<Ref> images;
        for (const auto& [l, ref] : refs)
            if (!images.insert(ref).second) return std::nullopt;

        // Fresh initial agents for the remaining left-hand side agents.
        AgentId fresh = std::max(p.next_initial, p.m0.next_agent_id());
        for (const auto& [a, t] : rule->left->agents()) {
            if (refs.count(a)) continue;
            p.m0.add_agent(fresh, t);
            refs[a] = Ref::initial(fresh++);
        }
        p.next_initial = fresh;
        std::size_t k = p.order.size();
        if (!replay(p, plan_.rules, k)) return std::nullopt;

        // Add to M0 whatever the left-hand side needs on untouched initial agents.
        GraphPtr cur = p.state(k);
        const auto& alive = p.alive[k];
        auto cur_of = [&](const Ref& r) -> std::optional<AgentId> {
            auto it = alive.find(r);
            if (it == alive.end()) return std::nullopt;
            return it->second;
        };
        const SiteGraph& L = *rule->left;
        for (const auto& [a, ref] : refs)
            if (!cur_of(ref)) return std::nullopt;
        for (const auto& [n, l] : L.nodes()) {
            const Ref& r = refs.at(n.agent);
            Node cn{*cur_of(r), n.site};
            if (!cur->has_node(cn)) {
                if (r.kind != 0) return std::nullopt;
                Node m0n{r.id, n.site};
                if (!p.m0.has_node(m0n)) p.m0.add_node(m0n);
            }
        }
        for (const auto& [n, l] : L.nodes()) {
            if (!l) continue;
            const Ref& r = refs.at(n.agent);
            Node cn{*cur_of(r), n.site};
            Link want = l->free ? *l : Link::to(Node{*cur_of(refs.at(l->partner.agent)), l->partner.site});
            if (cur->has_node(cn)) {
                if (const auto& have = cur->link(cn)) {
                    if (*have != want) return std::nullopt;
                    continue;
                }
            }
            if (r.kind != 0) return std::nullopt;
            Node m0n{r.id, n.site};
            if (l->free) {
                const auto& m0l = p.m0.link(m0n);
                if (m0l && !m0l->free) return std::nullopt;
                if (!m0l) p.m0.bind_free(m0n);
                continue;
            }
            const Ref& rb = refs.at(l->partner.agent);
            if (rb.kind != 0) return std::nullopt;
            Node m0b{rb.id, l->partner.site};
            if (cur->has_node(Node{*cur_of(rb), m0b.site}) && cur->link(Node{*cur_of(rb), m0b.site}))
                return std::nullopt;
            const auto& la = p.m0.link(m0n);
            const auto& lb = p.m0.link(m0b);
            if (la && lb && *la == Link::to(m0b)) continue;
            if (la || lb) return std::nullopt;
            p.m0.bind(m0n, m0b);
        }
        p.order.push_back(e);
        p.refs.push_back(refs);
        if (!replay(p, plan_.rules, k + 1)) return std::nullopt;
        return p;
    }

    bool relations_ok(const Partial& p) const {
        Trace t{p.steps};
        std::size_t k = p.order.size();
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b) {
                std::size_t ea = p.order[a], eb = p.order[b];
                for (const auto& w : plan_.model.positive(plan_.rules[ea], plan_.rules[eb]))
                    if (!plan_.s.less(ea, eb) && enables(t, a, b, w)) return false;
                for (const auto& w : plan_.model.negative(plan_.rules[eb], plan_.rules[ea]))
                    if (!plan_.s.inhibits(ea, eb) && prevents(t, b, a, w)) return false;
            }
        for (const auto& c : asg_.choices) {
            auto pf = position(p, c.from);
            auto pt = position(p, c.to);
            if (!pf || !pt) continue;
            bool ok = c.polarity == Polarity::Positive ? enables(t, *pf, *pt, *c.witness)
                                                       : prevents(t, *pt, *pf, *c.witness);
            if (!ok) return false;
        }
        return true;
    }
};

}  // namespace

std::size_t default_search_budget() {
    if (const char* env = std::getenv("POSET_SEARCH_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return 1000000;
}

std::vector<SpanAssignment> consistent_assignments(const Poset& s, const Model& model) {
    return Plan(s, model).assignments();
}

ConcretizeResult search_concretizations(const Poset& s, const Model& model, const ConcretizeOptions& options) {
    Plan plan(s, model);
    ConcretizeResult res;
    std::size_t budget = options.budget ? options.budget : default_search_budget();
    for (const auto& asg : plan.assignments()) {
        if (res.exhausted || (options.max_solutions && res.solutions.size() >= options.max_solutions)) break;
        Search search(plan, asg, budget, res.expansions, res.exhausted);
        std::vector<Concretization> found;
        search.run(found, options.max_solutions ? options.max_solutions - res.solutions.size() : 0);
        for (auto& c : found) {
            bool dup = false;
            for (const auto& old : res.solutions)
                if (old.concrete == c.concrete && traces_isomorphic(old.trace, c.trace)) {
                    dup = true;
                    break;
                }
            if (!dup) res.solutions.push_back(std::move(c));
        }
    }
    return res;
}

std::vector<Concretization> concretize(const Poset& s, const Model& model, const ConcretizeOptions& options) {
    auto res = search_concretizations(s, model, options);
    if (res.solutions.empty()) {
        if (res.exhausted) throw BudgetExhausted(options.budget ? options.budget : default_search_budget());
        throw Unconcretizable("poset " + s.name + " has no concretization");
    }
    return std::move(res.solutions);
}

bool traces_isomorphic(const Trace& a, const Trace& b) {
    if (a.size() != b.size()) return false;
    if (a.size() == 0) return true;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k].rule->name != b[k].rule->name) return false;
    if (!isomorphic(*a.initial(), *b.initial())) return false;
    for (const auto& phi0 : enumerate_monos(a.initial(), b.initial())) {
        if (!phi0.is_iso()) continue;
        AgentMap phi = phi0.map();
        bool ok = true;
        for (std::size_t k = 0; k < a.size() && ok; ++k) {
            const Transition& ta = a[k];
            const Transition& tb = b[k];
            for (const auto& [l, x] : ta.matching.map().pairs())
                if (tb.matching(l) != phi.at(x)) {
                    ok = false;
                    break;
                }
            if (!ok) break;
            std::map<AgentId, AgentId> back_b;
            for (const auto& [d, x] : tb.context_left.map().pairs()) back_b[x] = d;
            std::vector<std::pair<AgentId, AgentId>> next;
            for (const auto& [d, x] : ta.context_left.map().pairs()) {
                auto it = back_b.find(phi.at(x));
                if (it == back_b.end()) {
                    ok = false;
                    break;
                }
                next.emplace_back(ta.context_right(d), tb.context_right(it->second));
            }
            if (!ok) break;
            for (AgentId c : ta.rule->created_agents) next.emplace_back(ta.comatching(c), tb.comatching(c));
            phi = AgentMap(std::move(next));
            Morphism check(ta.target, tb.target, phi);
            if (!check.is_valid() || !check.is_iso()) ok = false;
        }
        if (ok) return true;
    }
    return false;
}

std::optional<Concretization> match_concretization(const Poset& s, const Model& model, const Trace& trace) {
    std::size_t n = s.size();
    if (trace.size() != n) return std::nullopt;
    for (std::size_t k = 0; k < n; ++k)
        if (!model.find_rule(trace[k].rule->name)) return std::nullopt;
    Plan plan(s, model);
    auto en = enablements(trace, model);
    auto pr = preventions(trace, model);

    std::vector<std::size_t> pi(n), used(n, 0);  // event -> step
    std::optional<Concretization> found;
    auto check = [&]() -> bool {
        std::vector<std::size_t> inv(n);
        for (std::size_t e = 0; e < n; ++e) inv[pi[e]] = e;
        for (const auto& r : en)
            if (!s.less(inv[r.from_index], inv[r.to_index])) return false;
        for (const auto& r : pr)
            if (!s.inhibits(inv[r.to_index], inv[r.from_index])) return false;
        // One realised witness per covering pair, chosen consistently.
        std::vector<std::vector<const InfluenceWitness*>> options;
        for (const auto& c : plan.covers) {
            std::vector<const InfluenceWitness*> ok;
            for (const InfluenceWitness* w : c.candidates) {
                bool real = c.polarity == Polarity::Positive ? enables(trace, pi[c.from], pi[c.to], *w)
                                                             : prevents(trace, pi[c.to], pi[c.from], *w);
                if (real) ok.push_back(w);
            }
            if (ok.empty()) return false;
            options.push_back(std::move(ok));
        }
        std::vector<std::set<Key>> marks;
        auto rec = [&](auto&& self, std::size_t k) -> bool {
            if (k == plan.covers.size()) return true;
            const Cover& c = plan.covers[k];
            for (const InfluenceWitness* w : options[k]) {
                std::set<Key> mine = plan.produced(c, *w);
                bool ok = true;
                for (std::size_t x = 0; x < k && ok; ++x) {
                    const Cover& o = plan.covers[x];
                    if (o.polarity != c.polarity) continue;
                    bool same_site = c.polarity == Polarity::Positive ? o.to == c.to : o.from == c.from;
                    if (same_site && !disjoint(marks[x], mine)) ok = false;
                }
                if (!ok) continue;
                marks.push_back(std::move(mine));
                if (self(self, k + 1)) return true;
                marks.pop_back();
            }
            return false;
        };
        return rec(rec, 0);
    };
    auto rec = [&](auto&& self, std::size_t e) -> bool {
        if (e == n) return check();
        for (std::size_t k = 0; k < n; ++k) {
            if (used[k] || trace[k].rule->name != s.labels[e]) continue;
            bool ok = true;
            for (std::size_t f = 0; f < e && ok; ++f) {
                if (plan.must_precede(f, e) && pi[f] > k) ok = false;
                if (plan.must_precede(e, f) && k > pi[f]) ok = false;
            }
            if (!ok) continue;
            pi[e] = k;
            used[k] = 1;
            if (self(self, e + 1)) return true;
            used[k] = 0;
        }
        return false;
    };
    if (!rec(rec, 0)) return std::nullopt;
    return Concretization{trace, pi};
}

}  // namespace storycheck
