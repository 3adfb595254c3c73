#include "storycheck/catops.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace storycheck {

std::string NoPushout::reason() const {
    if (obstructions.empty()) return "no pushout";
    std::string s = "pushout obstruction at ";
    for (std::size_t i = 0; i < obstructions.size(); ++i) {
        if (i) s += ", ";
        s += obstructions[i].where();
    }
    return s;
}

std::optional<Cospan> glue(const GraphPtr& g1, const GraphPtr& g2, const AgentMap& sigma,
                           std::optional<AgentId> fresh_base) {
    if (!same_signature(*g1, *g2)) throw Error("gluing graphs over different signatures");
    if (!sigma.injective()) throw Error("gluing along a non-injective identification");
    std::map<AgentId, AgentId> from2;  // G2 agent -> M agent
    for (const auto& [a, b] : sigma.pairs()) {
        if (!g1->has_agent(a) || !g2->has_agent(b) || g1->type_of(a) != g2->type_of(b))
            throw Error("gluing identification is not type preserving");
        from2[b] = a;
    }
    AgentId next = fresh_base.value_or(g1->next_agent_id());
    if (next < g1->next_agent_id()) throw Error("fresh identifiers collide with the left graph");
    for (const auto& [b, t] : g2->agents())
        if (!from2.count(b)) from2[b] = next++;

    SiteGraph m(g1->signature_ptr());
    for (const auto& [a, t] : g1->agents()) m.add_agent(a, t);
    for (const auto& [b, t] : g2->agents())
        if (!m.has_agent(from2.at(b))) m.add_agent(from2.at(b), t);

    std::map<Node, std::optional<Link>> links;
    auto put = [&](Node n, const std::optional<Link>& l) {
        auto [it, fresh] = links.emplace(n, l);
        if (fresh || !l) return true;
        if (!it->second) {
            it->second = l;
            return true;
        }
        return *it->second == *l;
    };
    for (const auto& [n, l] : g1->nodes())
        if (!put(n, l)) return std::nullopt;
    for (const auto& [n, l] : g2->nodes()) {
        Node mn{from2.at(n.agent), n.site};
        std::optional<Link> ml;
        if (l) ml = l->free ? *l : Link::to(Node{from2.at(l->partner.agent), l->partner.site});
        if (!put(mn, ml)) return std::nullopt;
    }
    for (const auto& [n, l] : links) m.add_node(n);
    for (const auto& [n, l] : links) {
        if (!l) continue;
        if (l->free) {
            m.bind_free(n);
        } else if (n < l->partner) {
            const auto& back = links.at(l->partner);
            if (!back || *back != Link::to(n)) return std::nullopt;
            m.bind(n, l->partner);
        }
    }
    auto mp = share(std::move(m));
    std::vector<std::pair<AgentId, AgentId>> right(from2.begin(), from2.end());
    return Cospan{Morphism::inclusion(g1, mp), Morphism(g2, mp, AgentMap(std::move(right)))};
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

}  // namespace

PushoutResult pushout(const Span& span, std::optional<AgentId> fresh_base) {
    if (!span.left.is_mono() || !span.right.is_mono()) throw Error("pushout of a span that is not mono");
    const GraphPtr& g1 = span.left.target_ptr();
    const GraphPtr& g2 = span.right.target_ptr();
    // Elements 0..n1-1 are agents of G1, n1.. agents of G2.
    std::vector<AgentId> ids;
    std::vector<int> side;
    std::map<AgentId, std::size_t> idx1, idx2;
    for (const auto& [a, t] : g1->agents()) {
        idx1[a] = ids.size();
        ids.push_back(a);
        side.push_back(1);
    }
    for (const auto& [a, t] : g2->agents()) {
        idx2[a] = ids.size();
        ids.push_back(a);
        side.push_back(2);
    }
    auto graph_of = [&](std::size_t x) -> const SiteGraph& { return side[x] == 1 ? *g1 : *g2; };
    auto index_of = [&](std::size_t x, AgentId a) { return side[x] == 1 ? idx1.at(a) : idx2.at(a); };

    UnionFind uf(ids.size());
    for (const auto& [o, t] : span.apex().agents()) uf.unite(idx1.at(span.left(o)), idx2.at(span.right(o)));

    NoPushout fail;
    auto report = [&](Obstruction::Kind k, std::size_t x, SiteIndex site, std::string msg) {
        Node n{ids[x], site};
        Obstruction ob{k, n, graph_of(x).type_name(ids[x]), std::move(msg)};
        for (const auto& old : fail.obstructions)
            if (old.type == ob.type && old.node == ob.node && old.kind == ob.kind) return;
        fail.obstructions.push_back(std::move(ob));
    };

    for (bool changed = true; changed;) {
        changed = false;
        std::map<std::size_t, std::vector<std::size_t>> classes;
        for (std::size_t x = 0; x < ids.size(); ++x) classes[uf.find(x)].push_back(x);
        for (const auto& [root, members] : classes) {
            std::map<SiteIndex, std::vector<std::pair<std::size_t, Link>>> at_site;
            for (std::size_t x : members) {
                const auto& g = graph_of(x);
                for (Node n : g.nodes_of(ids[x]))
                    if (const auto& l = g.link(n)) at_site[n.site].emplace_back(x, *l);
            }
            for (const auto& [site, links] : at_site) {
                // Representative member: prefer one from G1.
                std::size_t rep = links.front().first;
                for (const auto& [x, l] : links)
                    if (side[x] == 1) {
                        rep = x;
                        break;
                    }
                bool any_free = false;
                std::optional<std::pair<std::size_t, Link>> bound;
                for (const auto& [x, l] : links) {
                    if (l.free) {
                        any_free = true;
                        continue;
                    }
                    if (!bound) {
                        bound = std::make_pair(x, l);
                        continue;
                    }
                    std::size_t p = index_of(x, l.partner.agent);
                    std::size_t q = index_of(bound->first, bound->second.partner.agent);
                    if (l.partner.site != bound->second.partner.site ||
                        graph_of(p).type_of(ids[p]) != graph_of(q).type_of(ids[q])) {
                        report(Obstruction::Kind::PartnerMismatch, rep, site,
                               "forced partners of the same node disagree");
                        continue;
                    }
                    if (uf.unite(p, q)) changed = true;
                }
                if (any_free && bound)
                    report(Obstruction::Kind::BoundAndFree, rep, site, "node is bound on one side and free on the other");
            }
        }
        if (!fail.obstructions.empty()) return fail;
    }

    std::map<std::size_t, std::vector<std::size_t>> classes;
    for (std::size_t x = 0; x < ids.size(); ++x) classes[uf.find(x)].push_back(x);
    std::vector<std::pair<AgentId, AgentId>> sigma;
    for (const auto& [root, members] : classes) {
        std::vector<std::size_t> left, right;
        for (std::size_t x : members) (side[x] == 1 ? left : right).push_back(x);
        if (left.size() > 1 || right.size() > 1) {
            std::size_t x = left.size() > 1 ? left[1] : right[1];
            report(Obstruction::Kind::SameSideMerge, x, 0, "gluing identifies two agents of the same graph");
            continue;
        }
        if (left.size() == 1 && right.size() == 1) sigma.emplace_back(ids[left[0]], ids[right[0]]);
    }
    if (!fail.obstructions.empty()) return fail;
    auto glued = glue(g1, g2, AgentMap(std::move(sigma)), fresh_base);
    if (!glued) {
        fail.obstructions.push_back({Obstruction::Kind::PartnerMismatch, Node{}, "?", "union is not a site graph"});
        return fail;
    }
    return *glued;
}

Span pullback(const Cospan& cospan) {
    const Morphism& f1 = cospan.left;
    const Morphism& f2 = cospan.right;
    const SiteGraph& g1 = f1.source();
    const SiteGraph& g2 = f2.source();
    if (!same_signature(g1, g2) || !(f1.target_ptr() == f2.target_ptr() || f1.target() == f2.target()))
        throw Error("pullback of morphisms with different targets");
    std::map<std::pair<AgentId, AgentId>, AgentId> pair_id;
    SiteGraph p(g1.signature_ptr());
    for (const auto& [a1, t1] : g1.agents())
        for (const auto& [a2, t2] : g2.agents())
            if (f1(a1) == f2(a2)) {
                AgentId id = static_cast<AgentId>(pair_id.size());
                pair_id[{a1, a2}] = id;
                p.add_agent(id, t1);
            }
    for (const auto& [pr, id] : pair_id)
        for (Node n : g1.nodes_of(pr.first))
            if (g2.has_node(Node{pr.second, n.site})) p.add_node(Node{id, n.site});
    for (const auto& [pr, id] : pair_id) {
        for (Node n : p.nodes_of(id)) {
            const auto& l1 = g1.link(Node{pr.first, n.site});
            const auto& l2 = g2.link(Node{pr.second, n.site});
            if (!l1 || !l2) continue;
            if (l1->free && l2->free) {
                p.bind_free(n);
                continue;
            }
            if (l1->free || l2->free || l1->partner.site != l2->partner.site) continue;
            auto it = pair_id.find({l1->partner.agent, l2->partner.agent});
            if (it == pair_id.end()) continue;
            Node other{it->second, l1->partner.site};
            if (n < other) p.bind(n, other);
        }
    }
    std::vector<std::pair<AgentId, AgentId>> m1, m2;
    for (const auto& [pr, id] : pair_id) {
        m1.emplace_back(id, pr.first);
        m2.emplace_back(id, pr.second);
    }
    auto pp = share(std::move(p));
    return Span{Morphism(pp, f1.source_ptr(), AgentMap(std::move(m1))),
                Morphism(pp, f2.source_ptr(), AgentMap(std::move(m2)))};
}

std::vector<MultisumMember> multisum(const GraphPtr& g1, const GraphPtr& g2) {
    std::vector<AgentId> left;
    for (const auto& [a, t] : g1->agents()) left.push_back(a);
    std::vector<MultisumMember> out;
    std::vector<std::pair<AgentId, AgentId>> chosen;
    std::set<AgentId> used;
    auto rec = [&](auto&& self, std::size_t k) -> void {
        if (k == left.size()) {
            AgentMap sigma(chosen);
            if (auto c = glue(g1, g2, sigma)) out.push_back({std::move(sigma), std::move(*c)});
            return;
        }
        self(self, k + 1);
        for (const auto& [b, t] : g2->agents()) {
            if (used.count(b) || t != g1->type_of(left[k])) continue;
            chosen.emplace_back(left[k], b);
            used.insert(b);
            self(self, k + 1);
            used.erase(b);
            chosen.pop_back();
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end(),
              [](const MultisumMember& x, const MultisumMember& y) { return x.sigma < y.sigma; });
    return out;
}

PartialMorphism span_to_partial(const Span& s) {
    if (!s.left.is_mono()) throw LeftLegNotMono();
    auto dom = share(image_subgraph(s.left));
    std::vector<std::pair<AgentId, AgentId>> pairs;
    for (const auto& [x, a] : s.left.map().pairs()) pairs.emplace_back(a, s.right(x));
    return PartialMorphism{s.left.target_ptr(), s.right.target_ptr(), dom,
                           Morphism(dom, s.right.target_ptr(), AgentMap(std::move(pairs)))};
}

Span partial_to_span(const PartialMorphism& p) {
    return Span{Morphism::inclusion(p.domain, p.source), p.defined};
}

Span compose_spans(const Span& first, const Span& second) {
    Span pb = pullback(Cospan{first.right, second.left});
    return Span{compose(first.left, pb.left), compose(second.right, pb.right)};
}

PartialMorphism compose(const PartialMorphism& second, const PartialMorphism& first) {
    return span_to_partial(compose_spans(partial_to_span(first), partial_to_span(second)));
}

PartialMorphism partial_identity(const GraphPtr& g) {
    return PartialMorphism{g, g, g, Morphism::identity(g)};
}

}  // namespace storycheck

namespace storycheck {

bool is_pushout_square(const Span& span, const Cospan& cospan) {
    for (const auto& [o, t] : span.apex().agents())
        if (cospan.left(span.left(o)) != cospan.right(span.right(o))) return false;
    auto po = pushout(span);
    const auto* c = std::get_if<Cospan>(&po);
    if (!c) return false;
    std::vector<std::pair<AgentId, AgentId>> u;
    for (const auto& [a, b] : c->left.map().pairs()) u.emplace_back(b, cospan.left(a));
    for (const auto& [a, b] : c->right.map().pairs())
        if (!c->left.map().preimage(b)) u.emplace_back(b, cospan.right(a));
    Morphism cmp(c->left.target_ptr(), cospan.left.target_ptr(), AgentMap(std::move(u)));
    return cmp.is_valid() && cmp.is_iso();
}

}  // namespace storycheck
