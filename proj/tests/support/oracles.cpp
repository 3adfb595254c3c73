#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace storycheck::testing {

namespace {

std::optional<AgentId> lookup(const AgentMap& m, AgentId a) {
    for (const auto& [x, y] : m.pairs())
        if (x == a) return y;
    return std::nullopt;
}

Node map_node(const AgentMap& m, Node n) { return Node{*lookup(m, n.agent), n.site}; }

}  // namespace

bool oracle_is_hom(const SiteGraph& g, const SiteGraph& h, const AgentMap& m) {
    for (const auto& [a, t] : g.agents()) {
        auto b = lookup(m, a);
        if (!b || !h.has_agent(*b) || h.type_of(*b) != t) return false;
    }
    if (m.size() != g.agent_count()) return false;
    for (const auto& [n, l] : g.nodes()) {
        Node hn = map_node(m, n);
        auto it = h.nodes().find(hn);
        if (it == h.nodes().end()) return false;
        if (!l) continue;
        if (!it->second) return false;
        if (l->free != it->second->free) return false;
        if (!l->free && !(map_node(m, l->partner) == it->second->partner)) return false;
    }
    return true;
}

bool oracle_injective(const AgentMap& m) {
    std::set<AgentId> seen;
    for (const auto& [a, b] : m.pairs())
        if (!seen.insert(b).second) return false;
    return true;
}

std::vector<AgentMap> oracle_agent_maps(const SiteGraph& g, const SiteGraph& h, bool injective_only) {
    std::vector<std::pair<AgentId, TypeId>> src(g.agents().begin(), g.agents().end());
    std::vector<AgentMap> out;
    std::vector<std::pair<AgentId, AgentId>> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == src.size()) {
            AgentMap m(cur);
            if (!injective_only || oracle_injective(m)) out.push_back(m);
            return;
        }
        for (const auto& [b, t] : h.agents()) {
            if (t != src[k].second) continue;
            cur.emplace_back(src[k].first, b);
            rec(k + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

std::vector<AgentMap> oracle_homs(const SiteGraph& g, const SiteGraph& h, bool mono_only) {
    std::vector<AgentMap> out;
    for (auto& m : oracle_agent_maps(g, h, mono_only))
        if (oracle_is_hom(g, h, m)) out.push_back(std::move(m));
    return out;
}

bool oracle_is_iso(const SiteGraph& g, const SiteGraph& h, const AgentMap& m) {
    if (g.agent_count() != h.agent_count() || g.nodes().size() != h.nodes().size()) return false;
    if (!oracle_injective(m) || !oracle_is_hom(g, h, m)) return false;
    std::size_t ge = 0, he = 0;
    for (const auto& [n, l] : g.nodes()) ge += l.has_value();
    for (const auto& [n, l] : h.nodes()) he += l.has_value();
    return ge == he;
}

bool oracle_isomorphic(const SiteGraph& g, const SiteGraph& h) {
    if (g.agent_count() != h.agent_count() || g.nodes().size() != h.nodes().size()) return false;
    for (const auto& m : oracle_agent_maps(g, h, true))
        if (oracle_is_iso(g, h, m)) return true;
    return false;
}

std::vector<SiteGraph> graph_family(const SignaturePtr& sig, std::size_t max_agents) {
    std::vector<SiteGraph> out;
    auto types = sig->types();
    std::vector<TypeId> chosen;
    auto emit_all = [&]() {
        std::vector<Node> nodes;
        for (std::size_t a = 0; a < chosen.size(); ++a)
            for (SiteIndex i = 0; i < sig->site_count(chosen[a]); ++i) nodes.push_back(Node{AgentId(a), i});
        // 0 absent, 1 unconstrained, 2 free, 3 bound
        std::vector<int> state(nodes.size(), -1);
        std::vector<int> partner(nodes.size(), -1);
        std::function<void(std::size_t)> rec = [&](std::size_t k) {
            if (k == nodes.size()) {
                SiteGraph g(sig);
                for (std::size_t a = 0; a < chosen.size(); ++a) g.add_agent(AgentId(a), chosen[a]);
                for (std::size_t x = 0; x < nodes.size(); ++x)
                    if (state[x] > 0) g.add_node(nodes[x]);
                for (std::size_t x = 0; x < nodes.size(); ++x) {
                    if (state[x] == 2) g.bind_free(nodes[x]);
                    if (state[x] == 3 && partner[x] > int(x)) g.bind(nodes[x], nodes[partner[x]]);
                }
                bool dup = false;
                for (const auto& o : out)
                    if (oracle_isomorphic(o, g)) {
                        dup = true;
                        break;
                    }
                if (!dup) out.push_back(std::move(g));
                return;
            }
            if (state[k] != -1) {
                rec(k + 1);
                return;
            }
            for (int s = 0; s < 3; ++s) {
                state[k] = s;
                rec(k + 1);
            }
            for (std::size_t j = k + 1; j < nodes.size(); ++j) {
                if (state[j] != -1) continue;
                state[k] = state[j] = 3;
                partner[k] = int(j);
                partner[j] = int(k);
                rec(k + 1);
                state[j] = -1;
                partner[k] = partner[j] = -1;
            }
            state[k] = -1;
        };
        rec(0);
    };
    std::function<void(std::size_t)> choose = [&](std::size_t from) {
        emit_all();
        if (chosen.size() == max_agents) return;
        for (std::size_t t = from; t < types.size(); ++t) {
            chosen.push_back(types[t]);
            choose(t);
            chosen.pop_back();
        }
    };
    choose(0);
    return out;
}

std::string agent_key(AgentId a) { return "a" + std::to_string(a); }
std::string node_key(Node n) { return "n" + std::to_string(n.agent) + "." + std::to_string(n.site); }
std::string edge_key(const Edge& e) {
    std::string x = node_key(e.first);
    if (e.second.free) return "e" + x + "-free";
    std::string y = node_key(e.second.partner);
    if (y < x) std::swap(x, y);
    return "e" + x + "-" + y;
}

Elements elements(const SiteGraph& g) {
    Elements out;
    for (const auto& [a, t] : g.agents()) out.insert(agent_key(a));
    for (const auto& [n, l] : g.nodes()) {
        out.insert(node_key(n));
        if (l) out.insert(edge_key(Edge{n, *l}));
    }
    return out;
}

Elements image(const SiteGraph& source, const AgentMap& m) {
    Elements out;
    for (const auto& [a, t] : source.agents()) out.insert(agent_key(*lookup(m, a)));
    for (const auto& [n, l] : source.nodes()) {
        Node x = map_node(m, n);
        out.insert(node_key(x));
        if (l) out.insert(edge_key(Edge{x, l->free ? *l : Link::to(map_node(m, l->partner))}));
    }
    return out;
}

std::vector<AgentMap> oracle_partial_injections(const SiteGraph& g1, const SiteGraph& g2) {
    std::vector<std::pair<AgentId, TypeId>> src(g1.agents().begin(), g1.agents().end());
    std::vector<AgentMap> out;
    std::vector<std::pair<AgentId, AgentId>> cur;
    std::set<AgentId> taken;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == src.size()) {
            out.emplace_back(cur);
            return;
        }
        rec(k + 1);
        for (const auto& [b, t] : g2.agents()) {
            if (t != src[k].second || taken.count(b)) continue;
            taken.insert(b);
            cur.emplace_back(src[k].first, b);
            rec(k + 1);
            cur.pop_back();
            taken.erase(b);
        }
    };
    rec(0);
    return out;
}

namespace {

// G2 agent identifier in the union: its sigma preimage, else offset past G1.
AgentId union_id(const SiteGraph& g1, const AgentMap& sigma, AgentId b) {
    for (const auto& [x, y] : sigma.pairs())
        if (y == b) return x;
    (void)g1;
    return 100000 + b;
}

}  // namespace

bool oracle_union_is_site_graph(const SiteGraph& g1, const SiteGraph& g2, const AgentMap& sigma) {
    std::map<Node, std::set<std::string>> links;
    auto name = [](const std::optional<Node>& p) {
        return p ? std::to_string(p->agent) + "." + std::to_string(p->site) : std::string("free");
    };
    for (const auto& [n, l] : g1.nodes()) {
        auto& s = links[n];
        if (l) s.insert(name(l->free ? std::nullopt : std::optional<Node>(l->partner)));
    }
    for (const auto& [n, l] : g2.nodes()) {
        Node u{union_id(g1, sigma, n.agent), n.site};
        auto& s = links[u];
        if (l) s.insert(name(l->free ? std::nullopt : std::optional<Node>(Node{union_id(g1, sigma, l->partner.agent), l->partner.site})));
    }
    for (const auto& [n, s] : links)
        if (s.size() > 1) return false;
    return true;
}

Elements oracle_overlap(const SiteGraph& g1, const SiteGraph& g2, const AgentMap& sigma) {
    Elements a = elements(g1), out;
    Elements b;
    for (const auto& [x, t] : g2.agents()) b.insert(agent_key(union_id(g1, sigma, x)));
    for (const auto& [n, l] : g2.nodes()) {
        Node u{union_id(g1, sigma, n.agent), n.site};
        b.insert(node_key(u));
        if (l) b.insert(edge_key(Edge{u, l->free ? *l : Link::to(Node{union_id(g1, sigma, l->partner.agent), l->partner.site})}));
    }
    for (const auto& x : a)
        if (b.count(x)) out.insert(x);
    return out;
}

std::size_t oracle_influence_count(const Rule& r1, const Rule& r2, bool positive) {
    const SiteGraph& g1 = positive ? *r1.right : *r1.left;
    const Morphism& leg = positive ? r1.q : r1.p;
    Elements changed;
    Elements kept = image(*r1.kept, leg.map());
    for (const auto& x : elements(g1))
        if (!kept.count(x)) changed.insert(x);
    std::size_t count = 0;
    for (const auto& sigma : oracle_partial_injections(g1, *r2.left)) {
        if (sigma.size() == 0 || !oracle_union_is_site_graph(g1, *r2.left, sigma)) continue;
        Elements o = oracle_overlap(g1, *r2.left, sigma);
        bool hit = false;
        for (const auto& x : o) hit = hit || changed.count(x);
        count += hit;
    }
    return count;
}

AgentMap oracle_compose(const AgentMap& h, const AgentMap& g) {
    std::vector<std::pair<AgentId, AgentId>> out;
    for (const auto& [a, b] : g.pairs()) out.emplace_back(a, *lookup(h, b));
    return AgentMap(out);
}

}  // namespace storycheck::testing
