#include "storycheck/canonical.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace storycheck {

namespace {

// Per-site state code: 0 no edge, 1 free, 2 bound.
int state_code(const std::optional<Link>& l) {
    if (!l) return 0;
    return l->free ? 1 : 2;
}

struct Component {
    const SiteGraph& g;
    std::vector<AgentId> agents;          // local index -> agent
    std::map<AgentId, int> local;
    std::vector<std::string> invariant;   // labelling-independent agent description

    std::vector<int> ranks(const std::vector<std::string>& keys) const {
        std::vector<std::string> uniq(keys);
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        std::vector<int> out;
        for (const auto& k : keys)
            out.push_back(static_cast<int>(std::lower_bound(uniq.begin(), uniq.end(), k) - uniq.begin()));
        return out;
    }

    static std::size_t classes(const std::vector<int>& c) {
        return std::set<int>(c.begin(), c.end()).size();
    }

    std::vector<int> refine(std::vector<int> colours) const {
        for (;;) {
            std::vector<std::string> keys;
            for (std::size_t i = 0; i < agents.size(); ++i) {
                std::vector<std::string> around;
                for (Node n : g.nodes_of(agents[i])) {
                    const auto& l = g.link(n);
                    if (!l || l->free) continue;
                    around.push_back(std::to_string(n.site) + ":" + std::to_string(l->partner.site) + ":" +
                                     std::to_string(colours[local.at(l->partner.agent)]));
                }
                std::sort(around.begin(), around.end());
                std::string k = std::to_string(colours[i]) + "|";
                for (const auto& s : around) k += s + ";";
                keys.push_back(std::move(k));
            }
            auto next = ranks(keys);
            if (classes(next) == classes(colours)) return next;
            colours = std::move(next);
        }
    }

    std::string encode(const std::vector<int>& position) const {
        std::vector<int> by_pos(agents.size());
        for (std::size_t i = 0; i < agents.size(); ++i) by_pos[position[i]] = static_cast<int>(i);
        std::string s;
        for (int i : by_pos) {
            s += invariant[i] + "{";
            for (Node n : g.nodes_of(agents[i])) {
                const auto& l = g.link(n);
                if (l && !l->free)
                    s += std::to_string(n.site) + ">" + std::to_string(position[local.at(l->partner.agent)]) +
                         "." + std::to_string(l->partner.site) + ",";
            }
            s += "}";
        }
        return s;
    }

    void search(const std::vector<int>& colours, std::string& best, std::vector<int>& best_pos) const {
        std::map<int, std::vector<int>> cells;
        for (std::size_t i = 0; i < colours.size(); ++i) cells[colours[i]].push_back(static_cast<int>(i));
        const std::vector<int>* target = nullptr;
        for (const auto& [c, members] : cells)
            if (members.size() > 1) {
                target = &members;
                break;
            }
        if (!target) {
            std::string enc = encode(colours);
            if (best_pos.empty() || enc < best) {
                best = std::move(enc);
                best_pos = colours;
            }
            return;
        }
        for (int v : *target) {
            std::vector<int> c(colours.size());
            for (std::size_t i = 0; i < colours.size(); ++i)
                c[i] = colours[i] * 2 + (static_cast<int>(i) == v ? 0 : 1);
            search(refine(ranks_of(c)), best, best_pos);
        }
    }

    std::vector<int> ranks_of(const std::vector<int>& c) const {
        std::vector<std::string> keys;
        for (int x : c) {
            std::string k = std::to_string(x);
            keys.push_back(std::string(12 - std::min<std::size_t>(12, k.size()), '0') + k);
        }
        return ranks(keys);
    }
};

}  // namespace

CanonicalForm iso_canonical(const SiteGraph& g, const std::map<AgentId, int>& colours) {
    // Connected components through bound edges.
    std::map<AgentId, AgentId> parent;
    for (const auto& [a, t] : g.agents()) parent[a] = a;
    std::function<AgentId(AgentId)> find = [&](AgentId a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (const auto& e : g.edges())
        if (!e.second.free) parent[find(e.first.agent)] = find(e.second.partner.agent);
    std::map<AgentId, std::vector<AgentId>> groups;
    for (const auto& [a, t] : g.agents()) groups[find(a)].push_back(a);

    std::vector<std::pair<std::string, std::vector<AgentId>>> parts;
    for (auto& [root, members] : groups) {
        Component c{g, members, {}, {}};
        for (std::size_t i = 0; i < members.size(); ++i) {
            c.local[members[i]] = static_cast<int>(i);
            auto it = colours.find(members[i]);
            std::string inv = "c" + std::to_string(it == colours.end() ? 0 : it->second) + ":" +
                              g.type_name(members[i]) + "(";
            for (Node n : g.nodes_of(members[i])) {
                inv += std::to_string(n.site) + "=" + std::to_string(state_code(g.link(n)));
                const auto& l = g.link(n);
                if (l && !l->free) inv += "/" + std::to_string(l->partner.site);
                inv += ",";
            }
            inv += ")";
            c.invariant.push_back(std::move(inv));
        }
        std::vector<int> start = c.refine(c.ranks(c.invariant));
        std::string best;
        std::vector<int> best_pos;
        c.search(start, best, best_pos);
        std::vector<AgentId> order(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) order[best_pos[i]] = members[i];
        parts.emplace_back(std::move(best), std::move(order));
    }
    std::sort(parts.begin(), parts.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    CanonicalForm out{SiteGraph(g.signature_ptr()), {}, {}};
    for (const auto& [enc, order] : parts) {
        out.certificate += "[" + enc + "]";
        out.order.insert(out.order.end(), order.begin(), order.end());
    }
    std::map<AgentId, AgentId> rename;
    for (std::size_t k = 0; k < out.order.size(); ++k) {
        rename[out.order[k]] = static_cast<AgentId>(k);
        out.graph.add_agent(static_cast<AgentId>(k), g.type_of(out.order[k]));
    }
    for (const auto& [n, l] : g.nodes()) out.graph.add_node(Node{rename.at(n.agent), n.site});
    for (const auto& e : g.edges()) {
        Node a{rename.at(e.first.agent), e.first.site};
        if (e.second.free)
            out.graph.bind_free(a);
        else
            out.graph.bind(a, Node{rename.at(e.second.partner.agent), e.second.partner.site});
    }
    return out;
}

bool isomorphic(const SiteGraph& a, const SiteGraph& b) {
    if (!same_signature(a, b) || a.agent_count() != b.agent_count() || a.nodes().size() != b.nodes().size() ||
        a.edge_count() != b.edge_count())
        return false;
    return iso_canonical(a).certificate == iso_canonical(b).certificate;
}

std::string pointed_certificate(const Morphism& f) {
    std::map<AgentId, int> colours;
    int k = 1;
    for (const auto& [a, b] : f.map().pairs()) colours[b] = k++;
    // A non-injective f gives one colour per image; record the fibres as well.
    std::string fibres;
    for (const auto& [a, b] : f.map().pairs()) fibres += std::to_string(colours.at(b)) + ",";
    return iso_canonical(f.target(), colours).certificate + "#" + fibres;
}

}  // namespace storycheck
