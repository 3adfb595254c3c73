#include "storycheck/sitegraph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace storycheck {

TypeId Signature::add(std::string name, SiteIndex site_count) {
    if (name.empty()) throw InputError("agent type name must not be empty");
    if (index_.count(name)) throw InputError("duplicate agent type '" + name + "'");
    TypeId id{static_cast<std::uint32_t>(names_.size())};
    index_.emplace(name, id);
    names_.push_back(std::move(name));
    sites_.push_back(site_count);
    return id;
}

std::optional<TypeId> Signature::find(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

TypeId Signature::at(std::string_view name) const {
    auto t = find(name);
    if (!t) throw InputError("unknown agent type '" + std::string(name) + "'");
    return *t;
}

std::vector<TypeId> Signature::types() const {
    std::vector<TypeId> out;
    for (std::uint32_t i = 0; i < names_.size(); ++i) out.push_back(TypeId{i});
    return out;
}

std::strong_ordering Link::operator<=>(const Link& o) const {
    if (free != o.free) return free ? std::strong_ordering::less : std::strong_ordering::greater;
    if (free) return std::strong_ordering::equal;
    return partner <=> o.partner;
}

std::strong_ordering Edge::operator<=>(const Edge& o) const {
    if (auto c = first <=> o.first; c != 0) return c;
    return second <=> o.second;
}

static Edge normalise(Node a, const Link& l) {
    if (!l.free && l.partner < a) return Edge{l.partner, Link::to(a)};
    return Edge{a, l};
}

SiteGraph::SiteGraph(SignaturePtr signature) : sig_(std::move(signature)) {
    if (!sig_) throw Error("site graph requires a signature");
}

TypeId SiteGraph::type_of(AgentId a) const {
    auto it = agents_.find(a);
    if (it == agents_.end()) throw Error("no agent " + std::to_string(a));
    return it->second;
}

AgentId SiteGraph::next_agent_id() const {
    return agents_.empty() ? 0 : agents_.rbegin()->first + 1;
}

const std::optional<Link>& SiteGraph::link(Node n) const {
    auto it = nodes_.find(n);
    if (it == nodes_.end())
        throw Error("no node (" + std::to_string(n.agent) + "," + std::to_string(n.site) + ")");
    return it->second;
}

bool SiteGraph::has_edge(const Edge& e) const {
    auto it = nodes_.find(e.first);
    return it != nodes_.end() && it->second && *it->second == e.second;
}

std::vector<Edge> SiteGraph::edges() const {
    std::vector<Edge> out;
    for (const auto& [n, l] : nodes_) {
        if (!l) continue;
        if (l->free || n < l->partner) out.push_back(Edge{n, *l});
    }
    return out;
}

std::size_t SiteGraph::edge_count() const {
    std::size_t c = 0;
    for (const auto& [n, l] : nodes_)
        if (l && (l->free || n < l->partner)) ++c;
    return c;
}

std::vector<Node> SiteGraph::nodes_of(AgentId a) const {
    std::vector<Node> out;
    for (auto it = nodes_.lower_bound(Node{a, 0}); it != nodes_.end() && it->first.agent == a; ++it)
        out.push_back(it->first);
    return out;
}

void SiteGraph::add_agent(AgentId a, TypeId t) {
    if (t.value >= sig_->size()) throw Error("unknown type id");
    if (!agents_.emplace(a, t).second) throw Error("duplicate agent " + std::to_string(a));
}

void SiteGraph::add_node(Node n) {
    auto t = type_of(n.agent);
    if (n.site >= sig_->site_count(t))
        throw Error("site " + std::to_string(n.site) + " out of range for " + sig_->name(t));
    nodes_.emplace(n, std::nullopt);
}

void SiteGraph::bind(Node a, Node b) {
    if (a == b) throw Error("edge from a node to itself");
    auto ia = nodes_.find(a);
    auto ib = nodes_.find(b);
    if (ia == nodes_.end() || ib == nodes_.end()) throw Error("edge endpoint is not a node");
    if (ia->second || ib->second) throw Error("node already carries an edge");
    ia->second = Link::to(b);
    ib->second = Link::to(a);
}

void SiteGraph::bind_free(Node n) {
    auto it = nodes_.find(n);
    if (it == nodes_.end()) throw Error("edge endpoint is not a node");
    if (it->second) throw Error("node already carries an edge");
    it->second = Link::to_free();
}

void SiteGraph::add_edge(const Edge& e) {
    if (e.second.free)
        bind_free(e.first);
    else
        bind(e.first, e.second.partner);
}

void SiteGraph::unlink(Node n) {
    auto it = nodes_.find(n);
    if (it == nodes_.end() || !it->second) return;
    if (!it->second->free) nodes_.at(it->second->partner).reset();
    it->second.reset();
}

void SiteGraph::remove_edge(const Edge& e) {
    if (!has_edge(e)) throw Error("edge not present");
    unlink(e.first);
}

void SiteGraph::remove_node(Node n) {
    auto it = nodes_.find(n);
    if (it == nodes_.end()) return;
    if (it->second) throw Error("cannot remove a node that carries an edge");
    nodes_.erase(it);
}

void SiteGraph::remove_agent(AgentId a) {
    for (Node n : nodes_of(a)) remove_node(n);
    agents_.erase(a);
}

bool SiteGraph::operator==(const SiteGraph& o) const {
    return same_signature(*this, o) && agents_ == o.agents_ && nodes_ == o.nodes_;
}

std::string SiteGraph::to_string() const {
    std::ostringstream os;
    bool first_agent = true;
    for (const auto& [a, t] : agents_) {
        if (!first_agent) os << ", ";
        first_agent = false;
        os << sig_->name(t) << "#" << a << "(";
        bool first_site = true;
        for (Node n : nodes_of(a)) {
            if (!first_site) os << ",";
            first_site = false;
            os << n.site;
            const auto& l = nodes_.at(n);
            if (!l) continue;
            if (l->free)
                os << "[.]";
            else
                os << "[#" << l->partner.agent << "." << l->partner.site << "]";
        }
        os << ")";
    }
    return os.str();
}

bool same_signature(const SiteGraph& a, const SiteGraph& b) {
    return a.signature_ptr() == b.signature_ptr();
}

std::variant<SiteGraph, std::vector<GraphViolation>> validate_site_graph(const RawGraph& raw,
                                                                         SignaturePtr signature) {
    using K = GraphViolation::Kind;
    std::vector<GraphViolation> bad;
    auto node_name = [](Node n) {
        return "(" + std::to_string(n.agent) + "," + std::to_string(n.site) + ")";
    };
    SiteGraph g(signature);
    for (const auto& a : raw.agents) {
        auto t = signature->find(a.type);
        if (!t) {
            bad.push_back({K::UnknownType, "agent " + std::to_string(a.id) + " has unknown type '" + a.type + "'"});
            continue;
        }
        if (g.has_agent(a.id)) {
            bad.push_back({K::DuplicateAgent, "agent " + std::to_string(a.id) + " declared twice"});
            continue;
        }
        g.add_agent(a.id, *t);
    }
    auto node_ok = [&](Node n) {
        if (!g.has_agent(n.agent)) {
            bad.push_back({K::DanglingEdgeEndpoint, "node " + node_name(n) + " refers to a missing agent"});
            return false;
        }
        if (n.site >= signature->site_count(g.type_of(n.agent))) {
            bad.push_back({K::SiteIndexOutOfRange,
                           "site " + std::to_string(n.site) + " out of range for agent " +
                               std::to_string(n.agent) + " of type " + g.type_name(n.agent)});
            return false;
        }
        return true;
    };
    for (Node n : raw.nodes)
        if (node_ok(n)) g.add_node(n);
    for (const auto& e : raw.edges) {
        // Edge endpoints are nodes even when not listed separately.
        bool ok = true;
        for (Node n : {e.from, e.to.value_or(e.from)}) {
            if (g.has_node(n)) continue;
            if (node_ok(n))
                g.add_node(n);
            else
                ok = false;
        }
        if (!ok) continue;
        if (e.to && *e.to == e.from) {
            bad.push_back({K::SelfLoop, "edge joins " + node_name(e.from) + " to itself"});
            continue;
        }
        Link want = e.to ? Link::to(*e.to) : Link::to_free();
        const auto& have = g.link(e.from);
        if (have && *have == want) continue;  // repeated listing of the same edge
        if (have || (e.to && g.link(*e.to))) {
            bad.push_back({K::ConflictingEdges, "node " + node_name(have ? e.from : *e.to) + " carries two edges"});
            continue;
        }
        g.add_edge(Edge{e.from, want});
    }
    if (!bad.empty()) return bad;
    return g;
}

SiteGraph make_site_graph(const RawGraph& raw, SignaturePtr signature) {
    auto r = validate_site_graph(raw, std::move(signature));
    if (auto* bad = std::get_if<std::vector<GraphViolation>>(&r)) {
        std::vector<std::string> msgs;
        for (const auto& v : *bad) msgs.push_back(v.message);
        throw InputError("invalid site graph: " + msgs.front(), msgs);
    }
    return std::get<SiteGraph>(std::move(r));
}

AgentMap::AgentMap(std::vector<std::pair<AgentId, AgentId>> pairs) : pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end());
    for (std::size_t i = 1; i < pairs_.size(); ++i)
        if (pairs_[i].first == pairs_[i - 1].first) throw Error("agent map assigns two images");
}

void AgentMap::set(AgentId from, AgentId to) {
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::make_pair(from, AgentId{0}));
    if (it != pairs_.end() && it->first == from)
        it->second = to;
    else
        pairs_.insert(it, {from, to});
}

std::optional<AgentId> AgentMap::find(AgentId from) const {
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::make_pair(from, AgentId{0}));
    if (it != pairs_.end() && it->first == from) return it->second;
    return std::nullopt;
}

AgentId AgentMap::at(AgentId from) const {
    auto r = find(from);
    if (!r) throw Error("agent " + std::to_string(from) + " outside morphism domain");
    return *r;
}

std::optional<AgentId> AgentMap::preimage(AgentId to) const {
    for (const auto& [a, b] : pairs_)
        if (b == to) return a;
    return std::nullopt;
}

bool AgentMap::injective() const {
    std::set<AgentId> seen;
    for (const auto& p : pairs_)
        if (!seen.insert(p.second).second) return false;
    return true;
}

Morphism::Morphism(GraphPtr source, GraphPtr target, AgentMap map)
    : source_(std::move(source)), target_(std::move(target)), map_(std::move(map)) {
    if (!source_ || !target_) throw Error("morphism requires source and target");
}

Morphism Morphism::identity(const GraphPtr& g) { return inclusion(g, g); }

Morphism Morphism::inclusion(const GraphPtr& sub, const GraphPtr& super) {
    std::vector<std::pair<AgentId, AgentId>> pairs;
    for (const auto& [a, t] : sub->agents()) pairs.emplace_back(a, a);
    return Morphism(sub, super, AgentMap(std::move(pairs)));
}

Edge Morphism::operator()(const Edge& e) const { return normalise((*this)(e.first), (*this)(e.second)); }

std::vector<std::string> Morphism::violations() const {
    std::vector<std::string> out;
    const auto& s = *source_;
    const auto& t = *target_;
    if (!same_signature(s, t)) out.push_back("source and target have different signatures");
    if (map_.size() != s.agent_count()) out.push_back("agent map is not total on the source");
    for (const auto& [a, b] : map_.pairs()) {
        if (!s.has_agent(a)) {
            out.push_back("agent " + std::to_string(a) + " is not in the source");
            continue;
        }
        if (!t.has_agent(b)) {
            out.push_back("image " + std::to_string(b) + " is not in the target");
            continue;
        }
        if (s.type_of(a) != t.type_of(b)) out.push_back("agent " + std::to_string(a) + " changes type");
    }
    if (!out.empty()) return out;
    for (const auto& [n, l] : s.nodes()) {
        Node fn = (*this)(n);
        if (!t.has_node(fn)) {
            out.push_back("node of agent " + std::to_string(n.agent) + " site " + std::to_string(n.site) +
                          " is not preserved");
            continue;
        }
        if (l && t.link(fn) != std::optional<Link>((*this)(*l)))
            out.push_back("edge at agent " + std::to_string(n.agent) + " site " + std::to_string(n.site) +
                          " is not preserved");
    }
    return out;
}

bool Morphism::is_mono() const { return map_.injective(); }

bool Morphism::is_iso() const {
    return is_mono() && source_->agent_count() == target_->agent_count() &&
           source_->nodes().size() == target_->nodes().size() &&
           source_->edge_count() == target_->edge_count();
}

Morphism Morphism::inverse() const {
    if (!is_iso()) throw Error("inverse of a non-isomorphism");
    std::vector<std::pair<AgentId, AgentId>> pairs;
    for (const auto& [a, b] : map_.pairs()) pairs.emplace_back(b, a);
    return Morphism(target_, source_, AgentMap(std::move(pairs)));
}

Morphism compose(const Morphism& g, const Morphism& f) {
    std::vector<std::pair<AgentId, AgentId>> pairs;
    for (const auto& [a, b] : f.map().pairs()) pairs.emplace_back(a, g.map().at(b));
    return Morphism(f.source_ptr(), g.target_ptr(), AgentMap(std::move(pairs)));
}

namespace {

struct Search {
    const SiteGraph& g;
    const SiteGraph& h;
    bool injective;
    std::vector<AgentId> order;                 // source agents ascending
    std::map<AgentId, AgentId> assigned;
    std::set<AgentId> used;
    std::vector<std::vector<std::pair<AgentId, AgentId>>> out;

    bool compatible(AgentId a, AgentId v) const {
        if (g.type_of(a) != h.type_of(v)) return false;
        if (injective && used.count(v)) return false;
        for (Node n : g.nodes_of(a)) {
            Node hn{v, n.site};
            if (!h.has_node(hn)) return false;
            const auto& l = g.link(n);
            if (!l) continue;
            const auto& hl = h.link(hn);
            if (!hl) return false;
            if (l->free) {
                if (!hl->free) return false;
                continue;
            }
            if (hl->free || hl->partner.site != l->partner.site) return false;
            AgentId b = l->partner.agent;
            if (b == a) {
                if (hl->partner.agent != v) return false;
                continue;
            }
            auto it = assigned.find(b);
            if (it != assigned.end() && it->second != hl->partner.agent) return false;
        }
        return true;
    }

    // Image forced by an edge to an agent already placed, if any.
    std::optional<AgentId> forced(AgentId a) const {
        for (Node n : g.nodes_of(a)) {
            const auto& l = g.link(n);
            if (!l || l->free) continue;
            auto it = assigned.find(l->partner.agent);
            if (it == assigned.end()) continue;
            const auto& hl = h.link(Node{it->second, l->partner.site});
            if (!hl || hl->free) return AgentId(-1);
            return hl->partner.agent;
        }
        return std::nullopt;
    }

    void run(std::size_t k) {
        if (k == order.size()) {
            out.emplace_back(assigned.begin(), assigned.end());
            return;
        }
        AgentId a = order[k];
        auto try_one = [&](AgentId v) {
            if (!h.has_agent(v) || !compatible(a, v)) return;
            assigned[a] = v;
            used.insert(v);
            run(k + 1);
            used.erase(v);
            assigned.erase(a);
        };
        if (auto f = forced(a)) {
            try_one(*f);
            return;
        }
        for (const auto& [v, t] : h.agents()) try_one(v);
    }
};

std::vector<Morphism> enumerate(const GraphPtr& g, const GraphPtr& h, bool injective) {
    if (!same_signature(*g, *h)) throw Error("graphs have different signatures");
    Search s{*g, *h, injective, {}, {}, {}, {}};
    for (const auto& [a, t] : g->agents()) s.order.push_back(a);
    s.run(0);
    std::vector<Morphism> result;
    result.reserve(s.out.size());
    for (auto& pairs : s.out) result.emplace_back(g, h, AgentMap(std::move(pairs)));
    return result;
}

}  // namespace

std::vector<Morphism> enumerate_monos(const GraphPtr& g, const GraphPtr& h) { return enumerate(g, h, true); }

std::vector<Morphism> enumerate_morphisms(const GraphPtr& g, const GraphPtr& h) {
    return enumerate(g, h, false);
}

SiteGraph image_subgraph(const Morphism& f) {
    SiteGraph out(f.target().signature_ptr());
    for (const auto& [a, b] : f.map().pairs())
        if (!out.has_agent(b)) out.add_agent(b, f.target().type_of(b));
    for (const auto& [n, l] : f.source().nodes()) out.add_node(f(n));
    for (const auto& e : f.source().edges()) {
        Edge fe = f(e);
        if (!out.has_edge(fe)) out.add_edge(fe);
    }
    return out;
}

}  // namespace storycheck
