#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "storycheck/errors.hpp"

namespace storycheck {

using AgentId = std::uint32_t;
using SiteIndex = std::uint32_t;

struct TypeId {
    std::uint32_t value = 0;
    auto operator<=>(const TypeId&) const = default;
};

// Agent types and their site counts. Sites of a type are 0..site_count-1.
class Signature {
public:
    TypeId add(std::string name, SiteIndex site_count);
    std::optional<TypeId> find(std::string_view name) const;
    TypeId at(std::string_view name) const;
    const std::string& name(TypeId t) const { return names_.at(t.value); }
    SiteIndex site_count(TypeId t) const { return sites_.at(t.value); }
    std::size_t size() const { return names_.size(); }
    std::vector<TypeId> types() const;

private:
    std::vector<std::string> names_;
    std::vector<SiteIndex> sites_;
    std::map<std::string, TypeId, std::less<>> index_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

struct Node {
    AgentId agent = 0;
    SiteIndex site = 0;
    auto operator<=>(const Node&) const = default;
};

// Target of an edge leaving a node: the FREE marker or another node.
struct Link {
    bool free = true;
    Node partner{};

    static Link to_free() { return Link{}; }
    static Link to(Node n) { return Link{false, n}; }
    bool operator==(const Link& o) const { return free == o.free && (free || partner == o.partner); }
    std::strong_ordering operator<=>(const Link& o) const;
};

// Normalised edge: `first` is the smaller endpoint when both are nodes.
struct Edge {
    Node first;
    Link second;
    bool operator==(const Edge&) const = default;
    std::strong_ordering operator<=>(const Edge& o) const;
};

// A site graph. Each present node carries at most one link, which makes the
// edge set conflict-free; edges are symmetric and never join a node to itself.
class SiteGraph {
public:
    explicit SiteGraph(SignaturePtr signature);

    const SignaturePtr& signature_ptr() const { return sig_; }
    const Signature& signature() const { return *sig_; }

    const std::map<AgentId, TypeId>& agents() const { return agents_; }
    bool has_agent(AgentId a) const { return agents_.count(a) != 0; }
    TypeId type_of(AgentId a) const;
    const std::string& type_name(AgentId a) const { return sig_->name(type_of(a)); }
    std::size_t agent_count() const { return agents_.size(); }
    AgentId next_agent_id() const;

    const std::map<Node, std::optional<Link>>& nodes() const { return nodes_; }
    bool has_node(Node n) const { return nodes_.count(n) != 0; }
    // Link at a present node; nullopt when the node has no edge.
    const std::optional<Link>& link(Node n) const;
    bool has_edge(const Edge& e) const;
    std::vector<Edge> edges() const;
    std::size_t edge_count() const;
    std::vector<Node> nodes_of(AgentId a) const;

    void add_agent(AgentId a, TypeId t);
    void add_node(Node n);
    void bind(Node a, Node b);
    void bind_free(Node n);
    void add_edge(const Edge& e);
    void unlink(Node n);
    void remove_edge(const Edge& e);
    void remove_node(Node n);
    // Drops the agent with its nodes; every edge touching it must be gone already.
    void remove_agent(AgentId a);

    // Literal equality: same signature, identifiers, nodes and edges.
    bool operator==(const SiteGraph& o) const;

    std::string to_string() const;

private:
    SignaturePtr sig_;
    std::map<AgentId, TypeId> agents_;
    std::map<Node, std::optional<Link>> nodes_;
};

using GraphPtr = std::shared_ptr<const SiteGraph>;

inline GraphPtr share(SiteGraph g) { return std::make_shared<const SiteGraph>(std::move(g)); }

bool same_signature(const SiteGraph& a, const SiteGraph& b);

// Unchecked description of a graph, as read from a file.
struct RawGraph {
    struct Agent {
        AgentId id;
        std::string type;
    };
    struct RawEdge {
        Node from;
        std::optional<Node> to;  // nullopt: bound to FREE
    };
    std::vector<Agent> agents;
    std::vector<Node> nodes;
    std::vector<RawEdge> edges;
};

struct GraphViolation {
    enum class Kind {
        UnknownType,
        DuplicateAgent,
        SiteIndexOutOfRange,
        DanglingEdgeEndpoint,
        ConflictingEdges,
        SelfLoop
    };
    Kind kind;
    std::string message;
};

std::variant<SiteGraph, std::vector<GraphViolation>> validate_site_graph(const RawGraph& raw,
                                                                         SignaturePtr signature);
// Throws InputError carrying every violation.
SiteGraph make_site_graph(const RawGraph& raw, SignaturePtr signature);

// Sorted flat map of agent identifiers.
class AgentMap {
public:
    AgentMap() = default;
    explicit AgentMap(std::vector<std::pair<AgentId, AgentId>> pairs);

    void set(AgentId from, AgentId to);
    std::optional<AgentId> find(AgentId from) const;
    AgentId at(AgentId from) const;
    bool contains(AgentId from) const { return find(from).has_value(); }
    std::optional<AgentId> preimage(AgentId to) const;
    const std::vector<std::pair<AgentId, AgentId>>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }
    bool injective() const;
    bool operator==(const AgentMap&) const = default;
    auto operator<=>(const AgentMap&) const = default;

private:
    std::vector<std::pair<AgentId, AgentId>> pairs_;
};

// Site-graph morphism, determined by its agent map.
class Morphism {
public:
    Morphism(GraphPtr source, GraphPtr target, AgentMap map);

    static Morphism identity(const GraphPtr& g);
    // Identity on identifiers from a subgraph into a graph containing it.
    static Morphism inclusion(const GraphPtr& sub, const GraphPtr& super);

    const SiteGraph& source() const { return *source_; }
    const SiteGraph& target() const { return *target_; }
    const GraphPtr& source_ptr() const { return source_; }
    const GraphPtr& target_ptr() const { return target_; }
    const AgentMap& map() const { return map_; }

    AgentId operator()(AgentId a) const { return map_.at(a); }
    Node operator()(Node n) const { return Node{map_.at(n.agent), n.site}; }
    Link operator()(const Link& l) const { return l.free ? l : Link::to((*this)(l.partner)); }
    Edge operator()(const Edge& e) const;

    // Empty when the agent map is a well-formed morphism.
    std::vector<std::string> violations() const;
    bool is_valid() const { return violations().empty(); }
    bool is_mono() const;
    // Mono that is bijective on agents, nodes and edges.
    bool is_iso() const;
    // Inverse of an iso.
    Morphism inverse() const;

private:
    GraphPtr source_;
    GraphPtr target_;
    AgentMap map_;
};

// g after f.
Morphism compose(const Morphism& g, const Morphism& f);

struct Span {
    Morphism left;
    Morphism right;
    const SiteGraph& apex() const { return left.source(); }
};

struct Cospan {
    Morphism left;
    Morphism right;
    const SiteGraph& apex() const { return left.target(); }
};

// All monos G -> H ordered by the image tuple of G's agents in ascending id order.
std::vector<Morphism> enumerate_monos(const GraphPtr& g, const GraphPtr& h);
// All morphisms G -> H in the same order.
std::vector<Morphism> enumerate_morphisms(const GraphPtr& g, const GraphPtr& h);

// Image of a morphism as a subgraph of its target.
SiteGraph image_subgraph(const Morphism& f);

}  // namespace storycheck
