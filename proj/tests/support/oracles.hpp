#pragma once

#include <set>
#include <string>
#include <vector>

#include "storycheck/rewrite.hpp"

namespace storycheck::testing {

// Brute-force reference implementations. None of them calls into the
// morphism, pushout or canonical-form code of the library.

bool oracle_is_hom(const SiteGraph& g, const SiteGraph& h, const AgentMap& m);
bool oracle_injective(const AgentMap& m);

// Every type-preserving agent map G -> H, homomorphic or not.
std::vector<AgentMap> oracle_agent_maps(const SiteGraph& g, const SiteGraph& h, bool injective_only);
std::vector<AgentMap> oracle_homs(const SiteGraph& g, const SiteGraph& h, bool mono_only);

// Isomorphism by trying every bijection.
bool oracle_isomorphic(const SiteGraph& g, const SiteGraph& h);
// Whether m is an isomorphism (bijective on agents, nodes and edges).
bool oracle_is_iso(const SiteGraph& g, const SiteGraph& h, const AgentMap& m);

// All graphs with at most `max_agents` agents up to isomorphism.
std::vector<SiteGraph> graph_family(const SignaturePtr& sig, std::size_t max_agents);

// Elements of a graph as strings, for set-based reasoning.
using Elements = std::set<std::string>;
std::string agent_key(AgentId a);
std::string node_key(Node n);
std::string edge_key(const Edge& e);
Elements elements(const SiteGraph& g);
// Image of every element of the source under m.
Elements image(const SiteGraph& source, const AgentMap& m);

// Every partial injective type-preserving identification G1 -> G2.
std::vector<AgentMap> oracle_partial_injections(const SiteGraph& g1, const SiteGraph& g2);
// Whether gluing G1 and G2 along sigma leaves every node with at most one link.
bool oracle_union_is_site_graph(const SiteGraph& g1, const SiteGraph& g2, const AgentMap& sigma);
// Elements shared by G1 and G2 under sigma, named in G1.
Elements oracle_overlap(const SiteGraph& g1, const SiteGraph& g2, const AgentMap& sigma);
// Number of identifications of R1 (positive) or L1 (negative) with L2 whose
// union is a site graph and whose overlap holds something r1 creates or consumes.
std::size_t oracle_influence_count(const Rule& r1, const Rule& r2, bool positive);

// Reference composition h ∘ g.
AgentMap oracle_compose(const AgentMap& h, const AgentMap& g);

}  // namespace storycheck::testing
