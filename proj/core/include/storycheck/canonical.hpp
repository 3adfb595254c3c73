#pragma once

#include <map>
#include <string>
#include <vector>

#include "storycheck/sitegraph.hpp"

namespace storycheck {

struct CanonicalForm {
    SiteGraph graph;               // agents renamed 0..n-1
    std::string certificate;       // equal iff isomorphic (with equal colours)
    std::vector<AgentId> order;    // order[k] is the original agent renamed to k
};

// Colours are an extra agent invariant that isomorphisms must preserve.
CanonicalForm iso_canonical(const SiteGraph& g, const std::map<AgentId, int>& colours = {});

bool isomorphic(const SiteGraph& a, const SiteGraph& b);

// Certificate of a graph together with a morphism into it: isomorphic pairs
// (G, f) and (G', f') with f' = iso . f get equal certificates.
std::string pointed_certificate(const Morphism& f);

}  // namespace storycheck
