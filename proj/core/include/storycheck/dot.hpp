#pragma once

#include <string>

#include "storycheck/poset.hpp"
#include "storycheck/sitegraph.hpp"

namespace storycheck {

// Events as boxes labelled by rule; covering < pairs solid, covering
// inhibition pairs dashed (from prevented to preventer).
std::string poset_to_dot(const Poset& p);

// Agents as records with one port per site present in the graph.
std::string graph_to_dot(const SiteGraph& g, const std::string& name = "G");

}  // namespace storycheck
