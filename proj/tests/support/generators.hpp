#pragma once

#include <memory>
#include <random>

#include "storycheck/influence.hpp"
#include "storycheck/rewrite.hpp"

namespace storycheck::testing {

// A: 2 sites, B: 2 sites, C: 1 site.
SignaturePtr three_type_signature();
// A: 1 site, B: 1 site.
SignaturePtr two_type_signature();

SiteGraph random_graph(const SignaturePtr& sig, std::mt19937& rng, std::size_t agents);

struct RandomTrace {
    std::unique_ptr<Model> model;
    Trace trace;
};

// A valid trace of exactly `steps` transitions when one is found, with at most
// `max_agents` agents in every state. Rules are invented along the way from
// sub-patterns of the current state, or reused when they match.
RandomTrace random_trace(const SignaturePtr& sig, std::mt19937& rng, std::size_t steps, std::size_t max_agents);

}  // namespace storycheck::testing
