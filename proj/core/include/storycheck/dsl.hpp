#pragma once

#include <string>
#include <vector>

#include "storycheck/rewrite.hpp"

namespace storycheck {

// Kappa-like text syntax.
//
//   rule    := [name ':'] pattern '->' pattern
//   pattern := '' | '0' | agent (',' agent)*
//   agent   := [label ':'] Type '(' [site (',' site)*] ')'
//   site    := index                 node, state unconstrained
//            | index '[' '.' ']'     free
//            | index '[' '?' ']'     node, state unconstrained
//            | index '[' ref '.' index ']'   bound to a site of another agent
//            | index '[' digits ']'  bound through a shared bond number
//   ref     := agent label, or the lower-cased type name when it is unique
//
// Agents are numbered 0.. in textual order. With no explicit labels the
// agents of both sides are paired by position while their types agree;
// otherwise agents carrying the same label on both sides are preserved.
SiteGraph parse_graph(const std::string& text, const SignaturePtr& signature);
RulePtr parse_rule(const std::string& text, const SignaturePtr& signature, const std::string& name = "");

std::string format_graph(const SiteGraph& g);
std::string format_rule(const Rule& r);

}  // namespace storycheck
