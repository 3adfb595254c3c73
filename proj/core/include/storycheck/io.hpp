#pragma once

#include <memory>
#include <string>

#include "storycheck/concretize.hpp"
#include "storycheck/influence.hpp"
#include "storycheck/poset.hpp"
#include "storycheck/rewrite.hpp"

namespace storycheck {

// JSON readers throw InputError (ParseError for malformed JSON text).
std::string read_text_file(const std::string& path);

std::unique_ptr<Model> read_model(const std::string& json_text);
std::unique_ptr<Model> load_model(const std::string& path);

SiteGraph read_graph(const std::string& json_text, const SignaturePtr& signature);
std::string write_graph(const SiteGraph& g);

Poset read_poset(const std::string& json_text);
Poset load_poset(const std::string& path);
std::string write_poset(const Poset& p);

// Accepts the full form (every transition with its states, re-checked) and
// the compact form (initial state plus rule names and matchings).
Trace read_trace(const std::string& json_text, const Model& model);
Trace load_trace(const std::string& path, const Model& model);
std::string write_trace(const Trace& t);

std::string write_rule(const Rule& r);
std::string write_model(const Model& m);

}  // namespace storycheck
