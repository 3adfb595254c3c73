#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "storycheck/poset.hpp"
#include "storycheck/scenario.hpp"

namespace storycheck {

enum class Sort { Unknown, Event, Poset };

std::string to_string(Sort s);

struct Term {
    std::string name;
    bool variable = true;
    Sort sort = Sort::Unknown;
    std::size_t position = 0;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    enum class Kind { True, False, Exists, Forall, Not, And, Or, Implies, Member, LabelIs, Leq, Turnstile, Enables, Prevents };
    Kind kind;
    std::string variable;              // quantifiers
    Sort variable_sort = Sort::Unknown;
    std::vector<FormulaPtr> children;
    std::vector<Term> terms;           // atoms, in textual order
    std::string label;                 // LabelIs
    std::size_t position = 0;

    std::set<std::string> free_variables() const;
    std::map<std::string, Sort> free_variable_sorts() const;
    std::string to_string() const;
};

// Names a formula may refer to as constants.
struct Vocabulary {
    std::set<std::string> posets;
    std::map<std::string, std::vector<std::string>> events;  // bare event name -> posets containing it
    std::set<std::string> rules;
};

// Throws SyntaxError, SortError, UnknownName or UnknownRuleName. Without a
// vocabulary every unbound identifier is a free variable and labels are not checked.
FormulaPtr parse_formula(const std::string& text, const Vocabulary* vocabulary = nullptr);

struct EventValue {
    std::size_t poset;
    std::size_t event;
    auto operator<=>(const EventValue&) const = default;
};

struct Value {
    Sort sort = Sort::Event;
    EventValue event{};
    std::size_t poset = 0;
    auto operator<=>(const Value&) const = default;
};

using Valuation = std::map<std::string, Value>;

// Posets under a common rule set; caches scenario answers.
class Universe {
public:
    Universe(const Model& model, std::vector<Poset> posets, ScenarioOptions options = {});

    const Model& model() const { return model_; }
    const std::vector<Poset>& posets() const { return posets_; }
    Vocabulary vocabulary() const;
    std::optional<Value> constant(const std::string& name) const;
    std::vector<Value> domain(Sort s) const;
    bool scenario(Polarity mode, EventValue e1, EventValue e2) const;
    std::string describe(const Value& v) const;

private:
    const Model& model_;
    std::vector<Poset> posets_;
    ScenarioOptions options_;
    mutable std::mutex mutex_;
    mutable std::map<std::tuple<int, EventValue, EventValue>, bool> cache_;
};

// Valuation must cover every free variable.
bool evaluate(const Formula& f, const Universe& u, const Valuation& v = {});

struct CheckResult {
    bool holds = false;
    std::optional<Valuation> witness;  // for formulas with free variables
};

// Closed formulas are evaluated; open ones are searched for a satisfying valuation.
CheckResult check(const Formula& f, const Universe& u);

}  // namespace storycheck
