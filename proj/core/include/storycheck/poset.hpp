#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "storycheck/causality.hpp"
#include "storycheck/influence.hpp"
#include "storycheck/rewrite.hpp"

namespace storycheck {

// Binary relation on 0..n-1.
class Relation {
public:
    explicit Relation(std::size_t n = 0) : n_(n), bits_(n * n, false) {}
    static Relation from_pairs(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

    std::size_t size() const { return n_; }
    bool operator()(std::size_t i, std::size_t j) const { return bits_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, bool v = true) { bits_[i * n_ + j] = v; }

    Relation reflexive_transitive_closure() const;
    Relation without_diagonal() const;
    // Transitive reduction of the strict part of the transitive closure.
    Relation reduction() const;
    bool acyclic() const;
    Relation restrict_to(const std::vector<std::size_t>& keep) const;
    Relation united(const Relation& o) const;
    std::vector<std::pair<std::size_t, std::size_t>> pairs() const;
    bool operator==(const Relation&) const = default;

private:
    std::size_t n_;
    std::vector<bool> bits_;
};

// A labelled event structure. `lt` and `inh` hold the generating pairs;
// `leq` and `turnstile` their reflexive-transitive closures. Pairs of `inh`
// are (prevented, preventer).
struct Poset {
    std::string name;
    std::vector<std::string> events;
    std::vector<std::string> labels;
    Relation lt;
    Relation inh;
    Relation leq;
    Relation turnstile;

    // Throws InputError on duplicate names or a cycle through lt and inh.
    static Poset make(std::string name, std::vector<std::string> events, std::vector<std::string> labels,
                      const std::vector<std::pair<std::size_t, std::size_t>>& lt,
                      const std::vector<std::pair<std::size_t, std::size_t>>& inh);

    std::size_t size() const { return events.size(); }
    std::optional<std::size_t> find(const std::string& event) const;
    std::size_t index_of(const std::string& event) const;  // throws EventNotInPoset
    bool less(std::size_t i, std::size_t j) const { return i != j && leq(i, j); }
    bool inhibits(std::size_t i, std::size_t j) const { return i != j && turnstile(i, j); }
};

// Transitions of a trace with their realised influences.
struct IntermediateStructure {
    std::vector<std::string> labels;
    std::vector<TraceRelation> positive;  // from enables to
    std::vector<TraceRelation> negative;  // from prevents to
};

IntermediateStructure abstract_step1(const Trace& trace, const Model& model);
Poset abstract_step2(const IntermediateStructure& s, std::string name = "P");
Poset abstract_trace(const Trace& trace, const Model& model, std::string name = "P");

// Label-preserving bijection preserving both closures, as event index map.
std::optional<std::vector<std::size_t>> poset_iso(const Poset& a, const Poset& b);

// One representative per isomorphism class, in first-seen order.
std::vector<Poset> quotient_by_iso(const std::vector<Poset>& posets);

struct CausalPast {
    Poset poset;
    std::vector<std::size_t> original;  // index in the sub-poset -> index in the parent
    std::size_t event;                  // the event itself in the sub-poset
    bool turnstile_crosses;             // some inhibition leaves or enters the past
};

CausalPast causal_past(const Poset& s, std::size_t e);

}  // namespace storycheck
