#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "storycheck/catops.hpp"
#include "storycheck/rewrite.hpp"

namespace storycheck {

enum class Polarity { Positive, Negative };

// A witnessed influence of `source` on `target`. For positive influences
// the overlap is R_source <- O -> L_target, for negative ones
// L_source <- O -> L_target; `gluing` is the multisum member it came from.
struct InfluenceWitness {
    RulePtr source;
    RulePtr target;
    Polarity polarity;
    AgentMap sigma;
    Span overlap;
    Cospan gluing;
};

std::vector<InfluenceWitness> positive_influences(const RulePtr& r1, const RulePtr& r2);
std::vector<InfluenceWitness> negative_influences(const RulePtr& r1, const RulePtr& r2);

// Elements of the overlap apex that lie outside the image of a subgraph morphism.
bool overlap_escapes(const Morphism& overlap_leg, const Morphism& kept_leg);

// A rule set over one signature with cached influence computations.
class Model {
public:
    explicit Model(SignaturePtr signature) : sig_(std::move(signature)) {}

    const SignaturePtr& signature_ptr() const { return sig_; }
    const Signature& signature() const { return *sig_; }

    void add_rule(RulePtr r);
    const std::vector<RulePtr>& rules() const { return rules_; }
    RulePtr find_rule(const std::string& name) const;
    RulePtr rule(const std::string& name) const;  // throws UnknownRuleName

    void set_initial(GraphPtr g) { initial_ = std::move(g); }
    const GraphPtr& initial() const { return initial_; }

    const std::vector<InfluenceWitness>& positive(const RulePtr& r1, const RulePtr& r2) const;
    const std::vector<InfluenceWitness>& negative(const RulePtr& r1, const RulePtr& r2) const;

private:
    SignaturePtr sig_;
    std::vector<RulePtr> rules_;
    std::map<std::string, RulePtr> by_name_;
    GraphPtr initial_;
    mutable std::mutex mutex_;
    mutable std::map<std::pair<const Rule*, const Rule*>, std::vector<InfluenceWitness>> pos_cache_, neg_cache_;
};

}  // namespace storycheck
