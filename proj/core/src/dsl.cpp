#include "storycheck/dsl.hpp"

#include <cctype>
#include <map>
#include <set>

namespace storycheck {

namespace {

struct PSite {
    enum class Kind { Unconstrained, Free, Ref, Bond };
    SiteIndex index = 0;
    Kind kind = Kind::Unconstrained;
    std::string ref;
    SiteIndex ref_site = 0;
    long bond = 0;
    std::size_t pos = 0;
};

struct PAgent {
    std::string label;
    bool explicit_label = false;
    std::string type;
    std::size_t pos = 0;
    std::vector<PSite> sites;
};

class Reader {
public:
    Reader(const std::string& s, std::size_t begin, std::size_t end, std::size_t base)
        : s_(s), i_(begin), end_(end), base_(base) {}

    std::vector<PAgent> pattern() {
        std::vector<PAgent> out;
        skip();
        if (done()) return out;
        if (s_[i_] == '0') {
            std::size_t save = i_;
            ++i_;
            skip();
            if (done()) return out;
            i_ = save;
        }
        for (;;) {
            out.push_back(agent());
            skip();
            if (done()) break;
            expect(',');
        }
        return out;
    }

private:
    const std::string& s_;
    std::size_t i_;
    std::size_t end_;
    std::size_t base_;

    bool done() const { return i_ >= end_; }
    std::size_t at() const { return base_ + i_; }
    void skip() {
        while (!done() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, at()); }
    void expect(char c) {
        skip();
        if (done() || s_[i_] != c) fail(std::string("expected '") + c + "'");
        ++i_;
    }
    bool peek(char c) {
        skip();
        return !done() && s_[i_] == c;
    }
    std::string ident() {
        skip();
        std::size_t j = i_;
        if (done() || !(std::isalpha(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) fail("expected a name");
        while (j < end_ && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_' || s_[j] == '\'')) ++j;
        std::string out = s_.substr(i_, j - i_);
        i_ = j;
        return out;
    }
    unsigned long number() {
        skip();
        std::size_t j = i_;
        while (j < end_ && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
        if (j == i_) fail("expected a number");
        unsigned long v = std::stoul(s_.substr(i_, j - i_));
        i_ = j;
        return v;
    }

    PAgent agent() {
        PAgent a;
        skip();
        a.pos = at();
        std::string first = ident();
        if (peek(':')) {
            ++i_;
            a.label = first;
            a.explicit_label = true;
            a.type = ident();
        } else {
            a.type = first;
        }
        expect('(');
        if (!peek(')')) {
            for (;;) {
                a.sites.push_back(site());
                if (peek(')')) break;
                expect(',');
            }
        }
        expect(')');
        return a;
    }

    PSite site() {
        PSite p;
        skip();
        p.pos = at();
        p.index = static_cast<SiteIndex>(number());
        if (!peek('[')) return p;
        ++i_;
        skip();
        if (peek('.')) {
            ++i_;
            p.kind = PSite::Kind::Free;
        } else if (peek('?') || peek('_')) {
            ++i_;
        } else if (!done() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
            p.kind = PSite::Kind::Bond;
            p.bond = static_cast<long>(number());
        } else {
            p.kind = PSite::Kind::Ref;
            p.ref = ident();
            expect('.');
            p.ref_site = static_cast<SiteIndex>(number());
        }
        expect(']');
        return p;
    }
};

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Builds the graph of one side, agents numbered by `ids`.
SiteGraph build(const std::vector<PAgent>& agents, const std::vector<AgentId>& ids, const SignaturePtr& sig) {
    std::map<std::string, std::size_t> by_label;
    std::map<std::string, int> type_count;
    for (const auto& a : agents) ++type_count[lower(a.type)];
    for (std::size_t k = 0; k < agents.size(); ++k)
        if (agents[k].explicit_label) {
            if (!by_label.emplace(agents[k].label, k).second)
                throw SyntaxError("label '" + agents[k].label + "' used twice on one side", agents[k].pos);
        }
    auto resolve = [&](const PSite& s) -> std::size_t {
        auto it = by_label.find(s.ref);
        if (it != by_label.end()) return it->second;
        if (type_count[s.ref] == 1)
            for (std::size_t k = 0; k < agents.size(); ++k)
                if (lower(agents[k].type) == s.ref) return k;
        throw SyntaxError("cannot resolve agent reference '" + s.ref + "'", s.pos);
    };
    RawGraph raw;
    std::map<long, std::vector<Node>> bonds;
    std::set<Node> nodes;
    for (std::size_t k = 0; k < agents.size(); ++k) {
        const auto& a = agents[k];
        if (!sig->find(a.type)) throw SyntaxError("unknown agent type '" + a.type + "'", a.pos);
        SiteIndex count = sig->site_count(*sig->find(a.type));
        raw.agents.push_back({ids[k], a.type});
        std::set<SiteIndex> seen;
        for (const auto& s : a.sites) {
            if (!seen.insert(s.index).second)
                throw SyntaxError("site " + std::to_string(s.index) + " listed twice", s.pos);
            if (s.index >= count)
                throw SyntaxError("site " + std::to_string(s.index) + " out of range for " + a.type, s.pos);
            Node n{ids[k], s.index};
            nodes.insert(n);
            switch (s.kind) {
                case PSite::Kind::Unconstrained: break;
                case PSite::Kind::Free: raw.edges.push_back({n, std::nullopt}); break;
                case PSite::Kind::Bond: bonds[s.bond].push_back(n); break;
                case PSite::Kind::Ref: {
                    std::size_t b = resolve(s);
                    SiteIndex bc = sig->site_count(*sig->find(agents[b].type));
                    if (s.ref_site >= bc)
                        throw SyntaxError("site " + std::to_string(s.ref_site) + " out of range for " +
                                              agents[b].type,
                                          s.pos);
                    Node m{ids[b], s.ref_site};
                    nodes.insert(m);
                    raw.edges.push_back({n, m});
                }
            }
        }
    }
    for (const auto& [label, ends] : bonds) {
        if (ends.size() != 2)
            throw InputError("bond " + std::to_string(label) + " must appear exactly twice");
        raw.edges.push_back({ends[0], ends[1]});
    }
    raw.nodes.assign(nodes.begin(), nodes.end());
    return make_site_graph(raw, sig);
}

std::vector<AgentId> positional(std::size_t n) {
    std::vector<AgentId> ids(n);
    for (std::size_t k = 0; k < n; ++k) ids[k] = static_cast<AgentId>(k);
    return ids;
}

}  // namespace

SiteGraph parse_graph(const std::string& text, const SignaturePtr& signature) {
    Reader r(text, 0, text.size(), 0);
    auto agents = r.pattern();
    return build(agents, positional(agents.size()), signature);
}

RulePtr parse_rule(const std::string& text, const SignaturePtr& signature, const std::string& name) {
    auto arrow = text.find("->");
    if (arrow == std::string::npos) throw SyntaxError("rule needs '->'", text.size());
    if (text.find("->", arrow + 2) != std::string::npos) throw SyntaxError("rule has two '->'", text.find("->", arrow + 2));
    std::size_t start = 0;
    std::string rule_name = name;
    // A leading "name: " (colon followed by blank) names the rule.
    {
        std::size_t i = 0;
        while (i < arrow && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < arrow && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' || text[j] == '\''))
            ++j;
        if (j > i && j < arrow && text[j] == ':' && (j + 1 >= arrow || std::isspace(static_cast<unsigned char>(text[j + 1])))) {
            if (rule_name.empty()) rule_name = text.substr(i, j - i);
            start = j + 1;
        }
    }
    if (rule_name.empty()) throw InputError("rule has no name");
    Reader lr(text, start, arrow, 0), rr(text, arrow + 2, text.size(), 0);
    auto left = lr.pattern();
    auto right = rr.pattern();

    bool labelled = false;
    for (const auto* side : {&left, &right})
        for (const auto& a : *side) labelled = labelled || a.explicit_label;
    std::vector<AgentId> lids = positional(left.size());
    std::vector<AgentId> rids(right.size());
    std::set<AgentId> preserved;
    std::vector<char> paired(right.size(), 0);
    if (labelled) {
        for (std::size_t k = 0; k < right.size(); ++k) {
            if (!right[k].explicit_label) continue;
            for (std::size_t l = 0; l < left.size(); ++l)
                if (left[l].explicit_label && left[l].label == right[k].label) {
                    if (left[l].type != right[k].type)
                        throw SyntaxError("agent '" + right[k].label + "' changes type", right[k].pos);
                    rids[k] = lids[l];
                    paired[k] = 1;
                    preserved.insert(lids[l]);
                }
        }
    } else {
        for (std::size_t k = 0; k < std::min(left.size(), right.size()) && left[k].type == right[k].type; ++k) {
            rids[k] = lids[k];
            paired[k] = 1;
            preserved.insert(lids[k]);
        }
    }
    AgentId next = static_cast<AgentId>(left.size());
    for (std::size_t k = 0; k < right.size(); ++k)
        if (!paired[k]) rids[k] = next++;
    SiteGraph lg = build(left, lids, signature);
    SiteGraph rg = build(right, rids, signature);
    return make_rule_by_ids(rule_name, lg, rg, preserved);
}

namespace {

std::string format_agents(const SiteGraph& g, const std::map<AgentId, std::string>& labels) {
    std::map<Node, long> bond;
    long next = 1;
    for (const auto& e : g.edges())
        if (!e.second.free) {
            bond[e.first] = next;
            bond[e.second.partner] = next++;
        }
    std::string out;
    for (const auto& [a, t] : g.agents()) {
        if (!out.empty()) out += ", ";
        auto it = labels.find(a);
        if (it != labels.end()) out += it->second + ":";
        out += g.signature().name(t) + "(";
        bool first = true;
        for (Node n : g.nodes_of(a)) {
            if (!first) out += ",";
            first = false;
            out += std::to_string(n.site);
            const auto& l = g.link(n);
            if (!l) continue;
            out += l->free ? "[.]" : "[" + std::to_string(bond.at(n)) + "]";
        }
        out += ")";
    }
    return out.empty() ? "0" : out;
}

}  // namespace

std::string format_graph(const SiteGraph& g) { return format_agents(g, {}); }

std::string format_rule(const Rule& r) {
    std::map<AgentId, std::string> ll, rl;
    for (const auto& [a, t] : r.left->agents()) ll[a] = "d" + std::to_string(a);
    for (const auto& [a, t] : r.right->agents()) rl[a] = "c" + std::to_string(a);
    for (const auto& [k, t] : r.kept->agents()) {
        ll[r.p(k)] = "k" + std::to_string(k);
        rl[r.q(k)] = "k" + std::to_string(k);
    }
    return r.name + ": " + format_agents(*r.left, ll) + " -> " + format_agents(*r.right, rl);
}

}  // namespace storycheck
