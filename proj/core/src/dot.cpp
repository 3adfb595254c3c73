#include "storycheck/dot.hpp"

#include <sstream>

namespace storycheck {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string poset_to_dot(const Poset& p) {
    std::ostringstream os;
    os << "digraph " << quote(p.name) << " {\n";
    os << "  node [shape=box];\n";
    for (std::size_t i = 0; i < p.size(); ++i)
        os << "  " << quote(p.events[i]) << " [label=" << quote(p.labels[i]) << "];\n";
    for (auto [i, j] : p.leq.reduction().pairs()) os << "  " << quote(p.events[i]) << " -> " << quote(p.events[j]) << ";\n";
    for (auto [i, j] : p.turnstile.reduction().pairs())
        os << "  " << quote(p.events[i]) << " -> " << quote(p.events[j]) << " [style=dashed];\n";
    os << "}\n";
    return os.str();
}

std::string graph_to_dot(const SiteGraph& g, const std::string& name) {
    std::ostringstream os;
    os << "graph " << quote(name) << " {\n";
    os << "  node [shape=record];\n";
    for (const auto& [a, t] : g.agents()) {
        os << "  a" << a << " [label=\"{" << g.signature().name(t) << " " << a;
        auto nodes = g.nodes_of(a);
        if (!nodes.empty()) {
            os << "|{";
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                if (k) os << "|";
                const auto& l = g.link(nodes[k]);
                os << "<s" << nodes[k].site << ">" << nodes[k].site << (l && l->free ? " free" : "");
            }
            os << "}";
        }
        os << "}\"];\n";
    }
    for (const auto& e : g.edges()) {
        if (e.second.free) continue;
        os << "  a" << e.first.agent << ":s" << e.first.site << " -- a" << e.second.partner.agent << ":s"
           << e.second.partner.site << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace storycheck
