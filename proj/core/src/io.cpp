#include "storycheck/io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "storycheck/dsl.hpp"

namespace storycheck {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
    }
}

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid ") + what + ": " + e.what());
    }
}

json graph_json(const SiteGraph& g) {
    json agents = json::array(), nodes = json::array(), edges = json::array();
    for (const auto& [a, t] : g.agents()) agents.push_back({{"id", a}, {"type", g.signature().name(t)}});
    for (const auto& [n, l] : g.nodes()) nodes.push_back({n.agent, n.site});
    for (const auto& e : g.edges()) {
        json end = e.second.free ? json("free") : json::array({e.second.partner.agent, e.second.partner.site});
        edges.push_back({json::array({e.first.agent, e.first.site}), end});
    }
    return {{"agents", agents}, {"nodes", nodes}, {"edges", edges}};
}

Node node_from(const json& j) { return Node{j.at(0).get<AgentId>(), j.at(1).get<SiteIndex>()}; }

SiteGraph graph_from(const json& j, const SignaturePtr& sig) {
    if (j.is_string()) return parse_graph(j.get<std::string>(), sig);
    RawGraph raw;
    for (const auto& a : j.at("agents")) raw.agents.push_back({a.at("id").get<AgentId>(), a.at("type").get<std::string>()});
    if (j.contains("nodes"))
        for (const auto& n : j.at("nodes")) raw.nodes.push_back(node_from(n));
    if (j.contains("edges"))
        for (const auto& e : j.at("edges")) {
            const json& to = e.at(1);
            if (to.is_string()) {
                if (to.get<std::string>() != "free") throw InputError("edge end must be a node or \"free\"");
                raw.edges.push_back({node_from(e.at(0)), std::nullopt});
            } else {
                raw.edges.push_back({node_from(e.at(0)), node_from(to)});
            }
        }
    return make_site_graph(raw, sig);
}

AgentMap map_from(const json& j) {
    std::vector<std::pair<AgentId, AgentId>> pairs;
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) pairs.emplace_back(static_cast<AgentId>(std::stoul(k)), v.get<AgentId>());
    } else {
        for (const auto& p : j) pairs.emplace_back(p.at(0).get<AgentId>(), p.at(1).get<AgentId>());
    }
    return AgentMap(std::move(pairs));
}

json map_json(const AgentMap& m) {
    json out = json::array();
    for (const auto& [a, b] : m.pairs()) out.push_back({a, b});
    return out;
}

json rule_json(const Rule& r) {
    return {{"name", r.name},
            {"left", graph_json(*r.left)},
            {"kept", graph_json(*r.kept)},
            {"right", graph_json(*r.right)},
            {"p", map_json(r.p.map())},
            {"q", map_json(r.q.map())},
            {"dsl", format_rule(r)}};
}

json transition_json(const Transition& t) {
    return {{"rule", t.rule->name},
            {"source", graph_json(*t.source)},
            {"context", graph_json(*t.context)},
            {"target", graph_json(*t.target)},
            {"matching", map_json(t.matching.map())},
            {"comatching", map_json(t.comatching.map())}};
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::unique_ptr<Model> read_model(const std::string& text) {
    json j = parse_json(text);
    return guarded("model", [&] {
        auto sig = std::make_shared<Signature>();
        const json& s = j.at("signature");
        if (s.is_object()) {
            for (const auto& [name, count] : s.items()) sig->add(name, count.get<SiteIndex>());
        } else {
            for (const auto& t : s) sig->add(t.at("type").get<std::string>(), t.at("sites").get<SiteIndex>());
        }
        SignaturePtr csig = sig;
        auto model = std::make_unique<Model>(csig);
        if (j.contains("rules"))
            for (const auto& r : j.at("rules")) {
                if (r.is_string()) {
                    model->add_rule(parse_rule(r.get<std::string>(), csig));
                    continue;
                }
                std::string name = r.value("name", "");
                if (r.contains("dsl") && !r.contains("left")) {
                    model->add_rule(parse_rule(r.at("dsl").get<std::string>(), csig, name));
                    continue;
                }
                if (r.contains("rule")) {
                    model->add_rule(parse_rule(r.at("rule").get<std::string>(), csig, name));
                    continue;
                }
                model->add_rule(make_rule(name, share(graph_from(r.at("left"), csig)),
                                          share(graph_from(r.at("kept"), csig)),
                                          share(graph_from(r.at("right"), csig)), map_from(r.at("p")),
                                          map_from(r.at("q"))));
            }
        if (j.contains("initial")) model->set_initial(share(graph_from(j.at("initial"), csig)));
        return model;
    });
}

std::unique_ptr<Model> load_model(const std::string& path) { return read_model(read_text_file(path)); }

SiteGraph read_graph(const std::string& text, const SignaturePtr& sig) {
    json j = parse_json(text);
    return guarded("graph", [&] { return graph_from(j, sig); });
}

std::string write_graph(const SiteGraph& g) { return graph_json(g).dump(2) + "\n"; }

Poset read_poset(const std::string& text) {
    json j = parse_json(text);
    return guarded("poset", [&] {
        std::vector<std::string> events, labels;
        for (const auto& e : j.at("events")) {
            events.push_back(e.at("id").get<std::string>());
            labels.push_back(e.at("label").get<std::string>());
        }
        auto index = [&](const json& name) {
            std::string n = name.get<std::string>();
            for (std::size_t i = 0; i < events.size(); ++i)
                if (events[i] == n) return i;
            throw EventNotInPoset("poset refers to unknown event '" + n + "'");
        };
        std::vector<std::pair<std::size_t, std::size_t>> lt, inh;
        if (j.contains("lt"))
            for (const auto& p : j.at("lt")) lt.emplace_back(index(p.at(0)), index(p.at(1)));
        if (j.contains("turnstile"))
            for (const auto& p : j.at("turnstile")) inh.emplace_back(index(p.at(0)), index(p.at(1)));
        return Poset::make(j.value("name", "P"), events, labels, lt, inh);
    });
}

Poset load_poset(const std::string& path) { return read_poset(read_text_file(path)); }

std::string write_poset(const Poset& p) {
    json events = json::array(), lt = json::array(), inh = json::array();
    for (std::size_t i = 0; i < p.size(); ++i) events.push_back({{"id", p.events[i]}, {"label", p.labels[i]}});
    for (auto [i, j] : p.lt.without_diagonal().pairs()) lt.push_back({p.events[i], p.events[j]});
    for (auto [i, j] : p.inh.without_diagonal().pairs()) inh.push_back({p.events[i], p.events[j]});
    json out = {{"name", p.name}, {"events", events}, {"lt", lt}, {"turnstile", inh}};
    return out.dump(2) + "\n";
}

Trace read_trace(const std::string& text, const Model& model) {
    json j = parse_json(text);
    return guarded("trace", [&] {
        const SignaturePtr& sig = model.signature_ptr();
        std::vector<Transition> steps;
        if (j.contains("transitions")) {
            for (const auto& t : j.at("transitions")) {
                RulePtr r = model.rule(t.at("rule").get<std::string>());
                GraphPtr src = steps.empty() ? share(graph_from(t.at("source"), sig)) : steps.back().target;
                if (!steps.empty() && !(*src == graph_from(t.at("source"), sig))) throw NotComposable(steps.size() - 1);
                Transition tr = make_transition(r, src, Morphism(r->left, src, map_from(t.at("matching"))));
                if (t.contains("target") && !(*tr.target == graph_from(t.at("target"), sig)))
                    throw InputError("transition " + std::to_string(steps.size()) + " does not produce its target");
                if (t.contains("context") && !(*tr.context == graph_from(t.at("context"), sig)))
                    throw InputError("transition " + std::to_string(steps.size()) + " has a different context");
                if (t.contains("comatching") && tr.comatching.map() != map_from(t.at("comatching")))
                    throw InputError("transition " + std::to_string(steps.size()) + " has a different comatching");
                steps.push_back(std::move(tr));
            }
            return compose_trace(std::move(steps));
        }
        GraphPtr cur;
        if (j.contains("initial"))
            cur = share(graph_from(j.at("initial"), sig));
        else if (model.initial())
            cur = model.initial();
        else
            throw InputError("trace has no initial state");
        for (const auto& st : j.at("steps")) {
            RulePtr r = model.rule(st.at("rule").get<std::string>());
            Morphism m(r->left, cur, map_from(st.at("matching")));
            steps.push_back(make_transition(r, cur, m));
            cur = steps.back().target;
        }
        return compose_trace(std::move(steps));
    });
}

Trace load_trace(const std::string& path, const Model& model) { return read_trace(read_text_file(path), model); }

std::string write_trace(const Trace& t) {
    json tr = json::array();
    for (const auto& s : t.steps) tr.push_back(transition_json(s));
    return json{{"transitions", tr}}.dump(2) + "\n";
}

std::string write_rule(const Rule& r) { return rule_json(r).dump(2) + "\n"; }

std::string write_model(const Model& m) {
    json sig = json::object();
    for (TypeId t : m.signature().types()) sig[m.signature().name(t)] = m.signature().site_count(t);
    json rules = json::array();
    for (const auto& r : m.rules()) rules.push_back(rule_json(*r));
    json out = {{"signature", sig}, {"rules", rules}};
    if (m.initial()) out["initial"] = graph_json(*m.initial());
    return out.dump(2) + "\n";
}

}  // namespace storycheck
