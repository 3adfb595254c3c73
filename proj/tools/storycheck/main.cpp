#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "storycheck/canonical.hpp"
#include "storycheck/causality.hpp"
#include "storycheck/concretize.hpp"
#include "storycheck/dot.hpp"
#include "storycheck/dsl.hpp"
#include "storycheck/io.hpp"
#include "storycheck/logic.hpp"
#include "storycheck/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace storycheck;

namespace {

constexpr int kTrue = 0;
constexpr int kFalse = 1;
constexpr int kUsage = 2;

bool g_json = false;

struct Options {
    std::string model, trace, poset, graph, state, rule, dot, formula;
    std::string poset1, poset2, event1, event2, mode = "prevention";
    std::vector<std::string> posets;
    std::size_t matching = 0, max_solutions = 0;
    bool all = false;
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const SyntaxError*>(&e)) return "SyntaxError";
    if (dynamic_cast<const SortError*>(&e)) return "SortError";
    if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const UnknownRuleName*>(&e)) return "UnknownRuleName";
    if (dynamic_cast<const UnknownName*>(&e)) return "UnknownName";
    if (dynamic_cast<const EventNotInPoset*>(&e)) return "EventNotInPoset";
    if (dynamic_cast<const NotComposable*>(&e)) return "NotComposable";
    if (dynamic_cast<const BudgetExhausted*>(&e)) return "BudgetExhausted";
    if (dynamic_cast<const Unconcretizable*>(&e)) return "Unconcretizable";
    if (dynamic_cast<const InputError*>(&e)) return "InputError";
    return "Error";
}

int report_error(const std::exception& e) {
    if (g_json) {
        json j = {{"error", error_kind(e)}, {"message", e.what()}};
        if (const auto* ie = dynamic_cast<const InputError*>(&e); ie && !ie->details().empty())
            j["details"] = ie->details();
        std::cout << j.dump() << "\n";
    } else {
        std::cerr << "storycheck: " << e.what() << "\n";
        if (const auto* ie = dynamic_cast<const InputError*>(&e))
            for (const auto& d : ie->details()) std::cerr << "  " << d << "\n";
    }
    return kUsage;
}

// A trace file may name its model with a path relative to itself.
std::unique_ptr<Model> model_for_trace(const Options& o) {
    if (!o.model.empty()) return load_model(o.model);
    json j;
    try {
        j = json::parse(read_text_file(o.trace));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
    }
    if (!j.is_object() || !j.contains("model") || !j["model"].is_string())
        throw InputError("no --model given and the trace does not name one");
    fs::path p = j["model"].get<std::string>();
    if (p.is_relative()) p = fs::path(o.trace).parent_path() / p;
    return load_model(p.string());
}

ConcretizeOptions concretize_options(const Options& o) {
    ConcretizeOptions c;
    c.budget = default_search_budget();
    c.max_solutions = o.max_solutions;
    return c;
}

int cmd_validate(const Options& o) {
    auto model = load_model(o.model);
    json out = {{"valid", true}, {"rules", model->rules().size()}};
    std::string extra;
    if (!o.graph.empty()) {
        SiteGraph g = read_graph(read_text_file(o.graph), model->signature_ptr());
        out["graph_agents"] = g.agent_count();
        extra += ", graph with " + std::to_string(g.agent_count()) + " agents";
    }
    if (!o.trace.empty()) {
        Trace t = load_trace(o.trace, *model);
        out["transitions"] = t.size();
        extra += ", trace of " + std::to_string(t.size()) + " transitions";
    }
    if (!o.poset.empty()) {
        Poset p = load_poset(o.poset);
        for (const auto& l : p.labels) model->rule(l);
        out["events"] = p.size();
        extra += ", poset of " + std::to_string(p.size()) + " events";
    }
    if (g_json)
        std::cout << out.dump() << "\n";
    else
        std::cout << "ok: " << model->rules().size() << " rules" << extra << "\n";
    return kTrue;
}

int cmd_apply(const Options& o) {
    auto model = load_model(o.model);
    GraphPtr state;
    if (!o.graph.empty())
        state = share(read_graph(read_text_file(o.graph), model->signature_ptr()));
    else if (!o.state.empty())
        state = share(parse_graph(o.state, model->signature_ptr()));
    else if (model->initial())
        state = model->initial();
    else
        throw InputError("no state: give --graph, --state or an initial mixture in the model");
    RulePtr rule = model->rule(o.rule);
    auto ms = matchings(rule, state);
    if (ms.empty()) {
        if (g_json)
            std::cout << json{{"applicable", false}}.dump() << "\n";
        else
            std::cout << "rule " << rule->name << " has no matching\n";
        return kFalse;
    }
    if (o.matching >= ms.size())
        throw InputError("matching " + std::to_string(o.matching) + " out of range (" + std::to_string(ms.size()) +
                         " found)");
    Trace t = compose_trace({make_transition(rule, state, ms[o.matching])});
    std::cout << write_trace(t);
    return kTrue;
}

int cmd_influence(const Options& o) {
    auto model = load_model(o.model);
    json rows = json::array();
    if (!g_json) std::cout << "source\ttarget\tpositive\tnegative\n";
    for (const auto& r1 : model->rules())
        for (const auto& r2 : model->rules()) {
            std::size_t pos = model->positive(r1, r2).size(), neg = model->negative(r1, r2).size();
            if (g_json)
                rows.push_back({{"source", r1->name}, {"target", r2->name}, {"positive", pos}, {"negative", neg}});
            else
                std::cout << r1->name << "\t" << r2->name << "\t" << pos << "\t" << neg << "\n";
        }
    if (g_json) std::cout << rows.dump(2) << "\n";
    return kTrue;
}

int cmd_causality(const Options& o) {
    auto model = model_for_trace(o);
    Trace t = load_trace(o.trace, *model);
    json out = {{"enables", json::array()}, {"prevents", json::array()}};
    auto seen = [](json& arr, std::size_t a, std::size_t b) {
        for (const auto& p : arr)
            if (p[0] == a && p[1] == b) return true;
        arr.push_back({a, b});
        return false;
    };
    if (!g_json) std::cout << "relation\tfrom\tto\n";
    for (const auto& r : enablements(t, *model))
        if (!seen(out["enables"], r.from_index, r.to_index) && !g_json)
            std::cout << "enables\t" << r.from_index << ":" << t[r.from_index].rule->name << "\t" << r.to_index << ":"
                      << t[r.to_index].rule->name << "\n";
    for (const auto& r : preventions(t, *model))
        if (!seen(out["prevents"], r.from_index, r.to_index) && !g_json)
            std::cout << "prevents\t" << r.from_index << ":" << t[r.from_index].rule->name << "\t" << r.to_index << ":"
                      << t[r.to_index].rule->name << "\n";
    if (g_json) std::cout << out.dump(2) << "\n";
    return kTrue;
}

int cmd_abstract(const Options& o) {
    auto model = model_for_trace(o);
    Trace t = load_trace(o.trace, *model);
    Poset p = abstract_trace(t, *model, fs::path(o.trace).stem().stem().string());
    if (!o.dot.empty()) write_file(o.dot, poset_to_dot(p));
    std::cout << write_poset(p);
    return kTrue;
}

int cmd_concretize(const Options& o) {
    auto model = load_model(o.model);
    Poset p = load_poset(o.poset);
    ConcretizeResult r = search_concretizations(p, *model, concretize_options(o));
    if (r.solutions.empty() && r.exhausted) throw BudgetExhausted(concretize_options(o).budget);
    json sols = json::array();
    for (const auto& c : r.solutions) sols.push_back(json::parse(write_trace(c.trace)));
    json out = {{"solutions", sols}, {"exhausted", r.exhausted}, {"expansions", r.expansions}};
    std::cout << out.dump(2) << "\n";
    if (!g_json && r.solutions.empty()) std::cerr << "poset " << p.name << " has no concretization\n";
    return r.solutions.empty() ? kFalse : kTrue;
}

int cmd_check(const Options& o) {
    auto model = load_model(o.model);
    std::vector<Poset> posets;
    for (const auto& spec : o.posets) {
        auto eq = spec.find('=');
        Poset p = load_poset(eq == std::string::npos ? spec : spec.substr(eq + 1));
        if (eq != std::string::npos) p.name = spec.substr(0, eq);
        posets.push_back(std::move(p));
    }
    ScenarioOptions so;
    so.concretize = concretize_options(o);
    Universe u(*model, std::move(posets), so);
    Vocabulary voc = u.vocabulary();
    FormulaPtr f = parse_formula(o.formula, &voc);
    CheckResult r = check(*f, u);
    json out = {{"holds", r.holds}};
    if (r.witness) {
        json w = json::object();
        for (const auto& [name, v] : *r.witness) w[name] = u.describe(v);
        out["witness"] = w;
    }
    if (g_json) {
        std::cout << out.dump() << "\n";
    } else {
        std::cout << (r.holds ? "true" : "false") << "\n";
        if (r.witness)
            for (const auto& [name, v] : *r.witness) std::cout << "  " << name << " = " << u.describe(v) << "\n";
    }
    return r.holds ? kTrue : kFalse;
}

int cmd_scenario(const Options& o) {
    Polarity mode;
    if (o.mode == "prevention")
        mode = Polarity::Negative;
    else if (o.mode == "enablement")
        mode = Polarity::Positive;
    else
        throw InputError("--mode must be prevention or enablement");
    auto model = load_model(o.model);
    Poset s1 = load_poset(o.poset1), s2 = load_poset(o.poset2);
    std::size_t e1 = s1.index_of(o.event1), e2 = s2.index_of(o.event2);
    for (const auto* s : {&s1, &s2})
        for (const auto& l : s->labels) model->rule(l);
    ScenarioOptions so;
    so.all = o.all;
    so.concretize = concretize_options(o);
    ScenarioResult r = find_scenario(s1, e1, s2, e2, mode, *model, so);
    if (!o.dot.empty() && r.exists) {
        std::string text;
        for (std::size_t k = 0; k < r.scenarios.size(); ++k)
            text += graph_to_dot(*r.scenarios[k].graph, "scenario" + std::to_string(k + 1));
        write_file(o.dot, text);
    }
    if (g_json) {
        json sc = json::array();
        for (const auto& s : r.scenarios)
            sc.push_back({{"graph", json::parse(write_graph(*s.graph))},
                          {"dsl", format_graph(*s.graph)},
                          {"context1", s.context1},
                          {"context2", s.context2}});
        std::cout << json{{"exists", r.exists}, {"scenarios", sc}, {"reasons", r.failures}}.dump(2) << "\n";
    } else if (r.exists) {
        std::cout << "scenario found: " << r.scenarios.size() << (r.scenarios.size() == 1 ? " graph" : " graphs") << "\n";
        for (const auto& s : r.scenarios) std::cout << "  " << format_graph(*s.graph) << "\n";
    } else {
        std::cout << "no scenario\n";
        for (const auto& f : r.failures) std::cout << "  reason: " << f << "\n";
    }
    return r.exists ? kTrue : kFalse;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Site-graph rewriting, causal posets and scenario queries"};
    app.require_subcommand(1);
    app.add_flag("--json", g_json, "Machine-readable output and errors");
    Options o;

    auto* validate = app.add_subcommand("validate", "Load and check a model and optionally a graph, trace or poset");
    validate->add_option("--model", o.model)->required();
    validate->add_option("--graph", o.graph);
    validate->add_option("--trace", o.trace);
    validate->add_option("--poset", o.poset);

    auto* apply = app.add_subcommand("apply", "Apply one rule by double pushout and print the transition");
    apply->add_option("--model", o.model)->required();
    apply->add_option("--rule", o.rule)->required();
    apply->add_option("--graph", o.graph, "State as a JSON graph file");
    apply->add_option("--state", o.state, "State in rule syntax");
    apply->add_option("--matching", o.matching, "Index of the matching to use");

    auto* influence = app.add_subcommand("influence", "Tabulate positive and negative influences between rules");
    influence->add_option("--model", o.model)->required();

    auto* causality = app.add_subcommand("causality", "List enablements and preventions realised in a trace");
    causality->add_option("--model", o.model);
    causality->add_option("--trace", o.trace)->required();

    auto* abstract = app.add_subcommand("abstract", "Abstract a trace into an event poset");
    abstract->add_option("--model", o.model);
    abstract->add_option("--trace", o.trace)->required();
    abstract->add_option("--dot", o.dot);

    auto* concretize = app.add_subcommand("concretize", "Enumerate traces whose abstraction is the poset");
    concretize->add_option("--model", o.model)->required();
    concretize->add_option("--poset", o.poset)->required();
    concretize->add_option("--max", o.max_solutions, "Stop after this many solutions");

    auto* checkc = app.add_subcommand("check", "Evaluate a formula over named posets");
    checkc->add_option("--model", o.model)->required();
    checkc->add_option("--poset", o.posets, "NAME=FILE or FILE")->required();
    checkc->add_option("--formula", o.formula)->required();

    auto* scenario = app.add_subcommand("scenario", "Search for a scenario graph between two events");
    scenario->add_option("--model", o.model)->required();
    scenario->add_option("--poset1", o.poset1)->required();
    scenario->add_option("--event1", o.event1)->required();
    scenario->add_option("--poset2", o.poset2)->required();
    scenario->add_option("--event2", o.event2)->required();
    scenario->add_option("--mode", o.mode)->check(CLI::IsMember({"prevention", "enablement"}));
    scenario->add_option("--dot", o.dot);
    scenario->add_flag("--all", o.all, "Collect every scenario up to isomorphism");

    for (auto* sub : app.get_subcommands({})) sub->add_flag("--json", g_json, "Machine-readable output and errors");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        if (g_json) {
            std::cout << json{{"error", "UsageError"}, {"message", e.what()}}.dump() << "\n";
        } else {
            std::cerr << "storycheck: " << e.what() << "\n" << "Run with --help for usage.\n";
        }
        return kUsage;
    }

    try {
        if (*validate) return cmd_validate(o);
        if (*apply) return cmd_apply(o);
        if (*influence) return cmd_influence(o);
        if (*causality) return cmd_causality(o);
        if (*abstract) return cmd_abstract(o);
        if (*concretize) return cmd_concretize(o);
        if (*checkc) return cmd_check(o);
        if (*scenario) return cmd_scenario(o);
    } catch (const std::exception& e) {
        return report_error(e);
    }
    return kUsage;
}
