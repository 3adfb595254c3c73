#include "storycheck/logic.hpp"

#include <cctype>
#include <functional>

namespace storycheck {

std::string to_string(Sort s) {
    switch (s) {
        case Sort::Event: return "event";
        case Sort::Poset: return "poset";
        default: return "unknown";
    }
}

namespace {

enum class Tok { Ident, Dot, LParen, RParen, LBrack, RBrack, Comma, Colon, Not, And, Or, Implies, Leq, Turn, Eq, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto starts = [&](const char* lit) { return s.compare(i, std::char_traits<char>::length(lit), lit) == 0; };
    struct Sym {
        const char* text;
        Tok kind;
        const char* word;
    };
    static const Sym syms[] = {
        {"->", Tok::Implies, nullptr}, {"=>", Tok::Implies, nullptr}, {"|-", Tok::Turn, nullptr},
        {"<=", Tok::Leq, nullptr},     {"&&", Tok::And, nullptr},     {"||", Tok::Or, nullptr},
        {"→", Tok::Implies, nullptr}, {"⊢", Tok::Turn, nullptr}, {"≤", Tok::Leq, nullptr},
        {"∧", Tok::And, nullptr}, {"∨", Tok::Or, nullptr},   {"¬", Tok::Not, nullptr},
        {"∃", Tok::Ident, "exists"}, {"∀", Tok::Ident, "forall"}, {"∈", Tok::Ident, "in"},
        {"(", Tok::LParen, nullptr},  {")", Tok::RParen, nullptr},   {"[", Tok::LBrack, nullptr},
        {"]", Tok::RBrack, nullptr},  {",", Tok::Comma, nullptr},    {":", Tok::Colon, nullptr},
        {".", Tok::Dot, nullptr},     {"!", Tok::Not, nullptr},      {"~", Tok::Not, nullptr},
        {"&", Tok::And, nullptr},     {"|", Tok::Or, nullptr},       {"=", Tok::Eq, nullptr},
    };
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (std::isalpha(c) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\''))
                ++j;
            out.push_back({Tok::Ident, s.substr(i, j - i), i});
            i = j;
            continue;
        }
        bool matched = false;
        for (const auto& sym : syms) {
            if (!starts(sym.text)) continue;
            out.push_back({sym.kind, sym.word ? sym.word : sym.text, i});
            i += std::char_traits<char>::length(sym.text);
            matched = true;
            break;
        }
        if (!matched) throw SyntaxError("unexpected character '" + std::string(1, s[i]) + "'", i);
    }
    out.push_back({Tok::End, "", s.size()});
    return out;
}

bool is_keyword(const std::string& w) {
    static const std::set<std::string> k = {"exists", "forall", "in", "label", "enables", "prevents",
                                            "true",   "false",  "event", "poset"};
    return k.count(w) != 0;
}

using MF = std::shared_ptr<Formula>;

class Parser {
public:
    Parser(const std::string& text) : toks_(lex(text)) {}

    MF parse() {
        MF f = implication();
        if (peek().kind != Tok::End) throw SyntaxError("unexpected '" + peek().text + "'", peek().pos);
        return f;
    }

private:
    std::vector<Token> toks_;
    std::size_t k_ = 0;

    const Token& peek(std::size_t off = 0) const { return toks_[std::min(k_ + off, toks_.size() - 1)]; }
    const Token& next() { return toks_[std::min(k_++, toks_.size() - 1)]; }
    bool is_word(const char* w, std::size_t off = 0) const {
        return peek(off).kind == Tok::Ident && peek(off).text == w;
    }
    const Token& expect(Tok kind, const char* what) {
        if (peek().kind != kind) throw SyntaxError(std::string("expected ") + what, peek().pos);
        return next();
    }
    void expect_word(const char* w) {
        if (!is_word(w)) throw SyntaxError(std::string("expected '") + w + "'", peek().pos);
        next();
    }

    static MF node(Formula::Kind k, std::size_t pos) {
        auto f = std::make_shared<Formula>();
        f->kind = k;
        f->position = pos;
        return f;
    }

    MF implication() {
        MF lhs = disjunction();
        if (peek().kind == Tok::Implies) {
            std::size_t pos = next().pos;
            MF f = node(Formula::Kind::Implies, pos);
            f->children = {lhs, implication()};
            return f;
        }
        return lhs;
    }

    MF disjunction() {
        MF lhs = conjunction();
        while (peek().kind == Tok::Or) {
            std::size_t pos = next().pos;
            MF f = node(Formula::Kind::Or, pos);
            f->children = {lhs, conjunction()};
            lhs = f;
        }
        return lhs;
    }

    MF conjunction() {
        MF lhs = unary();
        while (peek().kind == Tok::And) {
            std::size_t pos = next().pos;
            MF f = node(Formula::Kind::And, pos);
            f->children = {lhs, unary()};
            lhs = f;
        }
        return lhs;
    }

    MF unary() {
        if (peek().kind == Tok::Not) {
            std::size_t pos = next().pos;
            MF f = node(Formula::Kind::Not, pos);
            f->children = {unary()};
            return f;
        }
        if (is_word("exists") || is_word("forall")) {
            const Token& q = next();
            MF f = node(q.text == "exists" ? Formula::Kind::Exists : Formula::Kind::Forall, q.pos);
            const Token& v = expect(Tok::Ident, "a variable name");
            if (is_keyword(v.text)) throw SyntaxError("'" + v.text + "' cannot be a variable", v.pos);
            f->variable = v.text;
            if (peek().kind == Tok::Colon) {
                next();
                const Token& s = expect(Tok::Ident, "a sort (event or poset)");
                if (s.text == "event")
                    f->variable_sort = Sort::Event;
                else if (s.text == "poset")
                    f->variable_sort = Sort::Poset;
                else
                    throw SyntaxError("unknown sort '" + s.text + "'", s.pos);
            }
            expect(Tok::Dot, "'.' after the quantified variable");
            f->children = {implication()};
            return f;
        }
        return primary();
    }

    Term term() {
        const Token& t = expect(Tok::Ident, "a name");
        if (is_keyword(t.text)) throw SyntaxError("unexpected keyword '" + t.text + "'", t.pos);
        Term out{t.text, true, Sort::Unknown, t.pos};
        if (peek().kind == Tok::Dot && peek(1).kind == Tok::Ident && !is_keyword(peek(1).text)) {
            next();
            out.name += "." + next().text;
            out.variable = false;
        }
        return out;
    }

    MF primary() {
        const Token& t = peek();
        if (t.kind == Tok::LParen) {
            next();
            MF f = implication();
            expect(Tok::RParen, "')'");
            return f;
        }
        if (is_word("true") || is_word("false")) {
            next();
            return node(t.text == "true" ? Formula::Kind::True : Formula::Kind::False, t.pos);
        }
        if (is_word("label")) {
            next();
            MF f = node(Formula::Kind::LabelIs, t.pos);
            expect(Tok::LParen, "'(' after label");
            f->terms.push_back(term());
            expect(Tok::RParen, "')'");
            expect(Tok::Eq, "'=' after label(...)");
            const Token& r = expect(Tok::Ident, "a rule name");
            f->label = r.text;
            f->terms.push_back(Term{r.text, false, Sort::Unknown, r.pos});
            return f;
        }
        if (is_word("enables") || is_word("prevents")) {
            next();
            MF f = node(t.text == "enables" ? Formula::Kind::Enables : Formula::Kind::Prevents, t.pos);
            expect(Tok::LParen, "'('");
            for (int i = 0; i < 2; ++i) {
                if (i) expect(Tok::Comma, "','");
                f->terms.push_back(term());
                expect_word("in");
                f->terms.push_back(term());
            }
            expect(Tok::RParen, "')'");
            return f;
        }
        if (t.kind != Tok::Ident) throw SyntaxError("expected a formula", t.pos);
        Term lhs = term();
        if (is_word("in")) {
            next();
            MF f = node(Formula::Kind::Member, lhs.position);
            f->terms = {lhs, term()};
            return f;
        }
        if (peek().kind == Tok::Leq || peek().kind == Tok::Turn) {
            const Token& op = next();
            MF f = node(op.kind == Tok::Leq ? Formula::Kind::Leq : Formula::Kind::Turnstile, op.pos);
            if (peek().kind != Tok::LBrack)
                throw SortError("'" + op.text + "' needs the poset it is read in, as " + op.text + "[s]", op.pos);
            next();
            Term s = term();
            expect(Tok::RBrack, "']'");
            f->terms = {lhs, term(), s};
            return f;
        }
        throw SyntaxError("expected 'in', '<=[s]' or '|-[s]' after '" + lhs.name + "'", peek().pos);
    }
};

struct Resolver {
    const Vocabulary* vocab;
    std::vector<Sort> slots;
    std::vector<std::pair<std::string, int>> scope;
    std::map<std::string, int> free;
    std::map<const Formula*, int> quantifier_slot;
    std::vector<std::pair<Term*, int>> uses;

    int lookup_or_free(const std::string& name) {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->first == name) return it->second;
        return -1;
    }

    void unify(Term& t, Sort want) {
        if (!t.variable) {
            if (t.sort != want)
                throw SortError("'" + t.name + "' is " + (t.sort == Sort::Poset ? "a poset" : "an event") +
                                    " but " + (want == Sort::Poset ? "a poset" : "an event") + " is expected",
                                t.position);
            return;
        }
        int slot = -1;
        for (auto& [term, s] : uses)
            if (term == &t) slot = s;
        Sort& have = slots[slot];
        if (have == Sort::Unknown)
            have = want;
        else if (have != want)
            throw SortError("variable '" + t.name + "' is used both as " + to_string(have) + " and as " +
                                to_string(want),
                            t.position);
    }

    void bind_term(Term& t) {
        int slot = lookup_or_free(t.name);
        if (slot < 0 && t.variable && vocab) {
            if (vocab->posets.count(t.name)) {
                t.variable = false;
                t.sort = Sort::Poset;
                return;
            }
            auto it = vocab->events.find(t.name);
            if (it != vocab->events.end()) {
                if (it->second.size() > 1)
                    throw UnknownName("event name '" + t.name + "' is ambiguous; qualify it as poset.event");
                t.variable = false;
                t.sort = Sort::Event;
                t.name = it->second.front() + "." + t.name;
                return;
            }
        }
        if (!t.variable) {
            // Qualified event constant.
            t.sort = Sort::Event;
            if (vocab) {
                auto dot = t.name.find('.');
                std::string p = t.name.substr(0, dot), e = t.name.substr(dot + 1);
                auto it = vocab->events.find(e);
                bool ok = vocab->posets.count(p) && it != vocab->events.end() &&
                          std::find(it->second.begin(), it->second.end(), p) != it->second.end();
                if (!ok) throw UnknownName("no event '" + e + "' in poset '" + p + "'");
            }
            return;
        }
        if (slot < 0) {
            auto it = free.find(t.name);
            if (it == free.end()) {
                slot = static_cast<int>(slots.size());
                slots.push_back(Sort::Unknown);
                free[t.name] = slot;
            } else {
                slot = it->second;
            }
        }
        uses.emplace_back(&t, slot);
    }

    void walk(Formula& f) {
        using K = Formula::Kind;
        switch (f.kind) {
            case K::Exists:
            case K::Forall: {
                int slot = static_cast<int>(slots.size());
                slots.push_back(f.variable_sort);
                quantifier_slot[&f] = slot;
                scope.emplace_back(f.variable, slot);
                walk(const_cast<Formula&>(*f.children[0]));
                scope.pop_back();
                return;
            }
            case K::LabelIs: {
                bind_term(f.terms[0]);
                unify(f.terms[0], Sort::Event);
                if (vocab && !vocab->rules.count(f.label))
                    throw UnknownRuleName("unknown rule name '" + f.label + "' at offset " +
                                          std::to_string(f.terms[1].position));
                return;
            }
            case K::Member:
                for (auto& t : f.terms) bind_term(t);
                unify(f.terms[0], Sort::Event);
                unify(f.terms[1], Sort::Poset);
                return;
            case K::Leq:
            case K::Turnstile:
                for (auto& t : f.terms) bind_term(t);
                unify(f.terms[0], Sort::Event);
                unify(f.terms[1], Sort::Event);
                unify(f.terms[2], Sort::Poset);
                return;
            case K::Enables:
            case K::Prevents:
                for (auto& t : f.terms) bind_term(t);
                for (std::size_t i = 0; i < 4; ++i) unify(f.terms[i], i % 2 ? Sort::Poset : Sort::Event);
                return;
            default:
                for (auto& c : f.children) walk(const_cast<Formula&>(*c));
        }
    }

    void finish(Formula& f) {
        if (auto it = quantifier_slot.find(&f); it != quantifier_slot.end()) {
            f.variable_sort = slots[it->second] == Sort::Unknown ? Sort::Event : slots[it->second];
        }
        for (auto& c : f.children) finish(const_cast<Formula&>(*c));
    }

    void finish_terms() {
        for (auto& [t, slot] : uses) t->sort = slots[slot] == Sort::Unknown ? Sort::Event : slots[slot];
    }
};

void collect_free(const Formula& f, std::vector<std::string>& bound, std::map<std::string, Sort>& out) {
    using K = Formula::Kind;
    if (f.kind == K::Exists || f.kind == K::Forall) {
        bound.push_back(f.variable);
        collect_free(*f.children[0], bound, out);
        bound.pop_back();
        return;
    }
    std::size_t n = f.kind == K::LabelIs ? 1 : f.terms.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Term& t = f.terms[i];
        if (t.variable && std::find(bound.begin(), bound.end(), t.name) == bound.end()) out[t.name] = t.sort;
    }
    for (const auto& c : f.children) collect_free(*c, bound, out);
}

}  // namespace

std::set<std::string> Formula::free_variables() const {
    std::set<std::string> out;
    for (const auto& [n, s] : free_variable_sorts()) out.insert(n);
    return out;
}

std::map<std::string, Sort> Formula::free_variable_sorts() const {
    std::vector<std::string> bound;
    std::map<std::string, Sort> out;
    collect_free(*this, bound, out);
    return out;
}

std::string Formula::to_string() const {
    using K = Formula::Kind;
    auto c = [&](std::size_t i) { return children[i]->to_string(); };
    switch (kind) {
        case K::True: return "true";
        case K::False: return "false";
        case K::Exists:
        case K::Forall:
            return std::string(kind == K::Exists ? "exists " : "forall ") + variable + ":" +
                   storycheck::to_string(variable_sort) + ". " + c(0);
        case K::Not: return "!" + c(0);
        case K::And: return "(" + c(0) + " & " + c(1) + ")";
        case K::Or: return "(" + c(0) + " | " + c(1) + ")";
        case K::Implies: return "(" + c(0) + " -> " + c(1) + ")";
        case K::Member: return terms[0].name + " in " + terms[1].name;
        case K::LabelIs: return "label(" + terms[0].name + ") = " + label;
        case K::Leq: return terms[0].name + " <=[" + terms[2].name + "] " + terms[1].name;
        case K::Turnstile: return terms[0].name + " |-[" + terms[2].name + "] " + terms[1].name;
        case K::Enables:
        case K::Prevents:
            return std::string(kind == K::Enables ? "enables(" : "prevents(") + terms[0].name + " in " + terms[1].name +
                   ", " + terms[2].name + " in " + terms[3].name + ")";
    }
    return "?";
}

FormulaPtr parse_formula(const std::string& text, const Vocabulary* vocabulary) {
    Parser p(text);
    MF f = p.parse();
    Resolver r{vocabulary, {}, {}, {}, {}, {}};
    r.walk(*f);
    r.finish(*f);
    r.finish_terms();
    return f;
}

Universe::Universe(const Model& model, std::vector<Poset> posets, ScenarioOptions options)
    : model_(model), posets_(std::move(posets)), options_(options) {
    std::set<std::string> names;
    for (const auto& p : posets_) {
        if (!names.insert(p.name).second) throw InputError("two posets are named '" + p.name + "'");
        for (const auto& l : p.labels) model_.rule(l);
    }
}

Vocabulary Universe::vocabulary() const {
    Vocabulary v;
    for (const auto& p : posets_) {
        v.posets.insert(p.name);
        for (const auto& e : p.events) v.events[e].push_back(p.name);
    }
    for (const auto& r : model_.rules()) v.rules.insert(r->name);
    return v;
}

std::optional<Value> Universe::constant(const std::string& name) const {
    for (std::size_t i = 0; i < posets_.size(); ++i)
        if (posets_[i].name == name) return Value{Sort::Poset, {}, i};
    auto dot = name.find('.');
    std::optional<Value> found;
    for (std::size_t i = 0; i < posets_.size(); ++i) {
        std::string e = name;
        if (dot != std::string::npos) {
            if (name.substr(0, dot) != posets_[i].name) continue;
            e = name.substr(dot + 1);
        }
        if (auto k = posets_[i].find(e)) {
            if (found) return std::nullopt;
            found = Value{Sort::Event, EventValue{i, *k}, 0};
        }
    }
    return found;
}

std::vector<Value> Universe::domain(Sort s) const {
    std::vector<Value> out;
    for (std::size_t i = 0; i < posets_.size(); ++i) {
        if (s == Sort::Poset) {
            out.push_back(Value{Sort::Poset, {}, i});
            continue;
        }
        for (std::size_t k = 0; k < posets_[i].size(); ++k) out.push_back(Value{Sort::Event, EventValue{i, k}, 0});
    }
    return out;
}

bool Universe::scenario(Polarity mode, EventValue e1, EventValue e2) const {
    auto key = std::make_tuple(mode == Polarity::Positive ? 1 : 0, e1, e2);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    bool r = find_scenario(posets_[e1.poset], e1.event, posets_[e2.poset], e2.event, mode, model_, options_).exists;
    std::lock_guard<std::mutex> lock(mutex_);
    cache_[key] = r;
    return r;
}

std::string Universe::describe(const Value& v) const {
    if (v.sort == Sort::Poset) return posets_[v.poset].name;
    return posets_[v.event.poset].name + "." + posets_[v.event.poset].events[v.event.event];
}

namespace {

Value value_of(const Term& t, const Universe& u, const Valuation& v) {
    if (t.variable) {
        auto it = v.find(t.name);
        if (it == v.end()) throw InputError("free variable '" + t.name + "' has no value");
        return it->second;
    }
    auto c = u.constant(t.name);
    if (!c) throw UnknownName("unknown constant '" + t.name + "'");
    return *c;
}

bool eval(const Formula& f, const Universe& u, Valuation& v) {
    using K = Formula::Kind;
    switch (f.kind) {
        case K::True: return true;
        case K::False: return false;
        case K::Not: return !eval(*f.children[0], u, v);
        case K::And: return eval(*f.children[0], u, v) && eval(*f.children[1], u, v);
        case K::Or: return eval(*f.children[0], u, v) || eval(*f.children[1], u, v);
        case K::Implies: return !eval(*f.children[0], u, v) || eval(*f.children[1], u, v);
        case K::Exists:
        case K::Forall: {
            bool exists = f.kind == K::Exists;
            std::optional<Value> saved;
            if (auto it = v.find(f.variable); it != v.end()) saved = it->second;
            bool result = !exists;
            for (const auto& val : u.domain(f.variable_sort)) {
                v[f.variable] = val;
                if (eval(*f.children[0], u, v) == exists) {
                    result = exists;
                    break;
                }
            }
            if (saved)
                v[f.variable] = *saved;
            else
                v.erase(f.variable);
            return result;
        }
        case K::Member: {
            Value e = value_of(f.terms[0], u, v), s = value_of(f.terms[1], u, v);
            return e.event.poset == s.poset;
        }
        case K::LabelIs: {
            Value e = value_of(f.terms[0], u, v);
            return u.posets()[e.event.poset].labels[e.event.event] == f.label;
        }
        case K::Leq:
        case K::Turnstile: {
            Value a = value_of(f.terms[0], u, v), b = value_of(f.terms[1], u, v), s = value_of(f.terms[2], u, v);
            if (a.event.poset != s.poset || b.event.poset != s.poset) return false;
            const Poset& p = u.posets()[s.poset];
            return f.kind == K::Leq ? p.leq(a.event.event, b.event.event) : p.turnstile(a.event.event, b.event.event);
        }
        case K::Enables:
        case K::Prevents: {
            Value e1 = value_of(f.terms[0], u, v), s1 = value_of(f.terms[1], u, v);
            Value e2 = value_of(f.terms[2], u, v), s2 = value_of(f.terms[3], u, v);
            if (e1.event.poset != s1.poset || e2.event.poset != s2.poset) return false;
            return u.scenario(f.kind == K::Enables ? Polarity::Positive : Polarity::Negative, e1.event, e2.event);
        }
    }
    return false;
}

}  // namespace

bool evaluate(const Formula& f, const Universe& u, const Valuation& v) {
    Valuation work = v;
    return eval(f, u, work);
}

CheckResult check(const Formula& f, const Universe& u) {
    auto fv = f.free_variable_sorts();
    if (fv.empty()) return CheckResult{evaluate(f, u), std::nullopt};
    std::vector<std::pair<std::string, std::vector<Value>>> dims;
    for (const auto& [name, sort] : fv) dims.emplace_back(name, u.domain(sort));
    Valuation v;
    std::function<bool(std::size_t)> rec = [&](std::size_t k) {
        if (k == dims.size()) return evaluate(f, u, v);
        for (const auto& val : dims[k].second) {
            v[dims[k].first] = val;
            if (rec(k + 1)) return true;
        }
        v.erase(dims[k].first);
        return false;
    };
    if (rec(0)) return CheckResult{true, v};
    return CheckResult{false, std::nullopt};
}

}  // namespace storycheck
