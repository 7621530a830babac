#include "jsonvpa/grammar.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace jsonvpa {

Production Production::primitive(Prim v) {
    Production p;
    p.kind = Kind::Primitive;
    p.prim = v;
    return p;
}

Production Production::object(std::vector<std::pair<KeyId, NonterminalId>> pairs) {
    std::set<KeyId> seen;
    for (const auto& [k, nt] : pairs) {
        (void)nt;
        if (!seen.insert(k).second) {
            throw IllFormedGrammarError("duplicate key in object production");
        }
    }
    Production p;
    p.kind = Kind::Object;
    p.pairs = std::move(pairs);
    return p;
}

Production Production::any_object(NonterminalId element) {
    Production p;
    p.kind = Kind::AnyObject;
    p.element = element;
    return p;
}

Production Production::array_star(NonterminalId element) {
    Production p;
    p.kind = Kind::ArrayStar;
    p.element = element;
    return p;
}

Production Production::array_fixed(NonterminalId element, std::size_t count) {
    Production p;
    p.kind = Kind::ArrayFixed;
    p.element = element;
    p.count = count;
    return p;
}

Production Production::or_of(std::vector<NonterminalId> operands) {
    Production p;
    p.kind = Kind::Or;
    p.operands = std::move(operands);
    return p;
}

Production Production::and_of(std::vector<NonterminalId> operands) {
    Production p;
    p.kind = Kind::And;
    p.operands = std::move(operands);
    return p;
}

Production Production::not_of(NonterminalId operand) {
    Production p;
    p.kind = Kind::Not;
    p.operands = {operand};
    return p;
}

NonterminalId Grammar::add_nonterminal(std::string name) {
    names_.push_back(std::move(name));
    productions_.emplace_back();
    return static_cast<NonterminalId>(names_.size() - 1);
}

void Grammar::add_production(NonterminalId nt, Production p) {
    productions_.at(nt).push_back(std::move(p));
}

void Grammar::mark_axiom(NonterminalId nt) {
    if (std::find(axioms_.begin(), axioms_.end(), nt) == axioms_.end()) {
        axioms_.push_back(nt);
    }
}

std::optional<NonterminalId> Grammar::find(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return static_cast<NonterminalId>(i);
    }
    return std::nullopt;
}

DocumentTree::DocumentTree(Object o) : value_(std::move(o)) {
    std::set<KeyId> seen;
    for (const auto& [k, v] : std::get<Object>(value_)) {
        (void)v;
        if (!seen.insert(k).second) {
            throw std::invalid_argument("duplicate key in object");
        }
    }
}

DocumentTree DocumentTree::object(Object pairs) { return DocumentTree(std::move(pairs)); }

Word DocumentTree::to_word() const {
    Word out;
    if (is_primitive()) {
        out.push_back(AbstractSymbol::prim(prim()));
        return out;
    }
    if (is_object()) {
        out.push_back(AbstractSymbol::lbrace());
        bool first = true;
        for (const auto& [k, v] : pairs()) {
            if (!first) out.push_back(AbstractSymbol::comma());
            first = false;
            out.push_back(AbstractSymbol::key(k));
            Word inner = v.to_word();
            out.insert(out.end(), inner.begin(), inner.end());
        }
        out.push_back(AbstractSymbol::rbrace());
        return out;
    }
    out.push_back(AbstractSymbol::lbracket());
    bool first = true;
    for (const auto& v : elements()) {
        if (!first) out.push_back(AbstractSymbol::comma());
        first = false;
        Word inner = v.to_word();
        out.insert(out.end(), inner.begin(), inner.end());
    }
    out.push_back(AbstractSymbol::rbracket());
    return out;
}

std::size_t DocumentTree::nesting_depth() const {
    if (is_primitive()) return 0;
    std::size_t inner = 0;
    if (is_object()) {
        for (const auto& [k, v] : pairs()) {
            (void)k;
            inner = std::max(inner, v.nesting_depth());
        }
    } else {
        for (const auto& v : elements()) {
            inner = std::max(inner, v.nesting_depth());
        }
    }
    return inner + 1;
}

namespace {

// Recursive descent over the abstract word; pos advances past the value.
std::optional<DocumentTree> parse_value_at(const Word& w, std::size_t& pos);

std::optional<DocumentTree> parse_object_at(const Word& w, std::size_t& pos) {
    // w[pos] == '{' already consumed by caller convention below.
    DocumentTree::Object pairs;
    std::set<KeyId> seen;
    if (pos < w.size() && w[pos].tag() == AbstractSymbol::Tag::RBrace) {
        ++pos;
        return DocumentTree::object(std::move(pairs));
    }
    while (true) {
        if (pos >= w.size() || !w[pos].is_key()) return std::nullopt;
        KeyId k = w[pos].key_id();
        if (!seen.insert(k).second) return std::nullopt;
        ++pos;
        auto v = parse_value_at(w, pos);
        if (!v) return std::nullopt;
        pairs.emplace_back(k, std::move(*v));
        if (pos >= w.size()) return std::nullopt;
        if (w[pos].tag() == AbstractSymbol::Tag::RBrace) {
            ++pos;
            return DocumentTree::object(std::move(pairs));
        }
        if (w[pos].tag() != AbstractSymbol::Tag::Comma) return std::nullopt;
        ++pos;
    }
}

std::optional<DocumentTree> parse_array_at(const Word& w, std::size_t& pos) {
    DocumentTree::Array elems;
    if (pos < w.size() && w[pos].tag() == AbstractSymbol::Tag::RBracket) {
        ++pos;
        return DocumentTree::array(std::move(elems));
    }
    while (true) {
        auto v = parse_value_at(w, pos);
        if (!v) return std::nullopt;
        elems.push_back(std::move(*v));
        if (pos >= w.size()) return std::nullopt;
        if (w[pos].tag() == AbstractSymbol::Tag::RBracket) {
            ++pos;
            return DocumentTree::array(std::move(elems));
        }
        if (w[pos].tag() != AbstractSymbol::Tag::Comma) return std::nullopt;
        ++pos;
    }
}

std::optional<DocumentTree> parse_value_at(const Word& w, std::size_t& pos) {
    if (pos >= w.size()) return std::nullopt;
    const AbstractSymbol& s = w[pos];
    switch (s.tag()) {
    case AbstractSymbol::Tag::Primitive: ++pos; return DocumentTree::primitive(s.prim_value());
    case AbstractSymbol::Tag::LBrace: ++pos; return parse_object_at(w, pos);
    case AbstractSymbol::Tag::LBracket: ++pos; return parse_array_at(w, pos);
    default: return std::nullopt;
    }
}

} // namespace

std::optional<DocumentTree> DocumentTree::parse_document(const Word& word) {
    if (word.empty() || word.front().tag() != AbstractSymbol::Tag::LBrace) return std::nullopt;
    std::size_t pos = 0;
    auto v = parse_value_at(word, pos);
    if (!v || pos != word.size()) return std::nullopt;
    return v;
}

std::optional<DocumentTree> DocumentTree::parse_value(const Word& word) {
    std::size_t pos = 0;
    auto v = parse_value_at(word, pos);
    if (!v || pos != word.size()) return std::nullopt;
    return v;
}

namespace {

bool eval_nt(const Grammar& g, NonterminalId nt, const DocumentTree& doc, std::size_t* counter);

bool eval_production(const Grammar& g, const Production& p, const DocumentTree& doc,
                     std::size_t* counter) {
    if (counter) ++*counter;
    switch (p.kind) {
    case Production::Kind::Primitive: return doc.is_primitive() && doc.prim() == p.prim;
    case Production::Kind::Object: {
        if (!doc.is_object()) return false;
        // Required-key short-circuit: compare key sets before validating any
        // pair.
        if (doc.pairs().size() != p.pairs.size()) return false;
        for (const auto& [k, nt] : p.pairs) {
            (void)nt;
            bool present = false;
            for (const auto& [dk, dv] : doc.pairs()) {
                (void)dv;
                if (dk == k) {
                    present = true;
                    break;
                }
            }
            if (!present) return false;
        }
        for (const auto& [k, nt] : p.pairs) {
            const DocumentTree* value = nullptr;
            for (const auto& [dk, dv] : doc.pairs()) {
                if (dk == k) {
                    value = &dv;
                    break;
                }
            }
            if (!eval_nt(g, nt, *value, counter)) return false;
        }
        return true;
    }
    case Production::Kind::AnyObject: {
        if (!doc.is_object()) return false;
        for (const auto& [k, v] : doc.pairs()) {
            (void)k;
            if (!eval_nt(g, p.element, v, counter)) return false;
        }
        return true;
    }
    case Production::Kind::ArrayStar: {
        if (!doc.is_array()) return false;
        for (const auto& v : doc.elements()) {
            if (!eval_nt(g, p.element, v, counter)) return false;
        }
        return true;
    }
    case Production::Kind::ArrayFixed: {
        if (!doc.is_array()) return false;
        if (doc.elements().size() != p.count) return false;
        for (const auto& v : doc.elements()) {
            if (!eval_nt(g, p.element, v, counter)) return false;
        }
        return true;
    }
    case Production::Kind::Or:
        for (NonterminalId nt : p.operands) {
            if (eval_nt(g, nt, doc, counter)) return true;
        }
        return false;
    case Production::Kind::And:
        for (NonterminalId nt : p.operands) {
            if (!eval_nt(g, nt, doc, counter)) return false;
        }
        return true;
    case Production::Kind::Not: return !eval_nt(g, p.operands.front(), doc, counter);
    }
    return false;
}

bool eval_nt(const Grammar& g, NonterminalId nt, const DocumentTree& doc, std::size_t* counter) {
    if (counter) ++*counter;
    for (const Production& p : g.productions(nt)) {
        if (eval_production(g, p, doc, counter)) return true;
    }
    return false;
}

} // namespace

bool satisfies(const Grammar& grammar, NonterminalId nt, const DocumentTree& doc) {
    return eval_nt(grammar, nt, doc, nullptr);
}

ClassicalResult classical_validate(const Grammar& grammar, const DocumentTree& doc) {
    std::size_t counter = 0;
    bool ok = false;
    for (NonterminalId axiom : grammar.axioms()) {
        if (eval_nt(grammar, axiom, doc, &counter)) {
            ok = true;
            break;
        }
    }
    return {ok, counter};
}

ClassicalResult classical_validate_word(const Grammar& grammar, const Word& word) {
    auto doc = DocumentTree::parse_document(word);
    if (!doc) return {false, 0};
    return classical_validate(grammar, *doc);
}

Grammar universal_grammar(const PushdownAlphabet& alphabet) {
    Grammar g(alphabet);
    NonterminalId any = g.add_nonterminal("Any");
    NonterminalId obj = g.add_nonterminal("AnyObj");
    NonterminalId other = g.add_nonterminal("AnyNonObj");
    g.add_production(obj, Production::any_object(any));
    for (std::size_t i = 0; i < kNumPrims; ++i) {
        g.add_production(other, Production::primitive(static_cast<Prim>(i)));
    }
    g.add_production(other, Production::array_star(any));
    g.add_production(any, Production::or_of({obj, other}));
    g.mark_axiom(obj);
    return g;
}

WellFormedness check_well_formed(const Grammar& grammar) {
    // References must exist.
    auto check_ref = [&](NonterminalId nt) { return nt < grammar.num_nonterminals(); };
    for (NonterminalId nt = 0; nt < grammar.num_nonterminals(); ++nt) {
        for (const auto& p : grammar.productions(nt)) {
            bool ok = true;
            switch (p.kind) {
            case Production::Kind::Object:
                for (const auto& [k, ref] : p.pairs) {
                    (void)k;
                    ok = ok && check_ref(ref);
                    if (k >= grammar.alphabet().num_keys()) {
                        return {false, "production of " + grammar.name(nt) +
                                           " references a key outside the alphabet"};
                    }
                }
                break;
            case Production::Kind::AnyObject:
            case Production::Kind::ArrayStar:
            case Production::Kind::ArrayFixed: ok = check_ref(p.element); break;
            case Production::Kind::Or:
            case Production::Kind::And:
            case Production::Kind::Not:
                for (NonterminalId ref : p.operands) ok = ok && check_ref(ref);
                break;
            case Production::Kind::Primitive: break;
            }
            if (!ok) {
                return {false, "production of " + grammar.name(nt) +
                                   " references a missing nonterminal"};
            }
        }
    }

    // Cycles through Boolean productions only. Structural productions break
    // the chain, so only Or/And/Not edges participate.
    enum class Color { White, Grey, Black };
    std::vector<Color> color(grammar.num_nonterminals(), Color::White);
    std::string cycle;
    std::function<bool(NonterminalId)> dfs = [&](NonterminalId nt) {
        color[nt] = Color::Grey;
        for (const auto& p : grammar.productions(nt)) {
            if (p.kind != Production::Kind::Or && p.kind != Production::Kind::And &&
                p.kind != Production::Kind::Not) {
                continue;
            }
            for (NonterminalId ref : p.operands) {
                if (color[ref] == Color::Grey) {
                    cycle = grammar.name(nt) + " -> " + grammar.name(ref);
                    return false;
                }
                if (color[ref] == Color::White && !dfs(ref)) return false;
            }
        }
        color[nt] = Color::Black;
        return true;
    };
    for (NonterminalId nt = 0; nt < grammar.num_nonterminals(); ++nt) {
        if (color[nt] == Color::White && !dfs(nt)) {
            return {false, "cyclic Boolean definition: " + cycle};
        }
    }

    // Axioms must be able to produce objects.
    if (grammar.axioms().empty()) {
        return {false, "grammar has no axiom"};
    }
    std::function<bool(NonterminalId, std::set<NonterminalId>&)> object_producing =
        [&](NonterminalId nt, std::set<NonterminalId>& visiting) {
            if (!visiting.insert(nt).second) return false;
            for (const auto& p : grammar.productions(nt)) {
                switch (p.kind) {
                case Production::Kind::Object:
                case Production::Kind::AnyObject: return true;
                case Production::Kind::Or:
                case Production::Kind::And:
                    for (NonterminalId ref : p.operands) {
                        if (object_producing(ref, visiting)) return true;
                    }
                    break;
                default: break;
                }
            }
            return false;
        };
    for (NonterminalId axiom : grammar.axioms()) {
        std::set<NonterminalId> visiting;
        if (!object_producing(axiom, visiting)) {
            return {false, "axiom " + grammar.name(axiom) + " cannot produce an object"};
        }
    }
    return {true, ""};
}

std::string Grammar::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["alphabet"] = nlohmann::json::parse(alphabet_.to_json());
    j["axioms"] = axioms_;
    auto& nts = j["nonterminals"] = nlohmann::json::array();
    for (NonterminalId nt = 0; nt < num_nonterminals(); ++nt) {
        nlohmann::json jn;
        jn["name"] = names_[nt];
        auto& ps = jn["productions"] = nlohmann::json::array();
        for (const auto& p : productions_[nt]) {
            nlohmann::json jp;
            switch (p.kind) {
            case Production::Kind::Primitive:
                jp["kind"] = "primitive";
                jp["value"] = prim_name(p.prim);
                break;
            case Production::Kind::Object: {
                jp["kind"] = "object";
                auto& pairs = jp["pairs"] = nlohmann::json::array();
                for (const auto& [k, ref] : p.pairs) pairs.push_back({k, ref});
                break;
            }
            case Production::Kind::AnyObject:
                jp["kind"] = "any_object";
                jp["element"] = p.element;
                break;
            case Production::Kind::ArrayStar:
                jp["kind"] = "array_star";
                jp["element"] = p.element;
                break;
            case Production::Kind::ArrayFixed:
                jp["kind"] = "array_fixed";
                jp["element"] = p.element;
                jp["count"] = p.count;
                break;
            case Production::Kind::Or:
                jp["kind"] = "or";
                jp["operands"] = p.operands;
                break;
            case Production::Kind::And:
                jp["kind"] = "and";
                jp["operands"] = p.operands;
                break;
            case Production::Kind::Not:
                jp["kind"] = "not";
                jp["operands"] = p.operands;
                break;
            }
            ps.push_back(std::move(jp));
        }
        nts.push_back(std::move(jn));
    }
    return j.dump();
}

Grammar Grammar::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("version", 0) != 1) {
        throw std::runtime_error("unsupported grammar format version");
    }
    Grammar g(PushdownAlphabet::from_json(j["alphabet"].dump()));
    for (const auto& jn : j["nonterminals"]) {
        g.add_nonterminal(jn["name"].get<std::string>());
    }
    NonterminalId nt = 0;
    for (const auto& jn : j["nonterminals"]) {
        for (const auto& jp : jn["productions"]) {
            std::string kind = jp["kind"].get<std::string>();
            if (kind == "primitive") {
                auto p = prim_from_name(jp["value"].get<std::string>());
                if (!p) throw std::runtime_error("bad primitive in grammar json");
                g.add_production(nt, Production::primitive(*p));
            } else if (kind == "object") {
                std::vector<std::pair<KeyId, NonterminalId>> pairs;
                for (const auto& pr : jp["pairs"]) {
                    pairs.emplace_back(pr[0].get<KeyId>(), pr[1].get<NonterminalId>());
                }
                g.add_production(nt, Production::object(std::move(pairs)));
            } else if (kind == "any_object") {
                g.add_production(nt, Production::any_object(jp["element"].get<NonterminalId>()));
            } else if (kind == "array_star") {
                g.add_production(nt, Production::array_star(jp["element"].get<NonterminalId>()));
            } else if (kind == "array_fixed") {
                g.add_production(nt, Production::array_fixed(jp["element"].get<NonterminalId>(),
                                                             jp["count"].get<std::size_t>()));
            } else if (kind == "or") {
                g.add_production(
                    nt, Production::or_of(jp["operands"].get<std::vector<NonterminalId>>()));
            } else if (kind == "and") {
                g.add_production(
                    nt, Production::and_of(jp["operands"].get<std::vector<NonterminalId>>()));
            } else if (kind == "not") {
                g.add_production(
                    nt, Production::not_of(jp["operands"].get<std::vector<NonterminalId>>().at(0)));
            } else {
                throw std::runtime_error("unknown production kind: " + kind);
            }
        }
        ++nt;
    }
    for (NonterminalId ax : j["axioms"].get<std::vector<NonterminalId>>()) {
        g.mark_axiom(ax);
    }
    return g;
}

} // namespace jsonvpa
