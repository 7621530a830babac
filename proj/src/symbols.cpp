#include "jsonvpa/symbols.hpp"

#include <algorithm>

#include <json.hpp>

namespace jsonvpa {

std::string prim_name(Prim p) {
    switch (p) {
    case Prim::True: return "true";
    case Prim::False: return "false";
    case Prim::Null: return "null";
    case Prim::Str: return "s";
    case Prim::Num: return "n";
    case Prim::Int: return "i";
    case Prim::Enum: return "e";
    }
    return "?";
}

std::optional<Prim> prim_from_name(std::string_view name) {
    static const std::pair<std::string_view, Prim> table[] = {
        {"true", Prim::True}, {"false", Prim::False}, {"null", Prim::Null},
        {"s", Prim::Str},     {"n", Prim::Num},       {"i", Prim::Int},
        {"e", Prim::Enum},
    };
    for (const auto& [n, p] : table) {
        if (n == name) {
            return p;
        }
    }
    return std::nullopt;
}

PushdownAlphabet::PushdownAlphabet(std::vector<std::string> ordered_keys,
                                   std::vector<std::string> enum_literals)
    : keys_(std::move(ordered_keys)), enum_literals_(std::move(enum_literals)) {
    for (std::size_t i = 0; i < keys_.size(); ++i) {
        for (std::size_t j = i + 1; j < keys_.size(); ++j) {
            if (keys_[i] == keys_[j]) {
                throw std::invalid_argument("duplicate key in alphabet: " + keys_[i]);
            }
        }
    }
    std::sort(enum_literals_.begin(), enum_literals_.end());
    enum_literals_.erase(std::unique(enum_literals_.begin(), enum_literals_.end()),
                         enum_literals_.end());
}

std::optional<std::uint32_t> PushdownAlphabet::key_id(std::string_view name) const {
    for (std::size_t i = 0; i < keys_.size(); ++i) {
        if (keys_[i] == name) {
            return static_cast<std::uint32_t>(i);
        }
    }
    return std::nullopt;
}

bool PushdownAlphabet::is_enum_literal(std::string_view canonical_text) const {
    return std::binary_search(enum_literals_.begin(), enum_literals_.end(), canonical_text);
}

std::size_t PushdownAlphabet::internal_index(const AbstractSymbol& s) const {
    switch (s.tag()) {
    case AbstractSymbol::Tag::Key: return s.key_id();
    case AbstractSymbol::Tag::Primitive:
        return keys_.size() + static_cast<std::size_t>(s.prim_value());
    case AbstractSymbol::Tag::Comma: return keys_.size() + kNumPrims;
    default: throw std::logic_error("internal_index() on non-internal symbol");
    }
}

AbstractSymbol PushdownAlphabet::internal_at(std::size_t index) const {
    if (index < keys_.size()) {
        return AbstractSymbol::key(static_cast<std::uint32_t>(index));
    }
    index -= keys_.size();
    if (index < kNumPrims) {
        return AbstractSymbol::prim(static_cast<Prim>(index));
    }
    if (index == kNumPrims) {
        return AbstractSymbol::comma();
    }
    throw std::out_of_range("internal symbol index out of range");
}

std::size_t PushdownAlphabet::call_index(const AbstractSymbol& s) {
    switch (s.tag()) {
    case AbstractSymbol::Tag::LBrace: return 0;
    case AbstractSymbol::Tag::LBracket: return 1;
    default: throw std::logic_error("call_index() on non-call symbol");
    }
}

std::size_t PushdownAlphabet::return_index(const AbstractSymbol& s) {
    switch (s.tag()) {
    case AbstractSymbol::Tag::RBrace: return 0;
    case AbstractSymbol::Tag::RBracket: return 1;
    default: throw std::logic_error("return_index() on non-return symbol");
    }
}

std::string PushdownAlphabet::symbol_name(const AbstractSymbol& s) const {
    switch (s.tag()) {
    case AbstractSymbol::Tag::LBrace: return "{";
    case AbstractSymbol::Tag::LBracket: return "[";
    case AbstractSymbol::Tag::RBrace: return "}";
    case AbstractSymbol::Tag::RBracket: return "]";
    case AbstractSymbol::Tag::Comma: return "#";
    case AbstractSymbol::Tag::Primitive: return prim_name(s.prim_value());
    case AbstractSymbol::Tag::Key: return "key:" + key_name(s.key_id());
    }
    return "?";
}

std::optional<AbstractSymbol> PushdownAlphabet::symbol_from_name(std::string_view name) const {
    if (name == "{") return AbstractSymbol::lbrace();
    if (name == "[") return AbstractSymbol::lbracket();
    if (name == "}") return AbstractSymbol::rbrace();
    if (name == "]") return AbstractSymbol::rbracket();
    if (name == "#") return AbstractSymbol::comma();
    if (auto p = prim_from_name(name)) return AbstractSymbol::prim(*p);
    if (name.substr(0, 4) == "key:") {
        if (auto id = key_id(name.substr(4))) return AbstractSymbol::key(*id);
    }
    return std::nullopt;
}

std::string PushdownAlphabet::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["keys"] = keys_;
    j["enum_literals"] = enum_literals_;
    return j.dump();
}

PushdownAlphabet PushdownAlphabet::from_json(std::string_view text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("version") || j["version"].get<int>() != 1) {
        throw std::runtime_error("unsupported alphabet format version");
    }
    return PushdownAlphabet(j["keys"].get<std::vector<std::string>>(),
                            j.value("enum_literals", std::vector<std::string>{}));
}

long balance(const Word& word) {
    long b = 0;
    for (const auto& s : word) {
        switch (s.kind()) {
        case SymbolKind::Call: ++b; break;
        case SymbolKind::Return: --b; break;
        case SymbolKind::Internal: break;
        }
    }
    return b;
}

bool is_well_matched(const Word& word) {
    std::vector<AbstractSymbol> pending;
    for (const auto& s : word) {
        switch (s.kind()) {
        case SymbolKind::Call: pending.push_back(s); break;
        case SymbolKind::Return:
            if (pending.empty() || pending.back().matching() != s) {
                return false;
            }
            pending.pop_back();
            break;
        case SymbolKind::Internal: break;
        }
    }
    return pending.empty();
}

std::size_t depth(const Word& word) {
    if (!is_well_matched(word)) {
        throw NotWellMatchedError{};
    }
    long b = 0;
    long max_b = 0;
    for (const auto& s : word) {
        if (s.kind() == SymbolKind::Call) {
            ++b;
        } else if (s.kind() == SymbolKind::Return) {
            --b;
        }
        max_b = std::max(max_b, b);
    }
    return static_cast<std::size_t>(max_b);
}

std::string word_to_string(const Word& word, const PushdownAlphabet& alphabet) {
    std::string out;
    for (const auto& s : word) {
        if (!out.empty()) {
            out += ' ';
        }
        out += alphabet.symbol_name(s);
    }
    return out;
}

} // namespace jsonvpa
