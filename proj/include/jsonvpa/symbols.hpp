#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jsonvpa {

using KeyId = std::uint32_t;

/// Symbol class of the pushdown alphabet: calls push, returns pop,
/// internals leave the stack untouched.
enum class SymbolKind : std::uint8_t { Call, Return, Internal };

/// Abstract primitive values. Strings collapse to Str, numbers to Num
/// (Int when the literal is syntactically integral), enum members to Enum.
enum class Prim : std::uint8_t { True, False, Null, Str, Num, Int, Enum };

inline constexpr std::size_t kNumPrims = 7;

/// One symbol of an abstract JSON document.
///
/// Calls are `{` and `[`, returns `}` and `]`; everything else is internal:
/// the comma `#`, a key (index into the alphabet's key list, the key and its
/// colon fused into one symbol) or an abstract primitive value.
class AbstractSymbol {
  public:
    enum class Tag : std::uint8_t { LBrace, LBracket, RBrace, RBracket, Comma, Key, Primitive };

    static AbstractSymbol lbrace() { return AbstractSymbol{Tag::LBrace, 0}; }
    static AbstractSymbol lbracket() { return AbstractSymbol{Tag::LBracket, 0}; }
    static AbstractSymbol rbrace() { return AbstractSymbol{Tag::RBrace, 0}; }
    static AbstractSymbol rbracket() { return AbstractSymbol{Tag::RBracket, 0}; }
    static AbstractSymbol comma() { return AbstractSymbol{Tag::Comma, 0}; }
    static AbstractSymbol key(std::uint32_t key_id) { return AbstractSymbol{Tag::Key, key_id}; }
    static AbstractSymbol prim(Prim p) {
        return AbstractSymbol{Tag::Primitive, static_cast<std::uint32_t>(p)};
    }

    Tag tag() const { return tag_; }

    SymbolKind kind() const {
        switch (tag_) {
        case Tag::LBrace:
        case Tag::LBracket: return SymbolKind::Call;
        case Tag::RBrace:
        case Tag::RBracket: return SymbolKind::Return;
        default: return SymbolKind::Internal;
        }
    }

    bool is_call() const { return kind() == SymbolKind::Call; }
    bool is_return() const { return kind() == SymbolKind::Return; }
    bool is_internal() const { return kind() == SymbolKind::Internal; }
    bool is_key() const { return tag_ == Tag::Key; }
    bool is_prim() const { return tag_ == Tag::Primitive; }

    std::uint32_t key_id() const { return payload_; }
    Prim prim_value() const { return static_cast<Prim>(payload_); }

    /// The matching return for a call and vice versa.
    AbstractSymbol matching() const {
        switch (tag_) {
        case Tag::LBrace: return rbrace();
        case Tag::LBracket: return rbracket();
        case Tag::RBrace: return lbrace();
        case Tag::RBracket: return lbracket();
        default: throw std::logic_error("matching() on internal symbol");
        }
    }

    friend bool operator==(const AbstractSymbol& a, const AbstractSymbol& b) {
        return a.tag_ == b.tag_ && a.payload_ == b.payload_;
    }
    friend bool operator!=(const AbstractSymbol& a, const AbstractSymbol& b) { return !(a == b); }
    friend bool operator<(const AbstractSymbol& a, const AbstractSymbol& b) {
        return a.tag_ != b.tag_ ? a.tag_ < b.tag_ : a.payload_ < b.payload_;
    }

    std::uint64_t pack() const {
        return (static_cast<std::uint64_t>(tag_) << 32) | payload_;
    }

  private:
    AbstractSymbol(Tag tag, std::uint32_t payload) : tag_(tag), payload_(payload) {}

    Tag tag_;
    std::uint32_t payload_;
};

using Word = std::vector<AbstractSymbol>;

std::string prim_name(Prim p);
std::optional<Prim> prim_from_name(std::string_view name);

/// The fixed partitioned alphabet a schema and its documents share.
///
/// Keys are kept in a total order; the list order *is* the order `<` used by
/// the ordered language and the learner. Enum literals are the JSON scalar
/// texts that abstract to `e` wherever they occur in a document.
class PushdownAlphabet {
  public:
    PushdownAlphabet() = default;
    explicit PushdownAlphabet(std::vector<std::string> ordered_keys,
                              std::vector<std::string> enum_literals = {});

    const std::vector<std::string>& keys() const { return keys_; }
    std::size_t num_keys() const { return keys_.size(); }
    const std::string& key_name(std::uint32_t id) const { return keys_.at(id); }
    std::optional<std::uint32_t> key_id(std::string_view name) const;

    const std::vector<std::string>& enum_literals() const { return enum_literals_; }
    bool is_enum_literal(std::string_view canonical_text) const;

    /// Dense index of an internal symbol: keys first (in order), then the
    /// seven primitives, then the comma.
    std::size_t num_internals() const { return keys_.size() + kNumPrims + 1; }
    std::size_t internal_index(const AbstractSymbol& s) const;
    AbstractSymbol internal_at(std::size_t index) const;

    static constexpr std::size_t num_calls() { return 2; }
    static std::size_t call_index(const AbstractSymbol& s);
    static std::size_t return_index(const AbstractSymbol& s);

    std::string symbol_name(const AbstractSymbol& s) const;
    std::optional<AbstractSymbol> symbol_from_name(std::string_view name) const;

    std::string to_json() const;
    static PushdownAlphabet from_json(std::string_view text);

    friend bool operator==(const PushdownAlphabet& a, const PushdownAlphabet& b) {
        return a.keys_ == b.keys_ && a.enum_literals_ == b.enum_literals_;
    }

  private:
    std::vector<std::string> keys_;
    std::vector<std::string> enum_literals_;
};

/// Call/return balance: +1 per call, -1 per return.
long balance(const Word& word);

/// True iff every prefix has non-negative balance, the total balance is zero
/// and every return closes a call of the matching kind.
bool is_well_matched(const Word& word);

/// Maximum prefix balance. Throws if the word is not well matched.
std::size_t depth(const Word& word);

class NotWellMatchedError : public std::runtime_error {
  public:
    NotWellMatchedError() : std::runtime_error("word is not well matched") {}
};

std::string word_to_string(const Word& word, const PushdownAlphabet& alphabet);

struct WordHash {
    std::size_t operator()(const Word& w) const {
        std::uint64_t h = 1469598103934665603ull;
        for (const auto& s : w) {
            h ^= s.pack();
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

} // namespace jsonvpa
