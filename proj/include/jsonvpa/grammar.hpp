#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "jsonvpa/symbols.hpp"

namespace jsonvpa {

using NonterminalId = std::uint32_t;

class IllFormedGrammarError : public std::runtime_error {
  public:
    explicit IllFormedGrammarError(const std::string& what) : std::runtime_error(what) {}
};

/// One right-hand side of a schema nonterminal. A nonterminal may carry
/// several productions; satisfaction is the disjunction over them.
struct Production {
    enum class Kind { Primitive, Object, AnyObject, ArrayStar, ArrayFixed, Or, And, Not };

    Kind kind;
    Prim prim = Prim::Str;                                 // Primitive
    std::vector<std::pair<KeyId, NonterminalId>> pairs;    // Object
    NonterminalId element = 0;                             // AnyObject / arrays
    std::size_t count = 0;                                 // ArrayFixed
    std::vector<NonterminalId> operands;                   // Or / And / Not (singleton)

    static Production primitive(Prim v);
    static Production object(std::vector<std::pair<KeyId, NonterminalId>> pairs);
    /// Any set of pairwise distinct keys, every value satisfying `element`.
    static Production any_object(NonterminalId element);
    static Production array_star(NonterminalId element);
    static Production array_fixed(NonterminalId element, std::size_t count);
    static Production or_of(std::vector<NonterminalId> operands);
    static Production and_of(std::vector<NonterminalId> operands);
    static Production not_of(NonterminalId operand);
};

/// Closed extended CFG modelling an abstract JSON schema. Closure under key
/// permutations is semantic: the evaluator compares key sets instead of
/// enumerating permuted productions.
class Grammar {
  public:
    explicit Grammar(PushdownAlphabet alphabet) : alphabet_(std::move(alphabet)) {}

    NonterminalId add_nonterminal(std::string name);
    void add_production(NonterminalId nt, Production p);
    void mark_axiom(NonterminalId nt);

    std::size_t num_nonterminals() const { return names_.size(); }
    const std::string& name(NonterminalId nt) const { return names_.at(nt); }
    std::optional<NonterminalId> find(const std::string& name) const;
    const std::vector<Production>& productions(NonterminalId nt) const {
        return productions_.at(nt);
    }
    const std::vector<NonterminalId>& axioms() const { return axioms_; }
    const PushdownAlphabet& alphabet() const { return alphabet_; }

    std::string to_json() const;
    static Grammar from_json(const std::string& text);

  private:
    PushdownAlphabet alphabet_;
    std::vector<std::string> names_;
    std::vector<std::vector<Production>> productions_;
    std::vector<NonterminalId> axioms_;
};

/// In-memory JSON value over the abstract alphabet. Object keys are
/// pairwise distinct by construction.
class DocumentTree {
  public:
    using Object = std::vector<std::pair<KeyId, DocumentTree>>;
    using Array = std::vector<DocumentTree>;

    static DocumentTree primitive(Prim v) { return DocumentTree(v); }
    /// Throws std::invalid_argument on duplicate keys.
    static DocumentTree object(Object pairs);
    static DocumentTree array(Array elements) { return DocumentTree(std::move(elements)); }

    bool is_primitive() const { return std::holds_alternative<Prim>(value_); }
    bool is_object() const { return std::holds_alternative<Object>(value_); }
    bool is_array() const { return std::holds_alternative<Array>(value_); }
    Prim prim() const { return std::get<Prim>(value_); }
    const Object& pairs() const { return std::get<Object>(value_); }
    const Array& elements() const { return std::get<Array>(value_); }

    Word to_word() const;
    /// Depth in the nesting sense: a bare primitive has depth 0.
    std::size_t nesting_depth() const;

    /// Parses a whole abstract word as a document (an object). Returns
    /// nullopt for ill-matched words, non-objects, trailing symbols or
    /// duplicate keys.
    static std::optional<DocumentTree> parse_document(const Word& word);
    /// Parses any single value.
    static std::optional<DocumentTree> parse_value(const Word& word);

    friend bool operator==(const DocumentTree& a, const DocumentTree& b) {
        return a.value_ == b.value_;
    }
    friend bool operator<(const DocumentTree& a, const DocumentTree& b) {
        return a.value_ < b.value_;
    }

  private:
    explicit DocumentTree(Prim v) : value_(v) {}
    explicit DocumentTree(Object o);
    explicit DocumentTree(Array a) : value_(std::move(a)) {}

    std::variant<Prim, Object, Array> value_;
};

/// J |= S over the seven semantic clauses. Object matching is key-set based
/// and therefore insensitive to pair order.
bool satisfies(const Grammar& grammar, NonterminalId nt, const DocumentTree& doc);

struct ClassicalResult {
    bool valid;
    /// Number of (value, schema) evaluations performed, the cost measure of
    /// the recursive validator.
    std::size_t evaluations;
};

/// Tree-walking validator against the axiom disjunction, with the usual
/// short-circuits: missing required keys and wrong element counts fail
/// before any per-pair work.
ClassicalResult classical_validate(const Grammar& grammar, const DocumentTree& doc);

/// Convenience over raw words: non-documents (ill-matched, non-object,
/// duplicate keys) are invalid.
ClassicalResult classical_validate_word(const Grammar& grammar, const Word& word);

/// The grammar of all JSON documents over the alphabet.
Grammar universal_grammar(const PushdownAlphabet& alphabet);

struct WellFormedness {
    bool ok;
    std::string diagnostic;
};

/// Rejects cyclic definitions that run through Boolean productions only;
/// recursion through an object or array constructor is legal. Also checks
/// that referenced nonterminals exist and axioms can produce objects.
WellFormedness check_well_formed(const Grammar& grammar);

} // namespace jsonvpa
