#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jsonvpa/grammar.hpp"
#include "jsonvpa/vpa.hpp"

namespace jsonvpa {

class UnsupportedBooleanError : public std::runtime_error {
  public:
    explicit UnsupportedBooleanError(const std::string& what) : std::runtime_error(what) {}
};

/// Token of a body regex: either an internal alphabet symbol or a reference
/// to a normalized (single-bracket) production.
struct BodyToken {
    bool is_nonterminal;
    std::uint32_t index;

    friend bool operator==(const BodyToken& a, const BodyToken& b) {
        return a.is_nonterminal == b.is_nonterminal && a.index == b.index;
    }
    friend bool operator<(const BodyToken& a, const BodyToken& b) {
        return std::tie(a.is_nonterminal, a.index) < std::tie(b.is_nonterminal, b.index);
    }
};

/// Hash-consed generalized regular expressions (union, intersection,
/// negation, concatenation, star) over body tokens. Derivative-friendly:
/// nodes are canonicalized so Brzozowski derivatives stay finite.
class RegexArena {
  public:
    using Id = std::uint32_t;

    Id empty();
    Id epsilon();
    Id token(BodyToken t);
    Id concat(Id a, Id b);
    Id concat_all(const std::vector<Id>& parts);
    Id union_of(std::vector<Id> operands);
    Id inter_of(std::vector<Id> operands);
    Id star(Id a);
    Id neg(Id a);

    bool nullable(Id id) const;
    Id derivative(Id id, BodyToken t);

    /// Internal-symbol and nonterminal tokens appearing in the expression.
    std::vector<BodyToken> tokens_of(Id id) const;
    /// Nonterminal tokens under any intersection or negation node.
    std::vector<std::uint32_t> nonterminals_under_boolean(Id id) const;

  private:
    enum class Kind : std::uint8_t { Empty, Epsilon, Token, Concat, Union, Inter, Star, Neg };
    struct Node {
        Kind kind;
        BodyToken tok{false, 0};
        std::vector<Id> children;
        bool nullable;
    };

    Id intern(Node node);

    std::vector<Node> nodes_;
    std::map<std::tuple<std::uint8_t, std::uint64_t, std::vector<Id>>, Id> index_;
    std::map<std::pair<Id, std::uint64_t>, Id> derivative_memo_;
};

/// Deterministic automaton for one body language. Partial after bin-state
/// pruning: every kept state lies on an initial-to-final path. An empty
/// language has no initial state.
struct BodyDfa {
    std::uint32_t num_states = 0;
    std::optional<std::uint32_t> initial;
    std::vector<bool> final;
    std::vector<std::tuple<std::uint32_t, BodyToken, std::uint32_t>> transitions;
};

BodyDfa body_to_dfa(RegexArena& arena, RegexArena::Id body,
                    const std::vector<BodyToken>& alphabet);

/// Single-bracket production S_j ::= a_j body ~a_j with a generalized regex
/// body over internal symbols and production references.
struct NormalizedProduction {
    std::string name;
    std::uint32_t bracket; // 0 = object, 1 = array
    RegexArena::Id body;
};

struct NormalizedGrammar {
    std::shared_ptr<RegexArena> arena;
    std::vector<NormalizedProduction> productions;
    std::vector<std::uint32_t> axioms; // always object-bracket productions
    PushdownAlphabet alphabet;
};

/// Lemma-style normalization: multi-production nonterminals split apart,
/// primitive and Boolean productions inlined into the bodies, object bodies
/// either fixed to the alphabet's key order or expanded over all
/// permutations (at most 8 keys). Negation over primitive-only operands is
/// rewritten against the full value set; other Boolean scopes may only
/// contain internal symbols and universal tokens, otherwise
/// UnsupportedBooleanError points at the learner path.
NormalizedGrammar normalize(const Grammar& grammar, bool ordered);

/// Glues the per-production body DFAs into one VPA: nonterminal edges become
/// call/return pairs through the sub-DFA, axioms hang off a fresh entry and
/// exit state.
Vpa assemble_vpa(const NormalizedGrammar& normalized, const std::vector<BodyDfa>& dfas);

/// Automaton of all abstract JSON documents over the alphabet. The object
/// body places no constraint on keys beyond member syntax.
Vpa universal_vpa(const PushdownAlphabet& alphabet);
/// Same, restricted to strictly increasing key order inside every object.
Vpa ordered_universal_vpa(const PushdownAlphabet& alphabet);

struct CompileReport {
    std::size_t assembled_states = 0;
    std::size_t intersected_states = 0;
    std::size_t determinized_states = 0;
    std::size_t final_states = 0;
    std::string to_json() const;
};

/// Full pipeline: normalize, body DFAs, assemble, intersect with the
/// (ordered) universal automaton, determinize, trim.
Vpa vpa_for_schema(const Grammar& grammar, bool ordered, CompileReport* report = nullptr);

} // namespace jsonvpa
