#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "jsonvpa/symbols.hpp"

namespace jsonvpa {

using StateId = std::uint32_t;
using StackSym = std::uint32_t;

/// Symbol of a generic partitioned alphabet: a kind plus a dense index
/// within that kind (returns share the index of their matching call).
struct SymRef {
    SymbolKind kind;
    std::uint32_t index;

    static SymRef call(std::uint32_t i) { return {SymbolKind::Call, i}; }
    static SymRef ret(std::uint32_t i) { return {SymbolKind::Return, i}; }
    static SymRef internal(std::uint32_t i) { return {SymbolKind::Internal, i}; }

    friend bool operator==(const SymRef& a, const SymRef& b) {
        return a.kind == b.kind && a.index == b.index;
    }
    friend bool operator!=(const SymRef& a, const SymRef& b) { return !(a == b); }
};

using SymWord = std::vector<SymRef>;

SymRef to_sym_ref(const AbstractSymbol& s, const PushdownAlphabet& alphabet);
SymWord to_sym_word(const Word& w, const PushdownAlphabet& alphabet);
AbstractSymbol to_abstract_symbol(const SymRef& s, const PushdownAlphabet& alphabet);
Word to_abstract_word(const SymWord& w, const PushdownAlphabet& alphabet);

struct CallTransition {
    StateId from;
    std::uint32_t symbol;
    StateId to;
    StackSym stack;
};
struct ReturnTransition {
    StateId from;
    std::uint32_t symbol;
    StackSym stack;
    StateId to;
};
struct InternalTransition {
    StateId from;
    std::uint32_t symbol;
    StateId to;
};

class AlphabetMismatchError : public std::runtime_error {
  public:
    AlphabetMismatchError() : std::runtime_error("alphabet partitions differ") {}
};

/// A visibly pushdown automaton over a partitioned alphabet with
/// `num_calls` call/return pairs and `num_internals` internal symbols.
/// Possibly nondeterministic. Transitions are indexed by left-hand side,
/// so deterministic steps are constant time.
class Vpa {
  public:
    Vpa(std::size_t num_calls, std::size_t num_internals)
        : num_calls_(num_calls), num_internals_(num_internals) {}

    std::size_t num_calls() const { return num_calls_; }
    std::size_t num_internals() const { return num_internals_; }

    StateId add_state(bool initial = false, bool final_state = false);
    void mark_initial(StateId q);
    void mark_final(StateId q);
    std::size_t num_states() const { return final_.size(); }
    bool is_initial(StateId q) const;
    bool is_final(StateId q) const { return final_.at(q); }
    const std::vector<StateId>& initials() const { return initials_; }

    StackSym add_stack_symbol();
    void ensure_stack_symbols(std::size_t count);
    std::size_t num_stack_symbols() const { return num_stack_symbols_; }

    void add_call(StateId from, std::uint32_t call, StateId to, StackSym stack);
    void add_return(StateId from, std::uint32_t ret, StackSym stack, StateId to);
    void add_internal(StateId from, std::uint32_t sym, StateId to);

    const std::vector<CallTransition>& calls() const { return calls_; }
    const std::vector<ReturnTransition>& returns() const { return returns_; }
    const std::vector<InternalTransition>& internals() const { return internals_; }
    std::size_t num_transitions() const {
        return calls_.size() + returns_.size() + internals_.size();
    }

    /// (to, stack) successors of (from, call).
    const std::vector<std::pair<StateId, StackSym>>& call_successors(StateId from,
                                                                     std::uint32_t call) const;
    const std::vector<StateId>& return_successors(StateId from, std::uint32_t ret,
                                                  StackSym stack) const;
    const std::vector<StateId>& internal_successors(StateId from, std::uint32_t sym) const;

    bool is_deterministic() const;

    std::string to_dot(const std::vector<std::string>& call_names,
                       const std::vector<std::string>& internal_names) const;
    std::string to_json() const;
    static Vpa from_json(const std::string& text);

  private:
    std::size_t num_calls_;
    std::size_t num_internals_;
    std::size_t num_stack_symbols_ = 0;
    std::vector<bool> final_;
    std::vector<StateId> initials_;
    std::vector<CallTransition> calls_;
    std::vector<ReturnTransition> returns_;
    std::vector<InternalTransition> internals_;

    std::unordered_map<std::uint64_t, std::vector<std::pair<StateId, StackSym>>> call_index_;
    std::unordered_map<std::uint64_t, std::vector<StateId>> return_index_;
    std::unordered_map<std::uint64_t, std::vector<StateId>> internal_index_;
};

/// True iff some run over `word` goes from an initial to a final
/// configuration with empty stacks on both ends. Works for nondeterministic
/// automata via relation-set simulation; ill-matched words yield false.
bool accepts(const Vpa& vpa, const SymWord& word);

/// Subset-relation determinization. Language-equivalent, deterministic, and
/// only subset states reachable in the exact level-tracking exploration are
/// materialized.
Vpa determinize(const Vpa& vpa);

/// Synchronous product; accepts the intersection of both languages.
/// Throws AlphabetMismatchError when the partitions differ.
Vpa intersect(const Vpa& a, const Vpa& b);

/// Drops states that no forward walk from an initial state can touch, even
/// when stack constraints are ignored. Language-preserving.
Vpa trim_unreachable(const Vpa& vpa);

} // namespace jsonvpa
