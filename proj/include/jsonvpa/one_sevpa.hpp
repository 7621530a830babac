#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "jsonvpa/vpa.hpp"

namespace jsonvpa {

class EmptyAutomatonError : public std::runtime_error {
  public:
    EmptyAutomatonError() : std::runtime_error("initial state is a bin state; language empty") {}
};

/// Deterministic VPA in 1-module single-entry form: the stack alphabet is
/// Q x calls, and every call from q on a goes to q0 pushing (q, a). Call
/// transitions are therefore implicit. Internal and return transitions may
/// be partial (they always are after bin-state removal).
class OneSevpa {
  public:
    OneSevpa(std::size_t num_calls, std::size_t num_internals)
        : num_calls_(num_calls), num_internals_(num_internals) {}

    std::size_t num_calls() const { return num_calls_; }
    std::size_t num_internals() const { return num_internals_; }

    StateId add_state(bool final_state = false);
    std::size_t num_states() const { return final_.size(); }
    StateId initial() const { return 0; }
    bool is_final(StateId q) const { return final_.at(q); }
    void mark_final(StateId q) { final_.at(q) = true; }

    void set_internal(StateId from, std::uint32_t sym, StateId to);
    void set_return(StateId from, std::uint32_t ret, StateId call_source, std::uint32_t call,
                    StateId to);

    std::optional<StateId> internal_step(StateId from, std::uint32_t sym) const;
    std::optional<StateId> return_step(StateId from, std::uint32_t ret, StateId call_source,
                                       std::uint32_t call) const;

    StackSym stack_symbol(StateId call_source, std::uint32_t call) const {
        return static_cast<StackSym>(call_source * num_calls_ + call);
    }
    std::pair<StateId, std::uint32_t> decode_stack(StackSym g) const {
        return {static_cast<StateId>(g / num_calls_), static_cast<std::uint32_t>(g % num_calls_)};
    }

    std::size_t num_return_transitions() const { return returns_.size(); }
    std::size_t num_internal_transitions() const;

    /// Every (from, ret, stack, to) return transition, for analyses.
    std::vector<ReturnTransition> return_transitions() const;

    /// Single deterministic run from <q0, empty>.
    bool accepts(const SymWord& word) const;

    /// Materialize as a plain Vpa, with one call transition per state and
    /// call symbol.
    Vpa to_vpa() const;

    std::string to_json() const;
    static OneSevpa from_json(const std::string& text);
    std::uint64_t structural_hash() const;

    std::string to_dot(const std::vector<std::string>& call_names,
                       const std::vector<std::string>& internal_names) const;

  private:
    std::size_t num_calls_;
    std::size_t num_internals_;
    std::vector<bool> final_;
    std::vector<std::int64_t> internal_; // num_states x num_internals, -1 = missing
    std::unordered_map<std::uint64_t, StateId> returns_;
};

/// Checks the 1-SEVPA shape of a generic VPA: single initial, deterministic,
/// stack alphabet Q x calls, every call (q, a) -> (q0, (q, a)).
bool is_one_sevpa(const Vpa& vpa);

/// Relation-subset construction of a language-equivalent 1-SEVPA from any
/// VPA. States are the level relations reachable from Id(Q); the entry state
/// Id(Q) serves as q0 and acceptance tests pairs against I x F.
OneSevpa to_one_sevpa(const Vpa& vpa);

} // namespace jsonvpa
