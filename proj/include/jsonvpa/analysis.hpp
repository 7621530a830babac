#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "jsonvpa/one_sevpa.hpp"
#include "jsonvpa/vpa.hpp"

namespace jsonvpa {

/// Witness words are built by concatenation and call/return wrapping during
/// the fixed points; sharing the nodes keeps memory proportional to the
/// number of saturation steps instead of total word length.
class Witness {
  public:
    static Witness empty();
    static Witness leaf(SymRef s);
    static Witness word(const SymWord& w);
    static Witness concat(const Witness& a, const Witness& b);
    static Witness wrap(std::uint32_t call, const Witness& inner);

    SymWord materialize() const;

  private:
    struct Node;
    explicit Witness(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// The reachability relation Reach = {(q,q') | some well-matched word leads
/// from <q, s> to <q', s>}, with one witness word per member.
class ReachRelation {
  public:
    explicit ReachRelation(std::size_t num_states);

    std::size_t num_states() const { return num_states_; }
    bool contains(StateId p, StateId q) const { return member_[p * num_states_ + q]; }
    /// Adds the pair if absent; returns true when newly added.
    bool add(StateId p, StateId q, Witness w);

    const Witness& witness(StateId p, StateId q) const;
    SymWord witness_word(StateId p, StateId q) const { return witness(p, q).materialize(); }

    const std::vector<StateId>& targets_of(StateId p) const { return targets_[p]; }
    std::size_t size() const { return size_; }

    /// Distinct witness words, for seeding the next fixed point.
    std::vector<SymWord> witness_words() const;

  private:
    std::size_t num_states_;
    std::vector<bool> member_;
    std::vector<Witness> wit_;
    std::vector<std::vector<StateId>> targets_;
    std::size_t size_ = 0;
};

/// Fixed point of: identity and internal edges, closed transitively, plus
/// call/Reach/return sandwiches, until stable. `seed_words` are well-matched
/// words replayed up front; each pair they still realize enters the relation
/// with the word as witness (used to reuse work across learner rounds).
ReachRelation reachability(const Vpa& vpa, const std::vector<SymWord>& seed_words = {});

/// Relation {(p,q) | p --w--> q with equal stacks} realized by one word.
std::vector<std::pair<StateId, StateId>> level_relation(const Vpa& vpa, const SymWord& word);

/// Non-bin states of a 1-SEVPA, each carrying a witness pair (w, w') with
/// <q0, empty> --w--> <q0, s> and <p, s> --w'--> <final, empty>.
class LiveSet {
  public:
    explicit LiveSet(std::size_t num_states) : live_(num_states, false), wit_(num_states) {}

    bool is_live(StateId p) const { return live_.at(p); }
    std::size_t count() const;
    bool add(StateId p, Witness before, Witness after);
    std::pair<SymWord, SymWord> witness_pair(StateId p) const;
    const Witness& before(StateId p) const;
    const Witness& after(StateId p) const;

  private:
    std::vector<bool> live_;
    std::vector<std::optional<std::pair<Witness, Witness>>> wit_;
};

LiveSet live_set(const OneSevpa& sevpa, const ReachRelation& reach);

/// Result of bin-state elimination: the pruned automaton plus, for each old
/// state, its new id (or nullopt when dropped).
struct BinRemoval {
    OneSevpa automaton;
    std::vector<std::optional<StateId>> state_map;
};

/// Drops every non-live state and its transitions. Throws
/// EmptyAutomatonError when q0 itself is dead.
BinRemoval remove_bin_states(const OneSevpa& sevpa, const LiveSet& live);

/// Replays `word` from <q, empty>; returns the reached state if the run
/// exists and re-empties the stack.
std::optional<StateId> run_well_matched(const OneSevpa& sevpa, StateId from, const SymWord& word);

} // namespace jsonvpa
