#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jsonvpa/analysis.hpp"
#include "jsonvpa/one_sevpa.hpp"
#include "jsonvpa/symbols.hpp"

namespace jsonvpa {

class MissingWitnessError : public std::runtime_error {
  public:
    MissingWitnessError() : std::runtime_error("key graph was built without witnesses") {}
};

/// Vertex (p, k, p'): some key-value pair with key k runs from p to p' at
/// equal stack level.
struct KeyGraphVertex {
    StateId from;
    KeyId key;
    StateId to;

    friend bool operator==(const KeyGraphVertex& a, const KeyGraphVertex& b) {
        return a.from == b.from && a.key == b.key && a.to == b.to;
    }
};

/// Abstraction of the automaton's object-body paths: vertices are key-value
/// runs, edges follow comma transitions. Immutable once built; shared
/// across validators.
class KeyGraph {
  public:
    std::size_t num_vertices() const { return vertices_.size(); }
    const KeyGraphVertex& vertex(std::uint32_t v) const { return vertices_.at(v); }
    const std::vector<std::uint32_t>& successors(std::uint32_t v) const { return edges_.at(v); }

    /// All vertices carrying key k (the list L_k).
    const std::vector<std::uint32_t>& vertices_of_key(KeyId k) const { return key_lists_.at(k); }
    /// P_k = {p | (p, k, p') is a vertex}; empty for unknown keys.
    const std::vector<StateId>& start_states(KeyId k) const { return start_states_.at(k); }
    /// Vertices whose source state is q0 and whose key is k.
    const std::vector<std::uint32_t>& roots_of_key(KeyId k) const { return roots_.at(k); }

    bool has_witnesses() const { return !witnesses_.empty(); }
    /// The key-value word kv realizing the vertex.
    const SymWord& witness(std::uint32_t v) const;

    std::size_t num_keys() const { return key_lists_.size(); }
    std::size_t num_edges() const;

    std::string to_dot(const PushdownAlphabet& alphabet) const;
    std::string to_json() const;
    static KeyGraph from_json(const std::string& text);

  private:
    friend KeyGraph build_key_graph(const OneSevpa&, const ReachRelation&,
                                    const PushdownAlphabet&, bool);
    friend KeyGraph key_graph_from_parts(std::vector<KeyGraphVertex>,
                                         std::vector<std::pair<std::uint32_t, std::uint32_t>>,
                                         std::size_t, std::size_t, StateId);

    void index(std::size_t num_keys, StateId q0);

    std::vector<KeyGraphVertex> vertices_;
    std::vector<std::vector<std::uint32_t>> edges_;
    std::vector<std::vector<std::uint32_t>> key_lists_;
    std::vector<std::vector<StateId>> start_states_;
    std::vector<std::vector<std::uint32_t>> roots_;
    std::vector<SymWord> witnesses_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_list_;
};

/// Vertex rule of the computation: (p,k,p') is a vertex when the key
/// transition from p continues with a primitive internal, or with a matched
/// call/return excursion through the reachability relation. Witness words
/// are stored when `with_witnesses` (the learner needs them; the validator
/// does not).
KeyGraph build_key_graph(const OneSevpa& sevpa, const ReachRelation& reach,
                         const PushdownAlphabet& alphabet, bool with_witnesses = false);

/// Test seam: assemble a graph directly from vertices and edges.
KeyGraph key_graph_from_parts(std::vector<KeyGraphVertex> vertices,
                              std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
                              std::size_t num_keys, std::size_t num_states, StateId q0);

/// First q0-rooted path that repeats a key, as vertex indices; nullopt when
/// none exists. Search depth is capped at |keys| + 1 vertices.
std::optional<std::vector<std::uint32_t>> find_repeated_key_path(const KeyGraph& graph);

/// Key sets and mark sets are bitsets over key ids / vertex indices.
using KeySet = std::vector<bool>;
using Marks = std::vector<bool>;

/// End states r' of q0-rooted paths that use exactly the key set and avoid
/// marked vertices. Branches revisiting a key are cut, which also covers
/// incompletely learned graphs with repeated-key paths.
std::vector<StateId> valid_paths(const KeyGraph& graph, const KeySet& keys, const Marks& marks);

/// Appendix-style counterexample: join the path's key-value witnesses with
/// commas, then wrap with the live-set witness pair of the path's end
/// state. The result is accepted by the automaton but repeats a key.
SymWord counterexample_from_bad_path(const KeyGraph& graph,
                                     const std::vector<std::uint32_t>& path,
                                     const LiveSet& live,
                                     const PushdownAlphabet& alphabet);

} // namespace jsonvpa
