#pragma once

#include <string>

#include "jsonvpa/keygraph.hpp"
#include "jsonvpa/one_sevpa.hpp"
#include "jsonvpa/symbols.hpp"

namespace jsonvpa {

class ArtifactError : public std::runtime_error {
  public:
    explicit ArtifactError(const std::string& what) : std::runtime_error(what) {}
};

/// Everything the streaming validator needs, bundled: the bin-free
/// fixed-order automaton, its key graph (hash-linked to the automaton), the
/// alphabet, and the learning-completeness flag.
struct Artifact {
    OneSevpa automaton;
    KeyGraph key_graph;
    PushdownAlphabet alphabet;
    bool incomplete_learning = false;

    std::string to_json() const;
    /// Verifies the key graph's embedded automaton hash.
    static Artifact from_json(const std::string& text);
};

/// Runs the analysis pipeline over a freshly built (possibly total)
/// automaton: reachability, live set, bin-state removal, key graph.
Artifact build_artifact(const OneSevpa& automaton, const PushdownAlphabet& alphabet,
                        bool incomplete_learning = false);

} // namespace jsonvpa
