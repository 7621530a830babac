#include "jsonvpa/artifact.hpp"

#include <json.hpp>

#include "jsonvpa/analysis.hpp"

namespace jsonvpa {

std::string Artifact::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["automaton"] = nlohmann::json::parse(automaton.to_json());
    j["automaton_hash"] = automaton.structural_hash();
    nlohmann::json kg = nlohmann::json::parse(key_graph.to_json());
    kg["automaton_hash"] = automaton.structural_hash();
    j["key_graph"] = std::move(kg);
    j["alphabet"] = nlohmann::json::parse(alphabet.to_json());
    j["flags"] = {{"incomplete_learning", incomplete_learning}};
    return j.dump();
}

Artifact Artifact::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ArtifactError(std::string("artifact is not valid JSON: ") + e.what());
    }
    if (j.value("version", 0) != 1) {
        throw ArtifactError("unsupported artifact version");
    }
    Artifact art{OneSevpa::from_json(j["automaton"].dump()),
                 KeyGraph::from_json(j["key_graph"].dump()),
                 PushdownAlphabet::from_json(j["alphabet"].dump()),
                 j["flags"].value("incomplete_learning", false)};
    std::uint64_t linked = j["key_graph"].value("automaton_hash", std::uint64_t{0});
    if (linked != art.automaton.structural_hash() ||
        linked != j.value("automaton_hash", std::uint64_t{0})) {
        throw ArtifactError("key graph does not belong to this automaton (hash mismatch)");
    }
    if (art.key_graph.num_keys() != art.alphabet.num_keys() ||
        art.automaton.num_internals() != art.alphabet.num_internals()) {
        throw ArtifactError("artifact sections use different alphabets");
    }
    return art;
}

Artifact build_artifact(const OneSevpa& automaton, const PushdownAlphabet& alphabet,
                        bool incomplete_learning) {
    ReachRelation reach = reachability(automaton.to_vpa());
    LiveSet live = live_set(automaton, reach);
    auto removal = remove_bin_states(automaton, live);
    ReachRelation reach2 = reachability(removal.automaton.to_vpa());
    KeyGraph graph = build_key_graph(removal.automaton, reach2, alphabet, false);
    return Artifact{std::move(removal.automaton), std::move(graph), alphabet,
                    incomplete_learning};
}

} // namespace jsonvpa
