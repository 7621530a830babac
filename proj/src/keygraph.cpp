#include "jsonvpa/keygraph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace jsonvpa {

void KeyGraph::index(std::size_t num_keys, StateId q0) {
    key_lists_.assign(num_keys, {});
    roots_.assign(num_keys, {});
    start_states_.assign(num_keys, {});
    for (std::uint32_t v = 0; v < vertices_.size(); ++v) {
        const auto& vx = vertices_[v];
        key_lists_[vx.key].push_back(v);
        if (vx.from == q0) {
            roots_[vx.key].push_back(v);
        }
        auto& starts = start_states_[vx.key];
        if (std::find(starts.begin(), starts.end(), vx.from) == starts.end()) {
            starts.push_back(vx.from);
        }
    }
    edges_.assign(vertices_.size(), {});
    for (const auto& [a, b] : edge_list_) {
        edges_[a].push_back(b);
    }
}

const SymWord& KeyGraph::witness(std::uint32_t v) const {
    if (witnesses_.empty()) {
        throw MissingWitnessError{};
    }
    return witnesses_.at(v);
}

std::size_t KeyGraph::num_edges() const { return edge_list_.size(); }

KeyGraph build_key_graph(const OneSevpa& sevpa, const ReachRelation& reach,
                         const PushdownAlphabet& alphabet, bool with_witnesses) {
    const std::size_t num_keys = alphabet.num_keys();
    KeyGraph g;

    for (StateId p = 0; p < sevpa.num_states(); ++p) {
        for (KeyId k = 0; k < num_keys; ++k) {
            auto q = sevpa.internal_step(p, k);
            if (!q) continue;
            // targets reached by a primitive value
            std::map<StateId, SymWord> targets;
            for (std::size_t i = 0; i < kNumPrims; ++i) {
                std::uint32_t sym =
                    static_cast<std::uint32_t>(alphabet.internal_index(
                        AbstractSymbol::prim(static_cast<Prim>(i))));
                if (auto p2 = sevpa.internal_step(*q, sym)) {
                    if (!targets.count(*p2)) {
                        targets.emplace(*p2, SymWord{SymRef::internal(static_cast<std::uint32_t>(k)),
                                                     SymRef::internal(sym)});
                    }
                }
            }
            // targets reached by a matched object/array excursion
            for (std::uint32_t call = 0; call < sevpa.num_calls(); ++call) {
                for (StateId r2 : reach.targets_of(sevpa.initial())) {
                    auto p2 = sevpa.return_step(r2, call, *q, call);
                    if (!p2 || targets.count(*p2)) continue;
                    SymWord w{SymRef::internal(static_cast<std::uint32_t>(k)),
                              SymRef::call(call)};
                    if (with_witnesses) {
                        SymWord inner = reach.witness_word(sevpa.initial(), r2);
                        w.insert(w.end(), inner.begin(), inner.end());
                    }
                    w.push_back(SymRef::ret(call));
                    targets.emplace(*p2, std::move(w));
                }
            }
            for (auto& [p2, wit] : targets) {
                g.vertices_.push_back({p, k, p2});
                if (with_witnesses) {
                    g.witnesses_.push_back(std::move(wit));
                }
            }
        }
    }

    // comma edges
    std::uint32_t comma =
        static_cast<std::uint32_t>(alphabet.internal_index(AbstractSymbol::comma()));
    std::map<StateId, std::vector<std::uint32_t>> starts_at;
    for (std::uint32_t v = 0; v < g.vertices_.size(); ++v) {
        starts_at[g.vertices_[v].from].push_back(v);
    }
    for (std::uint32_t v = 0; v < g.vertices_.size(); ++v) {
        auto next = sevpa.internal_step(g.vertices_[v].to, comma);
        if (!next) continue;
        auto it = starts_at.find(*next);
        if (it == starts_at.end()) continue;
        for (std::uint32_t w : it->second) {
            g.edge_list_.emplace_back(v, w);
        }
    }
    g.index(num_keys, sevpa.initial());
    return g;
}

KeyGraph key_graph_from_parts(std::vector<KeyGraphVertex> vertices,
                              std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
                              std::size_t num_keys, std::size_t num_states, StateId q0) {
    (void)num_states;
    KeyGraph g;
    g.vertices_ = std::move(vertices);
    g.edge_list_ = std::move(edges);
    g.index(num_keys, q0);
    return g;
}

std::optional<std::vector<std::uint32_t>> find_repeated_key_path(const KeyGraph& graph) {
    std::vector<std::uint32_t> path;
    std::vector<bool> used(graph.num_keys(), false);
    std::function<bool(std::uint32_t)> dfs = [&](std::uint32_t v) {
        const auto& vx = graph.vertex(v);
        path.push_back(v);
        if (used[vx.key]) {
            return true; // path now repeats vx.key
        }
        if (path.size() <= graph.num_keys()) {
            used[vx.key] = true;
            for (std::uint32_t next : graph.successors(v)) {
                if (dfs(next)) return true;
            }
            used[vx.key] = false;
        }
        path.pop_back();
        return false;
    };
    for (KeyId k = 0; k < graph.num_keys(); ++k) {
        for (std::uint32_t root : graph.roots_of_key(k)) {
            if (dfs(root)) {
                return path;
            }
        }
    }
    return std::nullopt;
}

std::vector<StateId> valid_paths(const KeyGraph& graph, const KeySet& keys, const Marks& marks) {
    std::vector<StateId> out;
    std::set<StateId> seen;
    std::size_t wanted = 0;
    for (bool b : keys) wanted += b;
    if (wanted == 0) return out;

    // (vertex, collected keys) pairs already explored
    std::set<std::pair<std::uint32_t, std::vector<bool>>> visited;
    std::vector<bool> used(keys.size(), false);

    std::function<void(std::uint32_t, std::size_t)> dfs = [&](std::uint32_t v,
                                                              std::size_t count) {
        const auto& vx = graph.vertex(v);
        if (vx.key >= keys.size() || !keys[vx.key]) return;       // key outside K
        if (used[vx.key]) return;                                 // second visit of a key
        if (v < marks.size() && marks[v]) return;                 // marked vertex
        used[vx.key] = true;
        if (!visited.emplace(v, used).second) {
            used[vx.key] = false;
            return;
        }
        ++count;
        if (count == wanted) {
            if (seen.insert(vx.to).second) {
                out.push_back(vx.to);
            }
        } else {
            for (std::uint32_t next : graph.successors(v)) {
                dfs(next, count);
            }
        }
        used[vx.key] = false;
    };
    for (KeyId k = 0; k < keys.size() && k < graph.num_keys(); ++k) {
        if (!keys[k]) continue;
        for (std::uint32_t root : graph.roots_of_key(k)) {
            dfs(root, 0);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

SymWord counterexample_from_bad_path(const KeyGraph& graph,
                                     const std::vector<std::uint32_t>& path,
                                     const LiveSet& live,
                                     const PushdownAlphabet& alphabet) {
    if (!graph.has_witnesses()) {
        throw MissingWitnessError{};
    }
    std::uint32_t comma =
        static_cast<std::uint32_t>(alphabet.internal_index(AbstractSymbol::comma()));
    SymWord body;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) body.push_back(SymRef::internal(comma));
        const SymWord& kv = graph.witness(path[i]);
        body.insert(body.end(), kv.begin(), kv.end());
    }
    StateId end = graph.vertex(path.back()).to;
    auto [before, after] = live.witness_pair(end);
    SymWord word;
    word.insert(word.end(), before.begin(), before.end());
    word.insert(word.end(), body.begin(), body.end());
    word.insert(word.end(), after.begin(), after.end());
    return word;
}

std::string KeyGraph::to_dot(const PushdownAlphabet& alphabet) const {
    std::ostringstream os;
    os << "digraph keygraph {\n  rankdir=LR;\n  node [shape=box];\n";
    for (std::uint32_t v = 0; v < vertices_.size(); ++v) {
        const auto& vx = vertices_[v];
        os << "  v" << v << " [label=\"q" << vx.from << ", " << alphabet.key_name(vx.key)
           << ", q" << vx.to << "\"];\n";
    }
    for (const auto& [a, b] : edge_list_) {
        os << "  v" << a << " -> v" << b << ";\n";
    }
    os << "}\n";
    return os.str();
}

std::string KeyGraph::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    auto& vs = j["vertices"] = nlohmann::json::array();
    for (const auto& v : vertices_) {
        vs.push_back({v.from, v.key, v.to});
    }
    auto& es = j["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : edge_list_) {
        es.push_back({a, b});
    }
    j["num_keys"] = key_lists_.size();
    j["q0"] = 0;
    if (!witnesses_.empty()) {
        auto& ws = j["witnesses"] = nlohmann::json::array();
        for (const auto& w : witnesses_) {
            nlohmann::json jw = nlohmann::json::array();
            for (const auto& s : w) {
                jw.push_back({static_cast<int>(s.kind), s.index});
            }
            ws.push_back(std::move(jw));
        }
    }
    return j.dump();
}

KeyGraph KeyGraph::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("version", 0) != 1) {
        throw std::runtime_error("unsupported key graph format");
    }
    KeyGraph g;
    for (const auto& v : j["vertices"]) {
        g.vertices_.push_back(
            {v[0].get<StateId>(), v[1].get<KeyId>(), v[2].get<StateId>()});
    }
    for (const auto& e : j["edges"]) {
        g.edge_list_.emplace_back(e[0].get<std::uint32_t>(), e[1].get<std::uint32_t>());
    }
    if (j.contains("witnesses")) {
        for (const auto& jw : j["witnesses"]) {
            SymWord w;
            for (const auto& s : jw) {
                w.push_back(SymRef{static_cast<SymbolKind>(s[0].get<int>()),
                                   s[1].get<std::uint32_t>()});
            }
            g.witnesses_.push_back(std::move(w));
        }
    }
    g.index(j["num_keys"].get<std::size_t>(), j["q0"].get<StateId>());
    return g;
}

} // namespace jsonvpa
