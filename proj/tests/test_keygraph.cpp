#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "jsonvpa/analysis.hpp"
#include "jsonvpa/grammar.hpp"
#include "jsonvpa/keygraph.hpp"
#include "jsonvpa/one_sevpa.hpp"

using namespace jsonvpa;

namespace {

// Keys: 0 title, 1 conference, 2 name, 3 year.
PushdownAlphabet worked_alphabet() {
    return PushdownAlphabet({"title", "conference", "name", "year"});
}

constexpr std::uint32_t kStr = 4 + static_cast<std::uint32_t>(Prim::Str);
constexpr std::uint32_t kInt = 4 + static_cast<std::uint32_t>(Prim::Int);
constexpr std::uint32_t kComma = 11;

OneSevpa worked_sevpa() {
    OneSevpa m(2, 12);
    for (int i = 0; i < 12; ++i) {
        m.add_state(i == 11);
    }
    m.set_internal(0, 0, 1);
    m.set_internal(1, kStr, 2);
    m.set_internal(2, kComma, 3);
    m.set_internal(3, 1, 4);
    m.set_internal(0, 2, 5);
    m.set_internal(5, kStr, 6);
    m.set_internal(6, kComma, 7);
    m.set_internal(7, 3, 8);
    m.set_internal(8, kInt, 9);
    m.set_return(9, 0, 4, 0, 10);
    m.set_return(10, 0, 0, 0, 11);
    return m;
}

SymWord worked_document() {
    return {SymRef::call(0),    SymRef::internal(0),      SymRef::internal(kStr),
            SymRef::internal(kComma), SymRef::internal(1), SymRef::call(0),
            SymRef::internal(2), SymRef::internal(kStr),  SymRef::internal(kComma),
            SymRef::internal(3), SymRef::internal(kInt),  SymRef::ret(0),
            SymRef::ret(0)};
}

} // namespace

TEST_CASE("key graph of the worked automaton matches the drawn one") {
    auto alphabet = worked_alphabet();
    OneSevpa m = worked_sevpa();
    ReachRelation reach = reachability(m.to_vpa());
    KeyGraph g = build_key_graph(m, reach, alphabet, true);

    REQUIRE(g.num_vertices() == 4);
    CHECK(g.num_edges() == 2);

    auto find_vertex = [&](StateId from, KeyId key, StateId to) {
        for (std::uint32_t v = 0; v < g.num_vertices(); ++v) {
            if (g.vertex(v) == KeyGraphVertex{from, key, to}) return static_cast<int>(v);
        }
        return -1;
    };
    int v_title = find_vertex(0, 0, 2);
    int v_conf = find_vertex(3, 1, 10);
    int v_name = find_vertex(0, 2, 6);
    int v_year = find_vertex(7, 3, 9);
    REQUIRE(v_title >= 0);
    REQUIRE(v_conf >= 0);
    REQUIRE(v_name >= 0);
    REQUIRE(v_year >= 0);

    // edges: title -> conference, name -> year
    CHECK(g.successors(static_cast<std::uint32_t>(v_title)) ==
          std::vector<std::uint32_t>{static_cast<std::uint32_t>(v_conf)});
    CHECK(g.successors(static_cast<std::uint32_t>(v_name)) ==
          std::vector<std::uint32_t>{static_cast<std::uint32_t>(v_year)});
    CHECK(g.successors(static_cast<std::uint32_t>(v_conf)).empty());
    CHECK(g.successors(static_cast<std::uint32_t>(v_year)).empty());

    // start states P_k
    CHECK(g.start_states(0) == std::vector<StateId>{0});
    CHECK(g.start_states(2) == std::vector<StateId>{0});
    CHECK(g.start_states(1) == std::vector<StateId>{3});
    CHECK(g.start_states(3) == std::vector<StateId>{7});

    // no repeated-key path in a correct automaton
    CHECK_FALSE(find_repeated_key_path(g).has_value());

    // vertex count bound |Q|^2 * |K|
    CHECK(g.num_vertices() <= m.num_states() * m.num_states() * alphabet.num_keys());

    // every vertex witness replays (p --kv--> p')
    for (std::uint32_t v = 0; v < g.num_vertices(); ++v) {
        auto got = run_well_matched(m, g.vertex(v).from, g.witness(v));
        REQUIRE(got.has_value());
        CHECK(*got == g.vertex(v).to);
    }
}

TEST_CASE("automaton without key transitions gives an empty graph") {
    PushdownAlphabet alphabet({"a"});
    OneSevpa m(2, alphabet.num_internals());
    m.add_state(true);
    ReachRelation reach = reachability(m.to_vpa());
    KeyGraph g = build_key_graph(m, reach, alphabet);
    CHECK(g.num_vertices() == 0);
    CHECK_FALSE(find_repeated_key_path(g).has_value());
}

TEST_CASE("valid_paths on the worked graph") {
    auto alphabet = worked_alphabet();
    OneSevpa m = worked_sevpa();
    KeyGraph g = build_key_graph(m, reachability(m.to_vpa()), alphabet);

    auto keyset = [&](std::initializer_list<KeyId> keys) {
        KeySet s(alphabet.num_keys(), false);
        for (KeyId k : keys) s[k] = true;
        return s;
    };
    Marks none(g.num_vertices(), false);

    // K = {title, conference} -> {q10}
    CHECK(valid_paths(g, keyset({0, 1}), none) == std::vector<StateId>{10});
    // K = {title} -> {q2}
    CHECK(valid_paths(g, keyset({0}), none) == std::vector<StateId>{2});
    // K = {name, year} -> {q9}
    CHECK(valid_paths(g, keyset({2, 3}), none) == std::vector<StateId>{9});
    // K = {title, year}: no path uses exactly that set
    CHECK(valid_paths(g, keyset({0, 3}), none).empty());

    // marking the only title vertex blocks the path
    Marks blocked(g.num_vertices(), false);
    for (std::uint32_t v = 0; v < g.num_vertices(); ++v) {
        if (g.vertex(v).key == 0) blocked[v] = true;
    }
    CHECK(valid_paths(g, keyset({0, 1}), blocked).empty());
}

TEST_CASE("repeated-key path detection and counterexample construction") {
    // Hand-built graph with a repeated key on a q0-rooted path.
    PushdownAlphabet alphabet({"k1", "k2"});
    std::vector<KeyGraphVertex> vertices = {
        {0, 0, 1}, // (q0, k1, q1)
        {2, 0, 3}, // (q2, k1, q3)
    };
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges = {{0, 1}};
    KeyGraph g = key_graph_from_parts(vertices, edges, alphabet.num_keys(), 4, 0);

    auto path = find_repeated_key_path(g);
    REQUIRE(path.has_value());
    CHECK(*path == std::vector<std::uint32_t>{0, 1});

    // agreement with brute force on random small graphs
    std::mt19937_64 rng(7);
    for (int round = 0; round < 50; ++round) {
        std::size_t n = 1 + rng() % 10;
        std::vector<KeyGraphVertex> vs;
        for (std::size_t i = 0; i < n; ++i) {
            vs.push_back({static_cast<StateId>(rng() % 4), static_cast<KeyId>(rng() % 2),
                          static_cast<StateId>(rng() % 4)});
        }
        std::vector<std::pair<std::uint32_t, std::uint32_t>> es;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (rng() % 4 == 0) es.emplace_back(i, j);
            }
        }
        KeyGraph rg = key_graph_from_parts(vs, es, 2, 4, 0);

        // oracle: exhaustive DFS over q0-rooted paths of length <= 3
        bool oracle = false;
        std::function<void(std::uint32_t, std::vector<KeyId>)> walk =
            [&](std::uint32_t v, std::vector<KeyId> seen) {
                KeyId k = rg.vertex(v).key;
                if (std::find(seen.begin(), seen.end(), k) != seen.end()) {
                    oracle = true;
                    return;
                }
                seen.push_back(k);
                if (seen.size() > 3) return;
                for (std::uint32_t nxt : rg.successors(v)) walk(nxt, seen);
            };
        for (std::uint32_t v = 0; v < rg.num_vertices(); ++v) {
            if (rg.vertex(v).from == 0) walk(v, {});
        }
        CHECK(find_repeated_key_path(rg).has_value() == oracle);
    }
}

TEST_CASE("counterexample from a duplicate-key path is accepted yet invalid") {
    // Automaton accepting { k1 s } and { k1 s # k1 s } (a faulty hypothesis).
    PushdownAlphabet alphabet({"k1"});
    OneSevpa m(2, alphabet.num_internals());
    std::uint32_t s_idx = static_cast<std::uint32_t>(
        alphabet.internal_index(AbstractSymbol::prim(Prim::Str)));
    std::uint32_t comma = static_cast<std::uint32_t>(
        alphabet.internal_index(AbstractSymbol::comma()));
    for (int i = 0; i < 5; ++i) m.add_state(i == 4);
    m.set_internal(0, 0, 1);       // k1
    m.set_internal(1, s_idx, 2);   // s
    m.set_internal(2, comma, 0);   // # back to the key state
    m.set_return(2, 0, 0, 0, 4);   // } with (q0,{) -> accept

    ReachRelation reach = reachability(m.to_vpa());
    KeyGraph g = build_key_graph(m, reach, alphabet, true);
    auto path = find_repeated_key_path(g);
    REQUIRE(path.has_value());

    LiveSet live = live_set(m, reach);
    SymWord cex = counterexample_from_bad_path(g, *path, live, alphabet);
    CHECK(m.accepts(cex));

    Word abstract = to_abstract_word(cex, alphabet);
    CHECK_FALSE(DocumentTree::parse_document(abstract).has_value()); // duplicate keys
}

TEST_CASE("valid_paths matches the automaton run over sorted object bodies") {
    // ordered-language agreement: the end states of q0-rooted paths with key
    // set K are exactly where the sorted body of such an object lands
    auto alphabet = worked_alphabet();
    OneSevpa m = worked_sevpa();
    KeyGraph g = build_key_graph(m, reachability(m.to_vpa()), alphabet, true);

    // bodies realized by actual documents: {title, conference} and {name, year}
    struct Case {
        std::vector<KeyId> keys;
        SymWord body;
    };
    std::vector<Case> cases = {
        {{0, 1},
         {SymRef::internal(0), SymRef::internal(kStr), SymRef::internal(kComma),
          SymRef::internal(1), SymRef::call(0), SymRef::internal(2), SymRef::internal(kStr),
          SymRef::internal(kComma), SymRef::internal(3), SymRef::internal(kInt), SymRef::ret(0)}},
        {{2, 3},
         {SymRef::internal(2), SymRef::internal(kStr), SymRef::internal(kComma),
          SymRef::internal(3), SymRef::internal(kInt)}},
    };
    for (const auto& tc : cases) {
        KeySet keys(alphabet.num_keys(), false);
        for (KeyId k : tc.keys) keys[k] = true;
        auto ends = valid_paths(g, keys, Marks(g.num_vertices(), false));
        auto landed = run_well_matched(m, m.initial(), tc.body);
        REQUIRE(landed.has_value());
        CHECK(std::find(ends.begin(), ends.end(), *landed) != ends.end());
    }
}

TEST_CASE("every object body of an accepted document induces a key-graph path") {
    auto alphabet = worked_alphabet();
    OneSevpa m = worked_sevpa();
    KeyGraph g = build_key_graph(m, reachability(m.to_vpa()), alphabet);

    // the accepted document, with both of its objects
    SymWord doc = worked_document();
    REQUIRE(m.accepts(doc));

    // walk the word, extracting each object's sorted body and key set
    struct Obj {
        std::vector<KeyId> keys;
        SymWord body;
    };
    std::vector<Obj> objects;
    std::function<std::size_t(std::size_t)> scan_object = [&](std::size_t open) {
        // doc[open] is the call; collect until its matching return
        Obj obj;
        std::size_t i = open + 1;
        while (!(doc[i].kind == SymbolKind::Return)) {
            if (doc[i].kind == SymbolKind::Internal && doc[i].index < alphabet.num_keys()) {
                obj.keys.push_back(static_cast<KeyId>(doc[i].index));
            }
            if (doc[i].kind == SymbolKind::Call) {
                i = scan_object(i);
                continue;
            }
            ++i;
        }
        obj.body.assign(doc.begin() + static_cast<long>(open) + 1,
                        doc.begin() + static_cast<long>(i));
        objects.push_back(std::move(obj));
        return i + 1;
    };
    scan_object(0);
    REQUIRE(objects.size() == 2);

    for (const auto& obj : objects) {
        KeySet keys(alphabet.num_keys(), false);
        for (KeyId k : obj.keys) keys[k] = true;
        auto ends = valid_paths(g, keys, Marks(g.num_vertices(), false));
        auto landed = run_well_matched(m, m.initial(), obj.body);
        REQUIRE(landed.has_value());
        CHECK(std::find(ends.begin(), ends.end(), *landed) != ends.end());
    }
}
