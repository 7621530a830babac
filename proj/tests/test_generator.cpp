#include <doctest.h>

#include <set>

#include "jsonvpa/generator.hpp"
#include "jsonvpa/grammar.hpp"
#include "jsonvpa/schema_loader.hpp"

using namespace jsonvpa;

namespace {

Grammar recursive_list() {
    return load_json_schema(R"({
      "type": "object",
      "properties": {
        "name": {"type": "string"},
        "children": {"type": "array", "items": {"$ref": "#"}, "minItems": 1, "maxItems": 1}
      },
      "required": ["name"]
    })");
}

Grammar example5() {
    Grammar g(PushdownAlphabet({"title", "keywords", "conference", "name", "year"}));
    NonterminalId s0 = g.add_nonterminal("S0");
    NonterminalId s1 = g.add_nonterminal("S1");
    NonterminalId s2 = g.add_nonterminal("S2");
    NonterminalId s3 = g.add_nonterminal("S3");
    NonterminalId s4 = g.add_nonterminal("S4");
    g.add_production(s0, Production::object({{0, s1}, {1, s2}, {2, s3}}));
    g.add_production(s0, Production::object({{0, s1}, {2, s3}}));
    g.add_production(s1, Production::primitive(Prim::Str));
    g.add_production(s2, Production::array_star(s1));
    g.add_production(s3, Production::object({{3, s1}, {4, s4}}));
    g.add_production(s4, Production::primitive(Prim::Int));
    g.mark_axiom(s0);
    return g;
}

} // namespace

TEST_CASE("exhaustive valid generation of the recursive list") {
    Grammar g = recursive_list();
    // depth counts every object/array level: the base object is depth 1,
    // one recursion step wraps an array and an object around it (depth 3).
    auto words1 = all_valid_documents(g, 1);
    REQUIRE(words1.size() == 1);
    CHECK(words1[0].size() == 4); // { name s }

    auto words3 = all_valid_documents(g, 3);
    REQUIRE(words3.size() == 2);
    for (const auto& w : words3) {
        CHECK(classical_validate_word(g, w).valid);
    }
    CHECK((words3[0].size() == 12 || words3[1].size() == 12)); // nested variant present

    auto words5 = all_valid_documents(g, 5);
    CHECK(words5.size() == 3);
}

TEST_CASE("exhaustive completeness against brute-force enumeration") {
    Grammar g = recursive_list();
    // oracle: every abstract document over the alphabet (depth <= 2, arrays
    // <= 1 element) filtered by the classical validator, in sorted-pair form
    std::set<Word> oracle;
    for (const auto& doc : enumerate_all_documents(g.alphabet(), 2, 1)) {
        if (classical_validate(g, doc).valid) {
            oracle.insert(sort_pairs(doc).to_word());
        }
    }
    std::set<Word> generated;
    for (const auto& w : all_valid_documents(g, 2)) {
        generated.insert(w);
    }
    CHECK(oracle == generated);
}

TEST_CASE("random valid generation satisfies the grammar") {
    Grammar g = example5();
    GeneratorConfig rc;
    rc.mode = GeneratorConfig::Mode::Random;
    rc.max_depth = 3;
    rc.seed = 0;
    auto gen = gen_valid(g, rc);
    for (int i = 0; i < 200; ++i) {
        auto w = gen->next();
        REQUIRE(w.has_value());
        CHECK(classical_validate_word(g, *w).valid);
    }
}

TEST_CASE("determinism: same seed, same stream") {
    Grammar g = example5();
    GeneratorConfig rc;
    rc.mode = GeneratorConfig::Mode::Random;
    rc.max_depth = 3;
    rc.seed = 123;
    auto a = gen_valid(g, rc);
    auto b = gen_valid(g, rc);
    for (int i = 0; i < 50; ++i) {
        CHECK(*a->next() == *b->next());
    }
    auto ia = gen_invalid(g, rc);
    auto ib = gen_invalid(g, rc);
    for (int i = 0; i < 50; ++i) {
        CHECK(*ia->next() == *ib->next());
    }
}

TEST_CASE("contradictory conjunction yields no valid document") {
    Grammar g(PushdownAlphabet({"k"}));
    NonterminalId i = g.add_nonterminal("I");
    NonterminalId s = g.add_nonterminal("S");
    NonterminalId oi = g.add_nonterminal("ObjI");
    NonterminalId os = g.add_nonterminal("ObjS");
    NonterminalId both = g.add_nonterminal("Both");
    g.add_production(i, Production::primitive(Prim::Int));
    g.add_production(s, Production::primitive(Prim::Str));
    g.add_production(oi, Production::object({{0, i}}));
    g.add_production(os, Production::object({{0, s}}));
    g.add_production(both, Production::and_of({oi, os}));
    g.mark_axiom(both);

    GeneratorConfig ec;
    ec.mode = GeneratorConfig::Mode::Exhaustive;
    ec.max_depth = 2;
    CHECK_THROWS_AS(gen_valid(g, ec), NoValidDocumentError);
}

TEST_CASE("invalid generation is sound for every deviation kind") {
    Grammar g = example5();
    GeneratorConfig ec;
    ec.mode = GeneratorConfig::Mode::Exhaustive;
    ec.max_depth = 2;
    auto gen = gen_invalid(g, ec);
    std::size_t count = 0;
    std::size_t duplicate_seen = 0;
    while (auto w = gen->next()) {
        CHECK_FALSE(classical_validate_word(g, *w).valid);
        CHECK(is_well_matched(*w));
        if (!DocumentTree::parse_document(*w) && is_well_matched(*w)) {
            ++duplicate_seen; // only duplicate keys make a word unparseable
        }
        if (++count > 3000) break;
    }
    CHECK(count > 50);
    CHECK(duplicate_seen > 0);
}

TEST_CASE("universal grammar: duplicate-key deviation still yields invalid docs") {
    PushdownAlphabet alphabet({"a", "b"});
    Grammar u = universal_grammar(alphabet);
    GeneratorConfig rc;
    rc.mode = GeneratorConfig::Mode::Random;
    rc.max_depth = 2;
    rc.seed = 5;
    auto gen = gen_invalid(u, rc);
    for (int i = 0; i < 20; ++i) {
        auto w = gen->next();
        REQUIRE(w.has_value());
        CHECK_FALSE(classical_validate_word(u, *w).valid);
    }
}

TEST_CASE("gen_ordered sorts every object and is idempotent") {
    Grammar g = example5();
    GeneratorConfig rc;
    rc.mode = GeneratorConfig::Mode::Random;
    rc.max_depth = 3;
    rc.seed = 9;
    auto gen = gen_valid(g, rc);
    for (int i = 0; i < 100; ++i) {
        Word w = *gen->next();
        Word shuffled = permute_objects(w, i * 31 + 7);
        Word sorted = gen_ordered(shuffled);
        CHECK(gen_ordered(sorted) == sorted);
        CHECK(gen_ordered(w) == sorted);
        // sorting preserves validity
        CHECK(classical_validate_word(g, sorted).valid);
    }
}

TEST_CASE("random generators honour the depth bound") {
    Grammar g = recursive_list();
    GeneratorConfig rc;
    rc.mode = GeneratorConfig::Mode::Random;
    rc.max_depth = 4;
    rc.seed = 11;
    auto gen = gen_valid(g, rc);
    for (int i = 0; i < 100; ++i) {
        Word w = *gen->next();
        CHECK(depth(w) <= 4);
    }
}
