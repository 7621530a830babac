#include <doctest.h>

#include "jsonvpa/grammar.hpp"
#include "jsonvpa/lexer.hpp"
#include "jsonvpa/schema_loader.hpp"

using namespace jsonvpa;

namespace {

// The running example grammar: optional keywords key, nested conference
// object. Keys: 0 title, 1 keywords, 2 conference, 3 name, 4 year.
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

DocumentTree example_doc() {
    DocumentTree conference = DocumentTree::object({
        {3, DocumentTree::primitive(Prim::Str)},
        {4, DocumentTree::primitive(Prim::Int)},
    });
    DocumentTree keywords = DocumentTree::array({
        DocumentTree::primitive(Prim::Str),
        DocumentTree::primitive(Prim::Str),
        DocumentTree::primitive(Prim::Str),
    });
    return DocumentTree::object({
        {0, DocumentTree::primitive(Prim::Str)},
        {1, std::move(keywords)},
        {2, std::move(conference)},
    });
}

// Fully reversed pair order at both nesting levels.
DocumentTree example_doc_permuted() {
    DocumentTree conference = DocumentTree::object({
        {4, DocumentTree::primitive(Prim::Int)},
        {3, DocumentTree::primitive(Prim::Str)},
    });
    DocumentTree keywords = DocumentTree::array({
        DocumentTree::primitive(Prim::Str),
        DocumentTree::primitive(Prim::Str),
        DocumentTree::primitive(Prim::Str),
    });
    return DocumentTree::object({
        {2, std::move(conference)},
        {1, std::move(keywords)},
        {0, DocumentTree::primitive(Prim::Str)},
    });
}

} // namespace

TEST_CASE("satisfies accepts the example document in any pair order") {
    Grammar g = example5();
    CHECK(satisfies(g, 0, example_doc()));
    CHECK(satisfies(g, 0, example_doc_permuted()));
}

TEST_CASE("missing required key fails both axiom productions") {
    Grammar g = example5();
    // only conference: title is required by both S0 productions
    DocumentTree doc = DocumentTree::object({
        {2, DocumentTree::object({{3, DocumentTree::primitive(Prim::Str)},
                                  {4, DocumentTree::primitive(Prim::Int)}})},
    });
    CHECK_FALSE(satisfies(g, 0, doc));
    // title + conference matches production (2)
    DocumentTree doc2 = DocumentTree::object({
        {0, DocumentTree::primitive(Prim::Str)},
        {2, DocumentTree::object({{3, DocumentTree::primitive(Prim::Str)},
                                  {4, DocumentTree::primitive(Prim::Int)}})},
    });
    CHECK(satisfies(g, 0, doc2));
}

TEST_CASE("negation clause") {
    Grammar g(PushdownAlphabet(std::vector<std::string>{}));
    NonterminalId s = g.add_nonterminal("S");
    NonterminalId t = g.add_nonterminal("T");
    g.add_production(t, Production::primitive(Prim::True));
    g.add_production(s, Production::not_of(t));
    CHECK(satisfies(g, s, DocumentTree::primitive(Prim::False)));
    CHECK_FALSE(satisfies(g, s, DocumentTree::primitive(Prim::True)));
}

TEST_CASE("classical_validate agrees with satisfies and counts work") {
    Grammar g = example5();
    auto r = classical_validate(g, example_doc());
    CHECK(r.valid);
    CHECK(r.evaluations > 0);
    auto r2 = classical_validate(g, example_doc_permuted());
    CHECK(r2.valid);

    // permutation closure at evaluation level: every permutation of an
    // object's pairs gives the same verdict
    DocumentTree conference_pairs[2] = {
        DocumentTree::object({{3, DocumentTree::primitive(Prim::Str)},
                              {4, DocumentTree::primitive(Prim::Int)}}),
        DocumentTree::object({{4, DocumentTree::primitive(Prim::Int)},
                              {3, DocumentTree::primitive(Prim::Str)}}),
    };
    for (const auto& c : conference_pairs) {
        DocumentTree doc = DocumentTree::object({
            {0, DocumentTree::primitive(Prim::Str)},
            {2, c},
        });
        CHECK(classical_validate(g, doc).valid);
    }
}

TEST_CASE("classical_validate_word rejects non-documents") {
    Grammar g = example5();
    CHECK_FALSE(classical_validate_word(g, {AbstractSymbol::prim(Prim::Str)}).valid);
    CHECK_FALSE(classical_validate_word(g, {}).valid);
    // duplicate keys never parse
    Word dup = {AbstractSymbol::lbrace(), AbstractSymbol::key(0),
                AbstractSymbol::prim(Prim::Str), AbstractSymbol::comma(), AbstractSymbol::key(0),
                AbstractSymbol::prim(Prim::Str), AbstractSymbol::rbrace()};
    CHECK_FALSE(classical_validate_word(g, dup).valid);
    CHECK(classical_validate_word(g, example_doc().to_word()).valid);
}

TEST_CASE("universal grammar accepts small documents and rejects bare values") {
    PushdownAlphabet alphabet({"a", "b"});
    Grammar u = universal_grammar(alphabet);
    NonterminalId axiom = u.axioms().front();

    CHECK(satisfies(u, axiom, DocumentTree::object({})));
    CHECK(satisfies(u, axiom,
                    DocumentTree::object({{0, DocumentTree::primitive(Prim::Null)},
                                          {1, DocumentTree::array({})}})));
    CHECK(satisfies(u, axiom,
                    DocumentTree::object({{0, DocumentTree::object({{1, DocumentTree::array({
                                                  DocumentTree::primitive(Prim::Num)})}})}})));
    CHECK_FALSE(satisfies(u, axiom, DocumentTree::primitive(Prim::Str)));

    // the running example document is universal too
    Grammar u5 = universal_grammar(example5().alphabet());
    CHECK(satisfies(u5, u5.axioms().front(), example_doc()));
}

TEST_CASE("well-formedness checks") {
    SUBCASE("direct Boolean self-cycle") {
        Grammar g(PushdownAlphabet(std::vector<std::string>{}));
        NonterminalId s = g.add_nonterminal("S");
        g.add_production(s, Production::not_of(s));
        g.mark_axiom(s);
        CHECK_FALSE(check_well_formed(g).ok);
    }
    SUBCASE("alias chain back through a disjunction") {
        Grammar g(PushdownAlphabet(std::vector<std::string>{}));
        NonterminalId s = g.add_nonterminal("S");
        NonterminalId s1 = g.add_nonterminal("S1");
        NonterminalId s2 = g.add_nonterminal("S2");
        g.add_production(s, Production::or_of({s1, s2}));
        g.add_production(s1, Production::primitive(Prim::Str));
        g.add_production(s2, Production::or_of({s}));
        g.mark_axiom(s);
        auto wf = check_well_formed(g);
        CHECK_FALSE(wf.ok);
        CHECK(wf.diagnostic.find("cyclic") != std::string::npos);
    }
    SUBCASE("recursion through object and array is legal") {
        Grammar g(PushdownAlphabet({"name", "children"}));
        NonterminalId s0 = g.add_nonterminal("S0");
        NonterminalId str = g.add_nonterminal("Str");
        NonterminalId arr = g.add_nonterminal("Arr");
        g.add_production(str, Production::primitive(Prim::Str));
        g.add_production(arr, Production::array_fixed(s0, 1));
        g.add_production(s0, Production::object({{0, str}}));
        g.add_production(s0, Production::object({{0, str}, {1, arr}}));
        g.mark_axiom(s0);
        CHECK(check_well_formed(g).ok);
    }
    SUBCASE("axiom must produce objects") {
        Grammar g(PushdownAlphabet(std::vector<std::string>{}));
        NonterminalId s = g.add_nonterminal("S");
        g.add_production(s, Production::primitive(Prim::Str));
        g.mark_axiom(s);
        CHECK_FALSE(check_well_formed(g).ok);
    }
}

TEST_CASE("schema loader reproduces the example grammar") {
    std::string schema = R"({
      "type": "object",
      "properties": {
        "title": {"type": "string"},
        "keywords": {"type": "array", "items": {"type": "string"}},
        "conference": {
          "type": "object",
          "properties": {
            "name": {"type": "string"},
            "year": {"type": "integer"}
          },
          "required": ["name", "year"]
        }
      },
      "required": ["title", "conference"]
    })";
    Grammar g = load_json_schema(schema);
    CHECK(check_well_formed(g).ok);
    // two axiom productions: with and without the optional keywords key
    CHECK(g.productions(g.axioms().front()).size() == 2);

    // agrees with the hand-built grammar on the example documents, after
    // remapping keys to the loader's lexicographic alphabet
    auto remap = [&](const std::string& name) { return *g.alphabet().key_id(name); };
    DocumentTree conference = DocumentTree::object({
        {remap("name"), DocumentTree::primitive(Prim::Str)},
        {remap("year"), DocumentTree::primitive(Prim::Int)},
    });
    DocumentTree doc = DocumentTree::object({
        {remap("title"), DocumentTree::primitive(Prim::Str)},
        {remap("keywords"), DocumentTree::array({DocumentTree::primitive(Prim::Str)})},
        {remap("conference"), conference},
    });
    CHECK(classical_validate(g, doc).valid);

    DocumentTree wrong_year = DocumentTree::object({
        {remap("title"), DocumentTree::primitive(Prim::Str)},
        {remap("conference"),
         DocumentTree::object({{remap("name"), DocumentTree::primitive(Prim::Str)},
                               {remap("year"), DocumentTree::primitive(Prim::Num)}})},
    });
    CHECK_FALSE(classical_validate(g, wrong_year).valid);
}

TEST_CASE("schema loader keyword mapping") {
    CHECK(load_json_schema(R"({"type":"object","properties":{"k":{"enum":[1,2]}},"required":["k"]})")
              .alphabet()
              .enum_literals()
              .size() == 2);

    Grammar gi = load_json_schema(
        R"({"type":"object","properties":{"k":{"type":"integer"}},"required":["k"]})");
    auto& prods = gi.productions(*gi.find("#/properties/k"));
    REQUIRE(prods.size() == 1);
    CHECK(prods[0].kind == Production::Kind::Primitive);
    CHECK(prods[0].prim == Prim::Int);

    CHECK_THROWS_AS(load_json_schema(R"({"type":"object","minProperties":1})"),
                    UnsupportedKeywordError);
    CHECK_THROWS_AS(
        load_json_schema(
            R"({"type":"object","properties":{"k":{"type":"array","items":[{"type":"string"}]}},"required":["k"]})"),
        UnsupportedKeywordError);
    CHECK_THROWS_AS(load_json_schema("not json at all"), MalformedSchemaError);
}

TEST_CASE("recursive list schema loads and validates") {
    std::string schema = R"({
      "type": "object",
      "properties": {
        "name": {"type": "string"},
        "children": {"type": "array", "items": {"$ref": "#"}, "minItems": 1, "maxItems": 1}
      },
      "required": ["name"]
    })";
    Grammar g = load_json_schema(schema);
    CHECK(check_well_formed(g).ok);
    KeyId name = *g.alphabet().key_id("name");
    KeyId children = *g.alphabet().key_id("children");

    DocumentTree leaf = DocumentTree::object({{name, DocumentTree::primitive(Prim::Str)}});
    CHECK(classical_validate(g, leaf).valid);
    DocumentTree nested = DocumentTree::object({
        {name, DocumentTree::primitive(Prim::Str)},
        {children, DocumentTree::array({leaf})},
    });
    CHECK(classical_validate(g, nested).valid);
    DocumentTree two_children = DocumentTree::object({
        {name, DocumentTree::primitive(Prim::Str)},
        {children, DocumentTree::array({leaf, leaf})},
    });
    CHECK_FALSE(classical_validate(g, two_children).valid);
}

TEST_CASE("grammar serialization round-trip") {
    Grammar g = example5();
    Grammar back = Grammar::from_json(g.to_json());
    CHECK(back.num_nonterminals() == g.num_nonterminals());
    CHECK(classical_validate(back, example_doc()).valid);
}

TEST_CASE("document parsing") {
    Grammar g = example5();
    Word w = example_doc().to_word();
    auto parsed = DocumentTree::parse_document(w);
    REQUIRE(parsed.has_value());
    CHECK(*parsed == example_doc());
    CHECK(parsed->nesting_depth() == 2);
    CHECK(depth(w) == 2);

    // non-object root
    CHECK_FALSE(DocumentTree::parse_document({AbstractSymbol::prim(Prim::Int)}).has_value());
    // truncated
    Word trunc(w.begin(), w.end() - 1);
    CHECK_FALSE(DocumentTree::parse_document(trunc).has_value());
}
