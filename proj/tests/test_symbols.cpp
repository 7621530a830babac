#include <doctest.h>

#include <functional>

#include "jsonvpa/lexer.hpp"
#include "jsonvpa/symbols.hpp"

using namespace jsonvpa;

namespace {

PushdownAlphabet running_alphabet() {
    return PushdownAlphabet({"title", "keywords", "conference", "name", "year"});
}

Word parse_word(const PushdownAlphabet& alphabet, const std::string& text) {
    Word out;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t space = text.find(' ', start);
        std::string tok = text.substr(start, space == std::string::npos ? std::string::npos
                                                                        : space - start);
        if (!tok.empty()) {
            auto s = alphabet.symbol_from_name(tok);
            REQUIRE(s.has_value());
            out.push_back(*s);
        }
        if (space == std::string::npos) break;
        start = space + 1;
    }
    return out;
}

// Independent oracle: recursive bracket matcher over call/return symbols.
bool brackets_balanced(const Word& w, std::size_t& pos) {
    while (pos < w.size()) {
        const auto& s = w[pos];
        if (s.is_call()) {
            AbstractSymbol open = s;
            ++pos;
            if (!brackets_balanced(w, pos)) return false;
            if (pos >= w.size() || w[pos] != open.matching()) return false;
            ++pos;
        } else if (s.is_return()) {
            return true; // caller checks the match
        } else {
            ++pos;
        }
    }
    return true;
}

bool brackets_oracle(const Word& w) {
    std::size_t pos = 0;
    if (!brackets_balanced(w, pos)) return false;
    return pos == w.size();
}

} // namespace

TEST_CASE("abstract lexing of the running example document") {
    auto alphabet = running_alphabet();
    std::string doc = R"({
        "title": "Streaming properties",
        "keywords": ["json", "json document", "validation"],
        "conference": { "name": "SomeConf", "year": 2023 }
    })";
    Word got = abstract_lex(doc, alphabet);
    Word want = parse_word(alphabet,
                           "{ key:title s # key:keywords [ s # s # s ] # key:conference "
                           "{ key:name s # key:year i } }");
    CHECK(got == want);
    CHECK(is_well_matched(got));
    CHECK(depth(got) == 2);
    CHECK(balance(got) == 0);
}

TEST_CASE("lexing the empty object") {
    auto alphabet = running_alphabet();
    Word got = abstract_lex("{}", alphabet);
    REQUIRE(got.size() == 2);
    CHECK(got[0] == AbstractSymbol::lbrace());
    CHECK(got[1] == AbstractSymbol::rbrace());
}

TEST_CASE("numbers lex to i exactly for integral syntax") {
    auto alphabet = running_alphabet();
    auto lex_value_of_year = [&](const std::string& literal) {
        Word w = abstract_lex("{\"year\": " + literal + "}", alphabet);
        REQUIRE(w.size() == 4);
        return w[2];
    };
    CHECK(lex_value_of_year("3") == AbstractSymbol::prim(Prim::Int));
    CHECK(lex_value_of_year("3.5") == AbstractSymbol::prim(Prim::Num));
    CHECK(lex_value_of_year("-12") == AbstractSymbol::prim(Prim::Int));
    CHECK(lex_value_of_year("3e2") == AbstractSymbol::prim(Prim::Num));
    CHECK(lex_value_of_year("true") == AbstractSymbol::prim(Prim::True));
    CHECK(lex_value_of_year("null") == AbstractSymbol::prim(Prim::Null));
}

TEST_CASE("enum literals abstract to e everywhere") {
    PushdownAlphabet alphabet({"color"}, {"\"red\"", "2"});
    Word w = abstract_lex(R"({"color": "red"})", alphabet);
    CHECK(w[2] == AbstractSymbol::prim(Prim::Enum));
    w = abstract_lex(R"({"color": 2})", alphabet);
    CHECK(w[2] == AbstractSymbol::prim(Prim::Enum));
    w = abstract_lex(R"({"color": 3})", alphabet);
    CHECK(w[2] == AbstractSymbol::prim(Prim::Int));
}

TEST_CASE("lexer errors") {
    auto alphabet = running_alphabet();
    CHECK_THROWS_AS(abstract_lex(R"({"nosuch": 1})", alphabet), UnknownKeyError);
    CHECK_THROWS_AS(abstract_lex("{\"title\": \"unterminated", alphabet), LexError);
    CHECK_THROWS_AS(abstract_lex("{\"title\": @}", alphabet), LexError);
}

TEST_CASE("escaped characters in keys compare after unescaping") {
    PushdownAlphabet alphabet({"a\"b"});
    Word w = abstract_lex(R"({"a\"b": 1})", alphabet);
    CHECK(w[1] == AbstractSymbol::key(0));
}

TEST_CASE("balance basics") {
    auto alphabet = running_alphabet();
    CHECK(balance({}) == 0);
    CHECK(balance(parse_word(alphabet, "{ key:title s")) == 1);
    Word example = parse_word(alphabet,
                              "{ key:title s # key:keywords [ s # s # s ] # key:conference "
                              "{ key:name s # key:year i } }");
    CHECK(balance(example) == 0);
    // prefix balance >= 0, suffix balance <= 0 for well-matched words
    for (std::size_t i = 0; i <= example.size(); ++i) {
        Word prefix(example.begin(), example.begin() + i);
        Word suffix(example.begin() + i, example.end());
        CHECK(balance(prefix) >= 0);
        CHECK(balance(suffix) <= 0);
    }
}

TEST_CASE("well-matchedness against a brute-force bracket matcher") {
    auto alphabet = running_alphabet();
    CHECK(is_well_matched(parse_word(alphabet, "{ ]")) == false);
    CHECK(is_well_matched(parse_word(alphabet, "{ }")));

    // exhaustive: all words of length <= 4 over the four brackets
    std::vector<AbstractSymbol> brackets = {
        AbstractSymbol::lbrace(), AbstractSymbol::rbrace(), AbstractSymbol::lbracket(),
        AbstractSymbol::rbracket()};
    std::function<void(Word&, std::size_t)> go = [&](Word& w, std::size_t remaining) {
        CHECK(is_well_matched(w) == brackets_oracle(w));
        if (remaining == 0) return;
        for (const auto& b : brackets) {
            w.push_back(b);
            go(w, remaining - 1);
            w.pop_back();
        }
    };
    Word w;
    go(w, 4);
}

TEST_CASE("depth") {
    auto alphabet = running_alphabet();
    CHECK(depth(parse_word(alphabet, "{ }")) == 1);
    CHECK(depth(parse_word(alphabet, "{ key:title [ { } ] }")) == 3);
    CHECK_THROWS_AS(depth(parse_word(alphabet, "{ {")), NotWellMatchedError);
}

TEST_CASE("relex of rendered word is identity") {
    auto alphabet = running_alphabet();
    Word example = parse_word(alphabet,
                              "{ key:title s # key:keywords [ s # s # s ] # key:conference "
                              "{ key:name s # key:year i } }");
    CHECK(abstract_lex(render_json(example, alphabet), alphabet) == example);
}

TEST_CASE("alphabet serialization round-trip") {
    PushdownAlphabet a({"b", "a", "c"}, {"\"x\""});
    auto b = PushdownAlphabet::from_json(a.to_json());
    CHECK(a == b);
    CHECK(b.keys() == std::vector<std::string>{"b", "a", "c"});
}

TEST_CASE("duplicate keys are rejected at alphabet construction") {
    CHECK_THROWS_AS(PushdownAlphabet({"a", "a"}), std::invalid_argument);
}
