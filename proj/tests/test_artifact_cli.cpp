#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "jsonvpa/artifact.hpp"
#include "jsonvpa/construct.hpp"
#include "jsonvpa/schema_loader.hpp"
#include "jsonvpa/validator.hpp"

using namespace jsonvpa;

namespace {

const char* kSchema = R"({
  "type": "object",
  "properties": {
    "title": {"type": "string"},
    "keywords": {"type": "array", "items": {"type": "string"}},
    "conference": {
      "type": "object",
      "properties": {"name": {"type": "string"}, "year": {"type": "integer"}},
      "required": ["name", "year"]
    }
  },
  "required": ["title", "conference"]
})";

const char* kValidDoc =
    R"({"title": "a", "conference": {"year": 2020, "name": "b"}, "keywords": ["x", "y"]})";

void write(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& cmd) {
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("artifact round-trip preserves verdicts and checks the hash link") {
    Grammar g = load_json_schema(kSchema);
    Artifact art = build_artifact(to_one_sevpa(vpa_for_schema(g, true)), g.alphabet(), false);

    std::string json = art.to_json();
    Artifact back = Artifact::from_json(json);

    Word doc = abstract_lex(kValidDoc, g.alphabet());
    auto before = validate_word(art.automaton, art.key_graph, art.alphabet, doc);
    auto after = validate_word(back.automaton, back.key_graph, back.alphabet, doc);
    CHECK(before.valid);
    CHECK(before.valid == after.valid);
    CHECK(before.reject_index == after.reject_index);

    // tampering with the automaton breaks the link
    auto pos = json.find("\"finals\":[");
    REQUIRE(pos != std::string::npos);
    std::string tampered = json;
    tampered.insert(pos + 10, "0,");
    CHECK_THROWS_AS(Artifact::from_json(tampered), ArtifactError);
}

#ifdef JSONVPA_CLI_PATH

TEST_CASE("command line: compile, validate, generate, graph") {
    std::string cli = JSONVPA_CLI_PATH;
    std::string dir = "cli_tmp";
    (void)run("mkdir -p " + dir);
    write(dir + "/schema.json", kSchema);
    write(dir + "/valid.json", kValidDoc);
    write(dir + "/invalid.json", R"({"title": "a"})");
    write(dir + "/truncated.json", R"({"title": )");

    CHECK(run(cli + " compile " + dir + "/schema.json -o " + dir + "/artifact.json > " + dir +
              "/compile.log") == 0);

    CHECK(run(cli + " validate " + dir + "/artifact.json " + dir + "/valid.json > " + dir +
              "/v1.log") == 0);
    CHECK(run(cli + " validate " + dir + "/artifact.json " + dir + "/invalid.json > " + dir +
              "/v2.log") == 1);
    CHECK(run(cli + " validate " + dir + "/artifact.json " + dir + "/truncated.json > " + dir +
              "/v3.log") == 1);
    // multiple files: exit 1 if any invalid, verdict per file
    CHECK(run(cli + " validate " + dir + "/artifact.json " + dir + "/valid.json " + dir +
              "/invalid.json > " + dir + "/v4.log") == 1);
    std::string v4 = slurp(dir + "/v4.log");
    CHECK(v4.find("valid.json: valid") != std::string::npos);
    CHECK(v4.find("invalid.json: invalid") != std::string::npos);

    // classical agrees
    CHECK(run(cli + " validate-classical " + dir + "/schema.json " + dir + "/valid.json > " +
              dir + "/c1.log") == 0);
    CHECK(run(cli + " validate-classical " + dir + "/schema.json " + dir + "/invalid.json > " +
              dir + "/c2.log") == 1);

    // learned artifact gives the same verdicts
    CHECK(run(cli + " compile " + dir + "/schema.json --learn --exhaustive --depth 3 -o " + dir +
              "/learned.json > " + dir + "/learn.log") == 0);
    CHECK(run(cli + " validate " + dir + "/learned.json " + dir + "/valid.json > /dev/null") == 0);
    CHECK(run(cli + " validate " + dir + "/learned.json " + dir + "/invalid.json > /dev/null") ==
          1);

    // generation round-trips through the streaming validator
    CHECK(run(cli + " generate " + dir + "/schema.json --exhaustive --depth 3 --count 5 > " +
              dir + "/docs.jsonl") == 0);
    std::istringstream docs(slurp(dir + "/docs.jsonl"));
    std::string line;
    int produced = 0;
    while (std::getline(docs, line)) {
        if (line.empty()) continue;
        write(dir + "/gen_doc.json", line);
        CHECK(run(cli + " validate " + dir + "/artifact.json " + dir + "/gen_doc.json > /dev/null") ==
              0);
        ++produced;
    }
    CHECK(produced == 5);

    // invalid generation is rejected by both validators
    CHECK(run(cli + " generate " + dir + "/schema.json --invalid --random 7 --depth 3 --count 3 > " +
              dir + "/bad.jsonl") == 0);
    std::istringstream bad(slurp(dir + "/bad.jsonl"));
    while (std::getline(bad, line)) {
        if (line.empty()) continue;
        write(dir + "/bad_doc.json", line);
        CHECK(run(cli + " validate " + dir + "/artifact.json " + dir + "/bad_doc.json > /dev/null") ==
              1);
        CHECK(run(cli + " validate-classical " + dir + "/schema.json " + dir +
                  "/bad_doc.json > /dev/null") == 1);
    }

    // DOT output mentions the key graph vertices
    CHECK(run(cli + " graph " + dir + "/artifact.json --dot > " + dir + "/kg.dot") == 0);
    CHECK(slurp(dir + "/kg.dot").find("digraph keygraph") != std::string::npos);
    CHECK(run(cli + " graph " + dir + "/artifact.json --automaton > " + dir + "/vpa.dot") == 0);
    CHECK(slurp(dir + "/vpa.dot").find("digraph vpa") != std::string::npos);

    // usage error
    CHECK(run(cli + " validate missing-artifact.json 2> /dev/null > /dev/null") == 2);
}

TEST_CASE("command line: benchmark families") {
    std::string cli = JSONVPA_CLI_PATH;
    std::string dir = "cli_tmp";
    (void)run("mkdir -p " + dir);
    CHECK(run(cli + " bench permfamily --n 3 > " + dir + "/perm.json") == 0);
    std::string perm = slurp(dir + "/perm.json");
    CHECK(perm.find("\"all_distinguished\": true") != std::string::npos);

    CHECK(run(cli + " bench worstcase --ell 4 --docs 2 > " + dir + "/worst.json") == 0);
    std::string worst = slurp(dir + "/worst.json");
    CHECK(worst.find("\"verdicts_agree\": true") != std::string::npos);
}

#endif
