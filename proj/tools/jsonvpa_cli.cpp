#include <chrono>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "jsonvpa/artifact.hpp"
#include "jsonvpa/construct.hpp"
#include "jsonvpa/families.hpp"
#include "jsonvpa/generator.hpp"
#include "jsonvpa/learner.hpp"
#include "jsonvpa/lexer.hpp"
#include "jsonvpa/schema_loader.hpp"
#include "jsonvpa/validator.hpp"

using namespace jsonvpa;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCompile = 3;

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << content;
}

Word parse_abstract_line(const std::string& line, const PushdownAlphabet& alphabet) {
    Word out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
        auto s = alphabet.symbol_from_name(tok);
        if (!s) {
            throw std::runtime_error("unknown abstract symbol: " + tok);
        }
        out.push_back(*s);
    }
    return out;
}

std::optional<std::vector<std::string>> parse_order_flag(const std::string& order) {
    if (order.empty() || order == "lexicographic") {
        return std::nullopt;
    }
    std::vector<std::string> keys;
    std::string current;
    for (char c : order) {
        if (c == ',') {
            keys.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    keys.push_back(current);
    return keys;
}

struct FileVerdict {
    std::string path;
    ValidationResult result;
};

FileVerdict validate_one_file(const Artifact& art, const std::string& path, bool abstract_format) {
    FileVerdict v{path, {}};
    std::string content = read_file(path);
    if (abstract_format) {
        // every nonempty line is one abstract document; the file verdict is
        // the conjunction
        std::istringstream lines(content);
        std::string line;
        ValidationResult last;
        last.valid = true;
        bool any = false;
        while (std::getline(lines, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            any = true;
            Word w = parse_abstract_line(line, art.alphabet);
            auto r = validate_word(art.automaton, art.key_graph, art.alphabet, w);
            if (!r.valid) {
                v.result = r;
                return v;
            }
            last = r;
        }
        v.result = last;
        v.result.valid = any ? v.result.valid : true;
        return v;
    }
    std::istringstream in(content);
    JsonLexer lexer(in, art.alphabet);
    v.result = validate_stream(art.automaton, art.key_graph, art.alphabet, lexer);
    return v;
}

int cmd_compile(const std::string& schema_path, const std::string& out_path,
                const std::string& order, bool learn, bool unordered, std::size_t depth,
                std::size_t docs_per_depth, bool exhaustive, std::uint64_t seed) {
    Grammar grammar = load_json_schema(read_file(schema_path), parse_order_flag(order));
    nlohmann::json report;
    report["keys"] = grammar.alphabet().keys();

    Artifact art{OneSevpa(2, grammar.alphabet().num_internals()), KeyGraph{},
                 grammar.alphabet(), false};
    if (learn) {
        TeacherConfig tc;
        tc.max_depth = depth;
        tc.docs_per_depth = docs_per_depth;
        tc.exhaustive = exhaustive;
        tc.seed = seed;
        Teacher teacher(grammar, tc);
        LearnResult lr = learn_one_sevpa(teacher);
        art = build_artifact(lr.automaton, grammar.alphabet(), !lr.complete);
        report["learning"] = nlohmann::json::parse(lr.report_json());
    } else {
        CompileReport cr;
        Vpa det = vpa_for_schema(grammar, !unordered, &cr);
        art = build_artifact(to_one_sevpa(det), grammar.alphabet(), false);
        report["construction"] = nlohmann::json::parse(cr.to_json());
    }
    report["states"] = art.automaton.num_states();
    report["key_graph_vertices"] = art.key_graph.num_vertices();
    report["key_graph_edges"] = art.key_graph.num_edges();
    write_file(out_path, art.to_json());
    std::cout << report.dump(2) << "\n";
    return kExitOk;
}

int cmd_validate(const std::string& artifact_path, const std::vector<std::string>& files,
                 bool abstract_format) {
    Artifact art = Artifact::from_json(read_file(artifact_path));
    std::vector<std::string> inputs = files.empty() ? std::vector<std::string>{"-"} : files;

    std::vector<FileVerdict> verdicts(inputs.size());
    if (inputs.size() == 1) {
        verdicts[0] = validate_one_file(art, inputs[0], abstract_format);
    } else {
        // one validator per file over the shared artifact
        std::vector<std::future<FileVerdict>> futures;
        futures.reserve(inputs.size());
        for (const auto& path : inputs) {
            futures.push_back(std::async(std::launch::async, [&art, path, abstract_format] {
                return validate_one_file(art, path, abstract_format);
            }));
        }
        for (std::size_t i = 0; i < futures.size(); ++i) {
            verdicts[i] = futures[i].get();
        }
    }

    bool all_valid = true;
    for (const auto& v : verdicts) {
        if (v.result.valid) {
            std::cout << v.path << ": valid\n";
        } else {
            all_valid = false;
            std::cout << v.path << ": invalid (" << reject_reason_name(v.result.reason)
                      << " at symbol " << v.result.reject_index << ")\n";
        }
    }
    return all_valid ? kExitOk : kExitInvalid;
}

int cmd_validate_classical(const std::string& schema_path, const std::vector<std::string>& files,
                           bool abstract_format, const std::string& order) {
    Grammar grammar = load_json_schema(read_file(schema_path), parse_order_flag(order));
    std::vector<std::string> inputs = files.empty() ? std::vector<std::string>{"-"} : files;
    bool all_valid = true;
    for (const auto& path : inputs) {
        bool valid = false;
        std::size_t evals = 0;
        try {
            std::string content = read_file(path);
            Word w = abstract_format ? parse_abstract_line(content, grammar.alphabet())
                                     : abstract_lex(content, grammar.alphabet());
            auto r = classical_validate_word(grammar, w);
            valid = r.valid;
            evals = r.evaluations;
        } catch (const LexError&) {
            valid = false;
        }
        std::cout << path << ": " << (valid ? "valid" : "invalid") << " (evaluations " << evals
                  << ")\n";
        all_valid = all_valid && valid;
    }
    return all_valid ? kExitOk : kExitInvalid;
}

int cmd_generate(const std::string& schema_path, bool invalid, bool exhaustive,
                 std::uint64_t seed, std::size_t depth, std::size_t count,
                 const std::string& format, bool ordered, const std::string& order) {
    Grammar grammar = load_json_schema(read_file(schema_path), parse_order_flag(order));
    GeneratorConfig gc;
    gc.mode = exhaustive ? GeneratorConfig::Mode::Exhaustive : GeneratorConfig::Mode::Random;
    gc.max_depth = depth;
    gc.seed = seed;
    auto gen = invalid ? gen_invalid(grammar, gc) : gen_valid(grammar, gc);
    for (std::size_t i = 0; i < count; ++i) {
        auto w = gen->next();
        if (!w) break;
        Word doc = ordered ? gen_ordered(*w) : *w;
        if (format == "abstract") {
            std::cout << word_to_string(doc, grammar.alphabet()) << "\n";
        } else {
            std::cout << render_json(doc, grammar.alphabet()) << "\n";
        }
    }
    return kExitOk;
}

int cmd_bench_worstcase(std::size_t ell, std::size_t docs) {
    Grammar grammar = worstcase_grammar(ell);
    Vpa det = vpa_for_schema(grammar, true);
    Artifact art = build_artifact(to_one_sevpa(det), grammar.alphabet(), false);

    nlohmann::json out;
    out["ell"] = ell;
    out["automaton_states"] = art.automaton.num_states();
    auto& rows = out["documents"] = nlohmann::json::array();

    // the single valid document plus invalid documents padded to larger
    // sizes (all keys present, one value an array of strings)
    std::vector<Word> corpus;
    {
        DocumentTree valid = DocumentTree::object(
            {{static_cast<KeyId>(ell - 1), DocumentTree::primitive(Prim::Str)}});
        corpus.push_back(valid.to_word());
        for (std::size_t pad = 0; pad < docs; ++pad) {
            DocumentTree::Object pairs;
            DocumentTree::Array padding;
            for (std::size_t i = 0; i < 5 + 5 * pad; ++i) {
                padding.push_back(DocumentTree::primitive(Prim::Str));
            }
            pairs.emplace_back(0, DocumentTree::array(std::move(padding)));
            for (std::size_t k = 1; k < ell; ++k) {
                pairs.emplace_back(static_cast<KeyId>(k), DocumentTree::primitive(Prim::Str));
            }
            corpus.push_back(DocumentTree::object(std::move(pairs)).to_word());
        }
    }

    bool verdicts_agree = true;
    using Clock = std::chrono::steady_clock;
    for (const Word& w : corpus) {
        auto t0 = Clock::now();
        auto streaming = validate_word(art.automaton, art.key_graph, art.alphabet, w);
        auto t1 = Clock::now();
        auto classical = classical_validate_word(grammar, w);
        auto t2 = Clock::now();
        verdicts_agree = verdicts_agree && streaming.valid == classical.valid;
        nlohmann::json row;
        row["symbols"] = w.size();
        row["valid"] = classical.valid;
        row["classical_evaluations"] = classical.evaluations;
        row["streaming_transitions"] = streaming.transitions_applied;
        row["streaming_symbols"] = streaming.symbols_consumed;
        row["streaming_us"] = std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
        row["classical_us"] = std::chrono::duration_cast<std::chrono::microseconds>(t2 - t1).count();
        row["agree"] = streaming.valid == classical.valid;
        rows.push_back(std::move(row));
    }
    out["verdicts_agree"] = verdicts_agree;
    std::cout << out.dump(2) << "\n";
    return verdicts_agree ? kExitOk : kExitInvalid;
}

int cmd_bench_permfamily(std::size_t n) {
    Grammar grammar = permutation_family(n);
    Vpa det = vpa_for_schema(grammar, true);
    Artifact art = build_artifact(to_one_sevpa(det), grammar.alphabet(), false);

    std::size_t subsets = std::size_t{1} << n;
    bool all_verified = verify_subset_distinguishability(grammar, n);

    nlohmann::json out;
    out["n"] = n;
    out["ordered_states"] = art.automaton.num_states();
    out["subset_prefixes"] = subsets;
    out["all_distinguished"] = all_verified;
    std::cout << out.dump(2) << "\n";
    return all_verified ? kExitOk : kExitInvalid;
}

int cmd_graph(const std::string& artifact_path, bool automaton) {
    Artifact art = Artifact::from_json(read_file(artifact_path));
    std::vector<std::string> call_names = {"{", "["};
    std::vector<std::string> internal_names;
    for (std::size_t i = 0; i < art.alphabet.num_internals(); ++i) {
        internal_names.push_back(art.alphabet.symbol_name(art.alphabet.internal_at(i)));
    }
    if (automaton) {
        std::cout << art.automaton.to_dot(call_names, internal_names);
    } else {
        std::cout << art.key_graph.to_dot(art.alphabet);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming JSON validation with visibly pushdown automata"};
    app.require_subcommand(1);

    // compile
    auto* compile = app.add_subcommand("compile", "Compile a JSON schema into an automaton artifact");
    std::string schema_path, out_path, order;
    bool learn = false, unordered = false, exhaustive = false;
    std::size_t depth = 3, docs_per_depth = 100;
    std::uint64_t seed = 1;
    compile->add_option("schema", schema_path, "JSON schema file")->required();
    compile->add_option("-o,--output", out_path, "artifact output path")->required();
    compile->add_option("--order", order, "comma-separated key order or 'lexicographic'");
    compile->add_flag("--learn", learn, "learn the automaton instead of direct construction");
    compile->add_flag("--unordered", unordered, "construct for all key orders (small schemas)");
    compile->add_option("--depth", depth, "teacher document depth (learning)");
    compile->add_option("--docs-per-depth", docs_per_depth, "documents per depth per query");
    compile->add_flag("--exhaustive", exhaustive, "exhaustive teacher generators");
    compile->add_option("--seed", seed, "random seed");

    // validate
    auto* validate = app.add_subcommand("validate", "Stream-validate documents against an artifact");
    std::string artifact_path;
    std::vector<std::string> files;
    bool abstract_format = false;
    validate->add_option("artifact", artifact_path, "artifact file")->required();
    validate->add_option("files", files, "document files ('-' for stdin)");
    validate->add_flag("--abstract", abstract_format, "documents are abstract symbol lines");

    // validate-classical
    auto* classical = app.add_subcommand("validate-classical",
                                         "Validate documents with the tree-walking validator");
    std::string cschema, corder;
    std::vector<std::string> cfiles;
    bool cabstract = false;
    classical->add_option("schema", cschema, "JSON schema file")->required();
    classical->add_option("files", cfiles, "document files ('-' for stdin)");
    classical->add_flag("--abstract", cabstract, "documents are abstract symbol lines");
    classical->add_option("--order", corder, "key order");

    // generate
    auto* generate = app.add_subcommand("generate", "Generate valid or invalid documents");
    std::string gschema, gformat = "json", gorder;
    bool ginvalid = false, gexhaustive = false, gordered = false;
    std::uint64_t gseed = 0;
    std::size_t gdepth = 3, gcount = 10;
    generate->add_option("schema", gschema, "JSON schema file")->required();
    generate->add_flag("--invalid", ginvalid, "generate invalid documents");
    generate->add_flag("--exhaustive", gexhaustive, "exhaustive enumeration");
    generate->add_option("--random", gseed, "random mode with this seed");
    generate->add_option("--depth", gdepth, "maximal nesting depth");
    generate->add_option("--count", gcount, "number of documents");
    generate->add_option("--format", gformat, "output format: json or abstract");
    generate->add_flag("--ordered", gordered, "sort object pairs by the key order");
    generate->add_option("--order", gorder, "key order");

    // bench
    auto* bench = app.add_subcommand("bench", "Benchmark families");
    auto* worst = bench->add_subcommand("worstcase", "Adversarial conjunction family");
    std::size_t ell = 10, wdocs = 8;
    worst->add_option("--ell", ell, "family size");
    worst->add_option("--docs", wdocs, "number of padded invalid documents");
    auto* perm = bench->add_subcommand("permfamily", "Permutation family");
    std::size_t pn = 4;
    perm->add_option("--n", pn, "number of keys");
    bench->require_subcommand(1);

    // graph
    auto* graph = app.add_subcommand("graph", "Emit DOT for the key graph or automaton");
    std::string gr_artifact;
    bool gr_dot = false, gr_automaton = false;
    graph->add_option("artifact", gr_artifact, "artifact file")->required();
    graph->add_flag("--dot", gr_dot, "DOT output (default)");
    graph->add_flag("--automaton", gr_automaton, "emit the automaton instead of the key graph");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (compile->parsed()) {
            return cmd_compile(schema_path, out_path, order, learn, unordered, depth,
                               docs_per_depth, exhaustive, seed);
        }
        if (validate->parsed()) {
            return cmd_validate(artifact_path, files, abstract_format);
        }
        if (classical->parsed()) {
            return cmd_validate_classical(cschema, cfiles, cabstract, corder);
        }
        if (generate->parsed()) {
            return cmd_generate(gschema, ginvalid, gexhaustive, gseed, gdepth, gcount, gformat,
                                gordered, gorder);
        }
        if (bench->parsed()) {
            if (worst->parsed()) return cmd_bench_worstcase(ell, wdocs);
            if (perm->parsed()) return cmd_bench_permfamily(pn);
        }
        if (graph->parsed()) {
            return cmd_graph(gr_artifact, gr_automaton);
        }
    } catch (const MalformedSchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitCompile;
    } catch (const UnsupportedKeywordError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitCompile;
    } catch (const UnsupportedBooleanError& e) {
        std::cerr << "compile error: " << e.what() << "\n";
        return kExitCompile;
    } catch (const IllFormedGrammarError& e) {
        std::cerr << "grammar error: " << e.what() << "\n";
        return kExitCompile;
    } catch (const NoValidDocumentError& e) {
        std::cerr << "generation error: " << e.what() << "\n";
        return kExitCompile;
    } catch (const NoInvalidDocumentError& e) {
        std::cerr << "generation error: " << e.what() << "\n";
        return kExitCompile;
    } catch (const ArtifactError& e) {
        std::cerr << "artifact error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
