#include "jsonvpa/schema_loader.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

namespace jsonvpa {

namespace {

using nlohmann::json;

const std::set<std::string> kSupported = {
    "type",     "enum",        "properties", "patternProperties", "required",
    "items",    "minItems",    "maxItems",   "allOf",             "anyOf",
    "not",      "$ref",        "definitions", "$defs",            "$schema",
    "$id",      "title",       "description",
};

void collect_unsupported(const json& node, std::vector<std::string>& out) {
    if (!node.is_object()) return;
    for (const auto& [k, v] : node.items()) {
        (void)v;
        if (kSupported.find(k) == kSupported.end()) {
            out.push_back(k);
        }
    }
}

struct Loader {
    json root;
    Grammar* grammar = nullptr;
    std::map<std::string, NonterminalId> by_pointer; // schema location -> nonterminal
    std::vector<std::pair<std::string, json>> pending; // locations awaiting translation

    const json& resolve_pointer(const std::string& ref) const {
        if (ref == "#") return root;
        if (ref.rfind("#/", 0) != 0) {
            throw UnsupportedKeywordError({"$ref:" + ref});
        }
        const json* node = &root;
        std::string path = ref.substr(2);
        std::size_t start = 0;
        while (start <= path.size()) {
            std::size_t slash = path.find('/', start);
            std::string token = path.substr(start, slash == std::string::npos ? std::string::npos
                                                                              : slash - start);
            if (!node->is_object() || !node->contains(token)) {
                throw MalformedSchemaError("dangling $ref: " + ref);
            }
            node = &(*node)[token];
            if (slash == std::string::npos) break;
            start = slash + 1;
        }
        return *node;
    }

    NonterminalId nonterminal_for(const std::string& location, const json& node) {
        if (node.is_object() && node.contains("$ref")) {
            std::string ref = node["$ref"].get<std::string>();
            auto it = by_pointer.find(ref);
            if (it != by_pointer.end()) return it->second;
            NonterminalId nt = grammar->add_nonterminal(ref);
            by_pointer.emplace(ref, nt);
            pending.emplace_back(ref, resolve_pointer(ref));
            return nt;
        }
        auto it = by_pointer.find(location);
        if (it != by_pointer.end()) return it->second;
        NonterminalId nt = grammar->add_nonterminal(location);
        by_pointer.emplace(location, nt);
        pending.emplace_back(location, node);
        return nt;
    }

    void translate(const std::string& location, const json& node);
};

std::string canonical_scalar_text(const json& v) {
    // Canonical literal text used for the enum abstraction: strings keep
    // their quotes, numbers/booleans/null their JSON rendering.
    return v.dump();
}

// All object keys used anywhere in the schema, plus enum literals.
void collect_keys_and_enums(const json& node, std::set<std::string>& keys,
                            std::set<std::string>& enums) {
    if (node.is_array()) {
        for (const auto& v : node) collect_keys_and_enums(v, keys, enums);
        return;
    }
    if (!node.is_object()) return;
    if (node.contains("properties") && node["properties"].is_object()) {
        for (const auto& [k, v] : node["properties"].items()) {
            keys.insert(k);
            collect_keys_and_enums(v, keys, enums);
        }
    }
    if (node.contains("patternProperties") && node["patternProperties"].is_object()) {
        for (const auto& [k, v] : node["patternProperties"].items()) {
            keys.insert(k);
            collect_keys_and_enums(v, keys, enums);
        }
    }
    if (node.contains("enum") && node["enum"].is_array()) {
        for (const auto& v : node["enum"]) {
            if (v.is_structured()) {
                throw UnsupportedKeywordError({"enum with structured members"});
            }
            enums.insert(canonical_scalar_text(v));
        }
    }
    for (const char* child : {"items", "not"}) {
        if (node.contains(child)) collect_keys_and_enums(node[child], keys, enums);
    }
    for (const char* list : {"allOf", "anyOf"}) {
        if (node.contains(list)) collect_keys_and_enums(node[list], keys, enums);
    }
    for (const char* defs : {"definitions", "$defs"}) {
        if (node.contains(defs) && node[defs].is_object()) {
            for (const auto& [k, v] : node[defs].items()) {
                (void)k;
                collect_keys_and_enums(v, keys, enums);
            }
        }
    }
}

void Loader::translate(const std::string& location, const json& node) {
    NonterminalId nt = by_pointer.at(location);
    if (!node.is_object()) {
        throw MalformedSchemaError("schema node is not an object at " + location);
    }
    std::vector<std::string> unsupported;
    collect_unsupported(node, unsupported);
    if (!unsupported.empty()) {
        throw UnsupportedKeywordError(unsupported);
    }

    if (node.contains("$ref")) {
        // A $ref chain: alias the target through a trivial disjunction.
        NonterminalId target = nonterminal_for(location, node);
        grammar->add_production(nt, Production::or_of({target}));
        return;
    }
    if (node.contains("enum")) {
        grammar->add_production(nt, Production::primitive(Prim::Enum));
        return;
    }
    if (node.contains("allOf")) {
        std::vector<NonterminalId> ops;
        int i = 0;
        for (const auto& sub : node["allOf"]) {
            ops.push_back(nonterminal_for(location + "/allOf/" + std::to_string(i++), sub));
        }
        grammar->add_production(nt, Production::and_of(std::move(ops)));
        return;
    }
    if (node.contains("anyOf")) {
        std::vector<NonterminalId> ops;
        int i = 0;
        for (const auto& sub : node["anyOf"]) {
            ops.push_back(nonterminal_for(location + "/anyOf/" + std::to_string(i++), sub));
        }
        grammar->add_production(nt, Production::or_of(std::move(ops)));
        return;
    }
    if (node.contains("not")) {
        NonterminalId op = nonterminal_for(location + "/not", node["not"]);
        grammar->add_production(nt, Production::not_of(op));
        return;
    }

    if (!node.contains("type")) {
        throw MalformedSchemaError("schema node without type/enum/combinator at " + location);
    }
    if (!node["type"].is_string()) {
        throw UnsupportedKeywordError({"type (non-string form)"});
    }
    std::string type = node["type"].get<std::string>();
    if (type == "string") {
        grammar->add_production(nt, Production::primitive(Prim::Str));
    } else if (type == "integer") {
        grammar->add_production(nt, Production::primitive(Prim::Int));
    } else if (type == "number") {
        // An integer literal is a number; the lexer keeps them apart.
        grammar->add_production(nt, Production::primitive(Prim::Num));
        grammar->add_production(nt, Production::primitive(Prim::Int));
    } else if (type == "boolean") {
        grammar->add_production(nt, Production::primitive(Prim::True));
        grammar->add_production(nt, Production::primitive(Prim::False));
    } else if (type == "null") {
        grammar->add_production(nt, Production::primitive(Prim::Null));
    } else if (type == "array") {
        NonterminalId element;
        if (node.contains("items")) {
            if (node["items"].is_array()) {
                throw UnsupportedKeywordError({"items (tuple form)"});
            }
            element = nonterminal_for(location + "/items", node["items"]);
        } else {
            throw UnsupportedKeywordError({"array without items"});
        }
        if (node.contains("minItems") || node.contains("maxItems")) {
            if (!node.contains("minItems") || !node.contains("maxItems") ||
                node["minItems"] != node["maxItems"]) {
                throw UnsupportedKeywordError({"minItems/maxItems (non-fixed counts)"});
            }
            grammar->add_production(
                nt, Production::array_fixed(element, node["minItems"].get<std::size_t>()));
        } else {
            grammar->add_production(nt, Production::array_star(element));
        }
    } else if (type == "object") {
        std::vector<std::pair<std::string, NonterminalId>> required_pairs;
        std::vector<std::pair<std::string, NonterminalId>> optional_pairs;
        std::set<std::string> required;
        if (node.contains("required")) {
            for (const auto& r : node["required"]) {
                required.insert(r.get<std::string>());
            }
        }
        auto add_property = [&](const std::string& key, const json& sub) {
            NonterminalId ref = nonterminal_for(location + "/properties/" + key, sub);
            if (required.count(key)) {
                required_pairs.emplace_back(key, ref);
            } else {
                optional_pairs.emplace_back(key, ref);
            }
        };
        if (node.contains("properties")) {
            for (const auto& [k, sub] : node["properties"].items()) {
                add_property(k, sub);
            }
        }
        if (node.contains("patternProperties")) {
            for (const auto& [k, sub] : node["patternProperties"].items()) {
                add_property(k, sub); // the pattern text itself is the key
            }
        }
        for (const auto& r : required) {
            bool seen = false;
            for (const auto& [key, ref] : required_pairs) {
                (void)ref;
                seen = seen || key == r;
            }
            if (!seen) {
                throw MalformedSchemaError("required key without a property schema: " + r);
            }
        }
        if (optional_pairs.size() > 12) {
            throw UnsupportedKeywordError({"more than 12 optional keys in one object"});
        }
        // One production per admissible key subset: required keys plus any
        // subset of the optional ones.
        const std::size_t m = optional_pairs.size();
        for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
            std::vector<std::pair<KeyId, NonterminalId>> pairs;
            for (const auto& [key, ref] : required_pairs) {
                pairs.emplace_back(*grammar->alphabet().key_id(key), ref);
            }
            for (std::size_t i = 0; i < m; ++i) {
                if (mask & (std::size_t{1} << i)) {
                    pairs.emplace_back(*grammar->alphabet().key_id(optional_pairs[i].first),
                                       optional_pairs[i].second);
                }
            }
            grammar->add_production(nt, Production::object(std::move(pairs)));
        }
    } else {
        throw UnsupportedKeywordError({"type:" + type});
    }
}

} // namespace

UnsupportedKeywordError::UnsupportedKeywordError(const std::vector<std::string>& keywords)
    : std::runtime_error([&] {
          std::string msg = "unsupported schema keywords:";
          for (const auto& k : keywords) msg += " " + k;
          return msg;
      }()),
      keywords_(keywords) {}

Grammar load_json_schema(const std::string& schema_text,
                         const std::optional<std::vector<std::string>>& key_order) {
    json root;
    try {
        root = json::parse(schema_text);
    } catch (const json::parse_error& e) {
        throw MalformedSchemaError(std::string("schema is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw MalformedSchemaError("schema root must be an object");
    }

    std::set<std::string> key_set;
    std::set<std::string> enum_set;
    collect_keys_and_enums(root, key_set, enum_set);

    std::vector<std::string> keys;
    if (key_order) {
        keys = *key_order;
        for (const auto& k : key_set) {
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
                throw MalformedSchemaError("key order misses schema key: " + k);
            }
        }
    } else {
        keys.assign(key_set.begin(), key_set.end()); // lexicographic
    }

    Grammar grammar(PushdownAlphabet(keys, {enum_set.begin(), enum_set.end()}));
    Loader loader;
    loader.root = root;
    loader.grammar = &grammar;

    NonterminalId axiom = loader.nonterminal_for("#", root);
    while (!loader.pending.empty()) {
        auto [location, node] = loader.pending.back();
        loader.pending.pop_back();
        loader.translate(location, node);
    }
    grammar.mark_axiom(axiom);

    auto wf = check_well_formed(grammar);
    if (!wf.ok) {
        throw IllFormedGrammarError(wf.diagnostic);
    }
    return grammar;
}

} // namespace jsonvpa
