#include "jsonvpa/generator.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace jsonvpa {

namespace {

// Positive and negative nonterminal constraints on one value position.
struct Constraint {
    std::vector<NonterminalId> positives;
    std::vector<NonterminalId> negatives;

    void normalize() {
        std::sort(positives.begin(), positives.end());
        positives.erase(std::unique(positives.begin(), positives.end()), positives.end());
        std::sort(negatives.begin(), negatives.end());
        negatives.erase(std::unique(negatives.begin(), negatives.end()), negatives.end());
    }
};

// One structural option a value can take after Boolean propagation.
struct StructOption {
    enum class Kind { Prim, Object, AnyObject, ArrayStar, ArrayFixed } kind;
    Prim prim = Prim::Str;
    std::vector<std::pair<KeyId, Constraint>> pairs; // Object
    Constraint element;                              // arrays, AnyObject
    std::size_t count = 0;                           // ArrayFixed
};

struct ResolvedOption {
    std::optional<StructOption> structure; // nullopt = negation only
    std::vector<NonterminalId> negatives;
};

std::optional<StructOption> merge_struct(const StructOption& a, const StructOption& b) {
    using K = StructOption::Kind;
    if (a.kind == K::Prim || b.kind == K::Prim) {
        if (a.kind != K::Prim || b.kind != K::Prim || a.prim != b.prim) return std::nullopt;
        return a;
    }
    bool a_obj = a.kind == K::Object || a.kind == K::AnyObject;
    bool b_obj = b.kind == K::Object || b.kind == K::AnyObject;
    if (a_obj != b_obj) return std::nullopt;
    if (a_obj) {
        if (a.kind == K::AnyObject && b.kind == K::AnyObject) {
            StructOption out = a;
            out.element.positives.insert(out.element.positives.end(),
                                         b.element.positives.begin(), b.element.positives.end());
            out.element.negatives.insert(out.element.negatives.end(),
                                         b.element.negatives.begin(), b.element.negatives.end());
            out.element.normalize();
            return out;
        }
        const StructOption& obj = a.kind == K::Object ? a : b;
        const StructOption& other = a.kind == K::Object ? b : a;
        if (other.kind == K::AnyObject) {
            StructOption out = obj;
            for (auto& [k, c] : out.pairs) {
                (void)k;
                c.positives.insert(c.positives.end(), other.element.positives.begin(),
                                   other.element.positives.end());
                c.negatives.insert(c.negatives.end(), other.element.negatives.begin(),
                                   other.element.negatives.end());
                c.normalize();
            }
            return out;
        }
        // Object & Object: identical key sets, merged per-key constraints
        if (obj.pairs.size() != other.pairs.size()) return std::nullopt;
        StructOption out = obj;
        for (auto& [k, c] : out.pairs) {
            bool found = false;
            for (const auto& [k2, c2] : other.pairs) {
                if (k2 == k) {
                    c.positives.insert(c.positives.end(), c2.positives.begin(),
                                       c2.positives.end());
                    c.negatives.insert(c.negatives.end(), c2.negatives.begin(),
                                       c2.negatives.end());
                    c.normalize();
                    found = true;
                    break;
                }
            }
            if (!found) return std::nullopt;
        }
        return out;
    }
    // arrays
    auto merged_elem = [&] {
        Constraint c = a.element;
        c.positives.insert(c.positives.end(), b.element.positives.begin(),
                           b.element.positives.end());
        c.negatives.insert(c.negatives.end(), b.element.negatives.begin(),
                           b.element.negatives.end());
        c.normalize();
        return c;
    };
    if (a.kind == K::ArrayFixed && b.kind == K::ArrayFixed) {
        if (a.count != b.count) return std::nullopt;
        StructOption out = a;
        out.element = merged_elem();
        return out;
    }
    StructOption out = a.kind == K::ArrayFixed ? a : b;
    out.element = merged_elem();
    return out;
}

struct Resolver {
    const Grammar& grammar;

    std::vector<ResolvedOption> options_of(NonterminalId nt, std::set<NonterminalId>& guard) {
        if (!guard.insert(nt).second) {
            // Boolean cycle would have been rejected by well-formedness;
            // recursion through structure never reaches here.
            return {};
        }
        std::vector<ResolvedOption> out;
        for (const auto& p : grammar.productions(nt)) {
            switch (p.kind) {
            case Production::Kind::Primitive: {
                StructOption s;
                s.kind = StructOption::Kind::Prim;
                s.prim = p.prim;
                out.push_back({s, {}});
                break;
            }
            case Production::Kind::Object: {
                StructOption s;
                s.kind = StructOption::Kind::Object;
                for (const auto& [k, ref] : p.pairs) {
                    s.pairs.emplace_back(k, Constraint{{ref}, {}});
                }
                out.push_back({s, {}});
                break;
            }
            case Production::Kind::AnyObject: {
                StructOption s;
                s.kind = StructOption::Kind::AnyObject;
                s.element = Constraint{{p.element}, {}};
                out.push_back({s, {}});
                break;
            }
            case Production::Kind::ArrayStar: {
                StructOption s;
                s.kind = StructOption::Kind::ArrayStar;
                s.element = Constraint{{p.element}, {}};
                out.push_back({s, {}});
                break;
            }
            case Production::Kind::ArrayFixed: {
                StructOption s;
                s.kind = StructOption::Kind::ArrayFixed;
                s.element = Constraint{{p.element}, {}};
                s.count = p.count;
                out.push_back({s, {}});
                break;
            }
            case Production::Kind::Or:
                for (NonterminalId op : p.operands) {
                    auto sub = options_of(op, guard);
                    out.insert(out.end(), sub.begin(), sub.end());
                }
                break;
            case Production::Kind::And: {
                std::vector<ResolvedOption> acc = {{std::nullopt, {}}};
                for (NonterminalId op : p.operands) {
                    auto sub = options_of(op, guard);
                    std::vector<ResolvedOption> next;
                    for (const auto& left : acc) {
                        for (const auto& right : sub) {
                            ResolvedOption merged;
                            merged.negatives = left.negatives;
                            merged.negatives.insert(merged.negatives.end(),
                                                    right.negatives.begin(),
                                                    right.negatives.end());
                            if (left.structure && right.structure) {
                                auto s = merge_struct(*left.structure, *right.structure);
                                if (!s) continue; // contradiction pruned
                                merged.structure = std::move(s);
                            } else {
                                merged.structure =
                                    left.structure ? left.structure : right.structure;
                            }
                            next.push_back(std::move(merged));
                        }
                    }
                    acc = std::move(next);
                }
                out.insert(out.end(), acc.begin(), acc.end());
                break;
            }
            case Production::Kind::Not:
                out.push_back({std::nullopt, {p.operands.front()}});
                break;
            }
        }
        guard.erase(nt);
        return out;
    }

    std::vector<ResolvedOption> resolve(const Constraint& c) {
        std::vector<ResolvedOption> acc = {{std::nullopt, {}}};
        for (NonterminalId nt : c.positives) {
            std::set<NonterminalId> guard;
            auto sub = options_of(nt, guard);
            std::vector<ResolvedOption> next;
            for (const auto& left : acc) {
                for (const auto& right : sub) {
                    ResolvedOption merged;
                    merged.negatives = left.negatives;
                    merged.negatives.insert(merged.negatives.end(), right.negatives.begin(),
                                            right.negatives.end());
                    if (left.structure && right.structure) {
                        auto s = merge_struct(*left.structure, *right.structure);
                        if (!s) continue;
                        merged.structure = std::move(s);
                    } else {
                        merged.structure = left.structure ? left.structure : right.structure;
                    }
                    next.push_back(std::move(merged));
                }
            }
            acc = std::move(next);
        }
        for (auto& opt : acc) {
            opt.negatives.insert(opt.negatives.end(), c.negatives.begin(), c.negatives.end());
        }
        return acc;
    }

    bool check(const Constraint& c, const DocumentTree& doc) {
        for (NonterminalId nt : c.positives) {
            if (!satisfies(grammar, nt, doc)) return false;
        }
        for (NonterminalId nt : c.negatives) {
            if (satisfies(grammar, nt, doc)) return false;
        }
        return true;
    }
};

// ---------------------------------------------------------------------------
// Exhaustive enumeration
// ---------------------------------------------------------------------------

void dedupe_sort(std::vector<DocumentTree>& docs) {
    std::sort(docs.begin(), docs.end());
    docs.erase(std::unique(docs.begin(), docs.end()), docs.end());
}

std::vector<DocumentTree> enumerate_universe(const PushdownAlphabet& alphabet,
                                             std::size_t depth, std::size_t max_array_len) {
    std::vector<DocumentTree> out;
    for (std::size_t i = 0; i < kNumPrims; ++i) {
        out.push_back(DocumentTree::primitive(static_cast<Prim>(i)));
    }
    if (depth == 0) return out;
    std::vector<DocumentTree> inner = enumerate_universe(alphabet, depth - 1, max_array_len);
    // objects over every key subset in sorted order
    std::size_t num_keys = alphabet.num_keys();
    for (std::size_t mask = 0; mask < (std::size_t{1} << num_keys); ++mask) {
        std::vector<KeyId> keys;
        for (std::size_t k = 0; k < num_keys; ++k) {
            if (mask & (std::size_t{1} << k)) keys.push_back(static_cast<KeyId>(k));
        }
        std::vector<DocumentTree::Object> partial = {{}};
        for (KeyId k : keys) {
            std::vector<DocumentTree::Object> next;
            for (const auto& obj : partial) {
                for (const auto& v : inner) {
                    auto copy = obj;
                    copy.emplace_back(k, v);
                    next.push_back(std::move(copy));
                }
            }
            partial = std::move(next);
        }
        for (auto& obj : partial) {
            out.push_back(DocumentTree::object(std::move(obj)));
        }
    }
    for (std::size_t len = 0; len <= max_array_len; ++len) {
        std::vector<DocumentTree::Array> partial = {{}};
        for (std::size_t i = 0; i < len; ++i) {
            std::vector<DocumentTree::Array> next;
            for (const auto& arr : partial) {
                for (const auto& v : inner) {
                    auto copy = arr;
                    copy.push_back(v);
                    next.push_back(std::move(copy));
                }
            }
            partial = std::move(next);
        }
        for (auto& arr : partial) {
            out.push_back(DocumentTree::array(std::move(arr)));
        }
    }
    dedupe_sort(out);
    return out;
}

struct ExhaustiveValues {
    Resolver& resolver;
    const PushdownAlphabet& alphabet;

    std::vector<DocumentTree> values(const Constraint& c, std::size_t depth) {
        std::vector<DocumentTree> out;
        for (const auto& opt : resolver.resolve(c)) {
            std::vector<DocumentTree> candidates;
            if (!opt.structure) {
                candidates = enumerate_universe(alphabet, depth, 3);
            } else {
                candidates = from_struct(*opt.structure, depth);
            }
            for (auto& d : candidates) {
                if (resolver.check(c, d)) {
                    out.push_back(std::move(d));
                }
            }
        }
        dedupe_sort(out);
        return out;
    }

    std::vector<DocumentTree> from_struct(const StructOption& s, std::size_t depth) {
        std::vector<DocumentTree> out;
        switch (s.kind) {
        case StructOption::Kind::Prim:
            out.push_back(DocumentTree::primitive(s.prim));
            break;
        case StructOption::Kind::Object: {
            if (depth == 0) break;
            std::vector<DocumentTree::Object> partial = {{}};
            auto pairs = s.pairs;
            std::sort(pairs.begin(), pairs.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            for (const auto& [k, c] : pairs) {
                std::vector<DocumentTree> vs = values(c, depth - 1);
                std::vector<DocumentTree::Object> next;
                for (const auto& obj : partial) {
                    for (const auto& v : vs) {
                        auto copy = obj;
                        copy.emplace_back(k, v);
                        next.push_back(std::move(copy));
                    }
                }
                partial = std::move(next);
            }
            for (auto& obj : partial) {
                out.push_back(DocumentTree::object(std::move(obj)));
            }
            break;
        }
        case StructOption::Kind::AnyObject: {
            if (depth == 0) break;
            std::vector<DocumentTree> vs = values(s.element, depth - 1);
            std::size_t num_keys = alphabet.num_keys();
            for (std::size_t mask = 0; mask < (std::size_t{1} << num_keys); ++mask) {
                std::vector<DocumentTree::Object> partial = {{}};
                for (std::size_t k = 0; k < num_keys; ++k) {
                    if (!(mask & (std::size_t{1} << k))) continue;
                    std::vector<DocumentTree::Object> next;
                    for (const auto& obj : partial) {
                        for (const auto& v : vs) {
                            auto copy = obj;
                            copy.emplace_back(static_cast<KeyId>(k), v);
                            next.push_back(std::move(copy));
                        }
                    }
                    partial = std::move(next);
                }
                for (auto& obj : partial) {
                    out.push_back(DocumentTree::object(std::move(obj)));
                }
            }
            break;
        }
        case StructOption::Kind::ArrayStar:
        case StructOption::Kind::ArrayFixed: {
            if (depth == 0) break;
            std::vector<std::size_t> lengths;
            if (s.kind == StructOption::Kind::ArrayFixed) {
                lengths = {s.count};
            } else {
                lengths = {0, 1, 2, 3};
            }
            std::vector<DocumentTree> vs = values(s.element, depth - 1);
            for (std::size_t len : lengths) {
                if (len > 0 && vs.empty()) continue;
                std::vector<DocumentTree::Array> partial = {{}};
                for (std::size_t i = 0; i < len; ++i) {
                    std::vector<DocumentTree::Array> next;
                    for (const auto& arr : partial) {
                        for (const auto& v : vs) {
                            auto copy = arr;
                            copy.push_back(v);
                            next.push_back(std::move(copy));
                        }
                    }
                    partial = std::move(next);
                }
                for (auto& arr : partial) {
                    out.push_back(DocumentTree::array(std::move(arr)));
                }
            }
            break;
        }
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Random generation
// ---------------------------------------------------------------------------

struct RandomValues {
    Resolver& resolver;
    const PushdownAlphabet& alphabet;
    std::mt19937_64& rng;
    static constexpr int kRetriesPerOption = 100;

    std::optional<DocumentTree> value(const Constraint& c, std::size_t depth) {
        auto opts = resolver.resolve(c);
        std::shuffle(opts.begin(), opts.end(), rng);
        for (const auto& opt : opts) {
            for (int attempt = 0; attempt < kRetriesPerOption; ++attempt) {
                auto candidate = opt.structure ? from_struct(*opt.structure, depth)
                                               : random_universe(depth);
                if (!candidate) break; // structurally impossible at this depth
                if (resolver.check(c, *candidate)) {
                    return candidate;
                }
            }
        }
        return std::nullopt;
    }

    std::optional<DocumentTree> random_universe(std::size_t depth) {
        std::uniform_int_distribution<int> kind(0, depth == 0 ? 0 : 2);
        switch (kind(rng)) {
        case 1: {
            DocumentTree::Object obj;
            for (std::size_t k = 0; k < alphabet.num_keys(); ++k) {
                if (std::bernoulli_distribution(0.4)(rng)) {
                    auto v = random_universe(depth - 1);
                    if (!v) return std::nullopt;
                    obj.emplace_back(static_cast<KeyId>(k), std::move(*v));
                }
            }
            return DocumentTree::object(std::move(obj));
        }
        case 2: {
            DocumentTree::Array arr;
            std::size_t len = geometric_length();
            for (std::size_t i = 0; i < len; ++i) {
                auto v = random_universe(depth - 1);
                if (!v) return std::nullopt;
                arr.push_back(std::move(*v));
            }
            return DocumentTree::array(std::move(arr));
        }
        default:
            return DocumentTree::primitive(
                static_cast<Prim>(std::uniform_int_distribution<int>(0, kNumPrims - 1)(rng)));
        }
    }

    std::size_t geometric_length() {
        std::geometric_distribution<std::size_t> g(0.5); // mean 1/(0.5) - 1 steps
        return std::min<std::size_t>(g(rng) + g(rng), 5);
    }

    std::optional<DocumentTree> from_struct(const StructOption& s, std::size_t depth) {
        switch (s.kind) {
        case StructOption::Kind::Prim: return DocumentTree::primitive(s.prim);
        case StructOption::Kind::Object: {
            if (depth == 0) return std::nullopt;
            DocumentTree::Object obj;
            for (const auto& [k, c] : s.pairs) {
                auto v = value(c, depth - 1);
                if (!v) return std::nullopt;
                obj.emplace_back(k, std::move(*v));
            }
            return DocumentTree::object(std::move(obj));
        }
        case StructOption::Kind::AnyObject: {
            if (depth == 0) return std::nullopt;
            DocumentTree::Object obj;
            for (std::size_t k = 0; k < alphabet.num_keys(); ++k) {
                if (std::bernoulli_distribution(0.4)(rng)) {
                    auto v = value(s.element, depth - 1);
                    if (!v) return std::nullopt;
                    obj.emplace_back(static_cast<KeyId>(k), std::move(*v));
                }
            }
            return DocumentTree::object(std::move(obj));
        }
        case StructOption::Kind::ArrayStar:
        case StructOption::Kind::ArrayFixed: {
            if (depth == 0) return std::nullopt;
            std::size_t len =
                s.kind == StructOption::Kind::ArrayFixed ? s.count : geometric_length();
            DocumentTree::Array arr;
            for (std::size_t i = 0; i < len; ++i) {
                auto v = value(s.element, depth - 1);
                if (!v) return std::nullopt;
                arr.push_back(std::move(*v));
            }
            return DocumentTree::array(std::move(arr));
        }
        }
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// Deviations
// ---------------------------------------------------------------------------

std::size_t count_nodes(const DocumentTree& doc) {
    if (doc.is_primitive()) return 1;
    std::size_t n = 1;
    if (doc.is_object()) {
        for (const auto& [k, v] : doc.pairs()) {
            (void)k;
            n += count_nodes(v);
        }
    } else {
        for (const auto& v : doc.elements()) {
            n += count_nodes(v);
        }
    }
    return n;
}

// Applies `fn` to the node with preorder index `site`; returns the rewritten
// tree, or nullopt if the site is out of range or fn declined.
std::optional<DocumentTree> rewrite_at_impl(const DocumentTree& doc, std::size_t& site,
                                            bool& hit,
                                            const std::function<std::optional<DocumentTree>(
                                                const DocumentTree&)>& fn) {
    if (site == 0) {
        hit = true;
        return fn(doc);
    }
    --site;
    if (doc.is_primitive()) return std::nullopt;
    if (doc.is_object()) {
        auto pairs = doc.pairs();
        for (auto& [k, v] : pairs) {
            (void)k;
            auto replaced = rewrite_at_impl(v, site, hit, fn);
            if (hit) {
                if (!replaced) return std::nullopt;
                v = std::move(*replaced);
                return DocumentTree::object(std::move(pairs));
            }
        }
        return std::nullopt;
    }
    auto elems = doc.elements();
    for (auto& v : elems) {
        auto replaced = rewrite_at_impl(v, site, hit, fn);
        if (hit) {
            if (!replaced) return std::nullopt;
            v = std::move(*replaced);
            return DocumentTree::array(std::move(elems));
        }
    }
    return std::nullopt;
}

std::optional<DocumentTree> rewrite_at(const DocumentTree& doc, std::size_t site,
                                       const std::function<std::optional<DocumentTree>(
                                           const DocumentTree&)>& fn) {
    bool hit = false;
    std::size_t cursor = site;
    return rewrite_at_impl(doc, cursor, hit, fn);
}

std::optional<DocumentTree> apply_deviation(const DocumentTree& doc, Deviation kind,
                                            std::size_t site, std::size_t variant,
                                            const PushdownAlphabet& alphabet) {
    switch (kind) {
    case Deviation::WrongPrimitive:
        return rewrite_at(doc, site, [&](const DocumentTree& node) -> std::optional<DocumentTree> {
            if (!node.is_primitive()) return std::nullopt;
            Prim next = static_cast<Prim>((static_cast<std::size_t>(node.prim()) + 1 + variant) %
                                          kNumPrims);
            if (next == node.prim()) return std::nullopt;
            return DocumentTree::primitive(next);
        });
    case Deviation::DropRequiredKey:
        return rewrite_at(doc, site, [&](const DocumentTree& node) -> std::optional<DocumentTree> {
            if (!node.is_object() || node.pairs().empty()) return std::nullopt;
            auto pairs = node.pairs();
            pairs.erase(pairs.begin() + static_cast<long>(variant % pairs.size()));
            return DocumentTree::object(std::move(pairs));
        });
    case Deviation::AddForeignKey:
        return rewrite_at(doc, site, [&](const DocumentTree& node) -> std::optional<DocumentTree> {
            if (!node.is_object()) return std::nullopt;
            std::vector<KeyId> absent;
            for (std::size_t k = 0; k < alphabet.num_keys(); ++k) {
                bool present = false;
                for (const auto& [dk, dv] : node.pairs()) {
                    (void)dv;
                    present = present || dk == k;
                }
                if (!present) absent.push_back(static_cast<KeyId>(k));
            }
            if (absent.empty()) return std::nullopt;
            auto pairs = node.pairs();
            pairs.emplace_back(absent[variant % absent.size()],
                               DocumentTree::primitive(Prim::Null));
            return DocumentTree::object(std::move(pairs));
        });
    case Deviation::WrongElementCount:
        return rewrite_at(doc, site, [&](const DocumentTree& node) -> std::optional<DocumentTree> {
            if (!node.is_array()) return std::nullopt;
            auto elems = node.elements();
            if (variant % 2 == 0 && !elems.empty()) {
                elems.pop_back();
            } else if (!elems.empty()) {
                elems.push_back(elems.back());
            } else {
                elems.push_back(DocumentTree::primitive(Prim::Null));
            }
            return DocumentTree::array(std::move(elems));
        });
    case Deviation::SwapObjectArray:
        return rewrite_at(doc, site, [&](const DocumentTree& node) -> std::optional<DocumentTree> {
            if (node.is_object()) {
                DocumentTree::Array arr;
                for (const auto& [k, v] : node.pairs()) {
                    (void)k;
                    arr.push_back(v);
                }
                return DocumentTree::array(std::move(arr));
            }
            if (node.is_array()) {
                DocumentTree::Object obj;
                for (std::size_t i = 0; i < node.elements().size() && i < alphabet.num_keys();
                     ++i) {
                    obj.emplace_back(static_cast<KeyId>(i), node.elements()[i]);
                }
                return DocumentTree::object(std::move(obj));
            }
            return std::nullopt;
        });
    case Deviation::DuplicateKey: return std::nullopt; // handled at the word level
    }
    return std::nullopt;
}

// Duplicates one pair inside one object, at the word level; `site` is the
// preorder index of the object in question.
bool serialize_with_duplicate(const DocumentTree& node, std::size_t& site, std::size_t variant,
                              Word& out) {
    bool target = site == 0;
    if (site > 0) --site;
    if (node.is_primitive()) {
        if (target) return false; // primitives cannot hold a duplicate pair
        out.push_back(AbstractSymbol::prim(node.prim()));
        return true;
    }
    if (node.is_object()) {
        if (target && node.pairs().empty()) return false;
        out.push_back(AbstractSymbol::lbrace());
        bool first = true;
        for (const auto& [k, v] : node.pairs()) {
            if (!first) out.push_back(AbstractSymbol::comma());
            first = false;
            out.push_back(AbstractSymbol::key(k));
            if (target) {
                // below the chosen object everything serializes plainly
                Word inner = v.to_word();
                out.insert(out.end(), inner.begin(), inner.end());
            } else {
                if (!serialize_with_duplicate(v, site, variant, out)) return false;
            }
        }
        if (target) {
            const auto& pairs = node.pairs();
            std::size_t which = variant % pairs.size();
            out.push_back(AbstractSymbol::comma());
            out.push_back(AbstractSymbol::key(pairs[which].first));
            Word inner = pairs[which].second.to_word();
            out.insert(out.end(), inner.begin(), inner.end());
        }
        out.push_back(AbstractSymbol::rbrace());
        return true;
    }
    if (target) return false; // arrays have no keys
    out.push_back(AbstractSymbol::lbracket());
    bool first = true;
    for (const auto& v : node.elements()) {
        if (!first) out.push_back(AbstractSymbol::comma());
        first = false;
        if (!serialize_with_duplicate(v, site, variant, out)) return false;
    }
    out.push_back(AbstractSymbol::rbracket());
    return true;
}

std::optional<Word> duplicate_key_word(const DocumentTree& doc, std::size_t site,
                                       std::size_t variant) {
    Word out;
    std::size_t cursor = site;
    // ensure the site actually lands inside the tree and on an object
    if (site >= count_nodes(doc)) return std::nullopt;
    if (!serialize_with_duplicate(doc, cursor, variant, out)) return std::nullopt;
    return out;
}

// ---------------------------------------------------------------------------
// Generator fronts
// ---------------------------------------------------------------------------

class ExhaustiveValidGenerator final : public DocumentGenerator {
  public:
    ExhaustiveValidGenerator(const Grammar& grammar, const GeneratorConfig& config) {
        Resolver resolver{grammar};
        ExhaustiveValues ev{resolver, grammar.alphabet()};
        std::vector<DocumentTree> docs;
        for (NonterminalId axiom : grammar.axioms()) {
            auto vs = ev.values(Constraint{{axiom}, {}}, config.max_depth);
            for (auto& d : vs) {
                if (d.is_object()) docs.push_back(std::move(d));
            }
        }
        for (auto& d : docs) {
            d = sort_pairs(d);
        }
        dedupe_sort(docs);
        for (const auto& d : docs) {
            words_.push_back(d.to_word());
        }
        if (words_.empty()) {
            throw NoValidDocumentError{};
        }
    }

    std::optional<Word> next() override {
        if (pos_ >= words_.size()) return std::nullopt;
        return words_[pos_++];
    }

  private:
    std::vector<Word> words_;
    std::size_t pos_ = 0;
};

class RandomValidGenerator final : public DocumentGenerator {
  public:
    RandomValidGenerator(const Grammar& grammar, const GeneratorConfig& config)
        : grammar_(grammar), depth_(config.max_depth), rng_(config.seed) {}

    std::optional<Word> next() override {
        Resolver resolver{grammar_};
        RandomValues rv{resolver, grammar_.alphabet(), rng_};
        for (int attempt = 0; attempt < 200; ++attempt) {
            std::vector<NonterminalId> axioms = grammar_.axioms();
            std::shuffle(axioms.begin(), axioms.end(), rng_);
            for (NonterminalId axiom : axioms) {
                auto d = rv.value(Constraint{{axiom}, {}}, depth_);
                if (d && d->is_object()) {
                    return d->to_word();
                }
            }
        }
        throw NoValidDocumentError{};
    }

  private:
    const Grammar& grammar_;
    std::size_t depth_;
    std::mt19937_64 rng_;
};

class ExhaustiveInvalidGenerator final : public DocumentGenerator {
  public:
    ExhaustiveInvalidGenerator(const Grammar& grammar, const GeneratorConfig& config)
        : grammar_(grammar) {
        GeneratorConfig base = config;
        ExhaustiveValidGenerator valids(grammar, base);
        while (auto w = valids.next()) {
            auto doc = DocumentTree::parse_document(*w);
            if (doc) bases_.push_back(std::move(*doc));
        }
        advance();
    }

    std::optional<Word> next() override {
        if (!current_) return std::nullopt;
        Word out = std::move(*current_);
        advance();
        return out;
    }

  private:
    void advance() {
        current_.reset();
        while (base_ < bases_.size()) {
            const DocumentTree& doc = bases_[base_];
            std::size_t sites = count_nodes(doc);
            while (site_ < sites) {
                while (kind_ < kNumDeviations) {
                    while (variant_ < kMaxVariants) {
                        auto candidate = make_candidate(doc);
                        ++variant_;
                        if (candidate &&
                            !classical_validate_word(grammar_, *candidate).valid &&
                            seen_.insert(*candidate).second) {
                            current_ = std::move(candidate);
                            return;
                        }
                    }
                    variant_ = 0;
                    ++kind_;
                }
                kind_ = 0;
                ++site_;
            }
            site_ = 0;
            ++base_;
        }
    }

    std::optional<Word> make_candidate(const DocumentTree& doc) {
        Deviation kind = static_cast<Deviation>(kind_);
        if (kind == Deviation::DuplicateKey) {
            return duplicate_key_word(doc, site_, variant_);
        }
        auto mutated = apply_deviation(doc, kind, site_, variant_, grammar_.alphabet());
        if (!mutated) return std::nullopt;
        return mutated->to_word();
    }

    static constexpr std::size_t kMaxVariants = 4;
    const Grammar& grammar_;
    std::vector<DocumentTree> bases_;
    std::size_t base_ = 0, site_ = 0, kind_ = 0, variant_ = 0;
    std::optional<Word> current_;
    std::set<Word> seen_;
};

class RandomInvalidGenerator final : public DocumentGenerator {
  public:
    RandomInvalidGenerator(const Grammar& grammar, const GeneratorConfig& config)
        : grammar_(grammar), valid_(grammar, config), rng_(config.seed ^ 0x9e3779b97f4a7c15ull) {}

    std::optional<Word> next() override {
        for (int attempt = 0; attempt < 2000; ++attempt) {
            auto base_word = valid_.next();
            if (!base_word) break;
            auto doc = DocumentTree::parse_document(*base_word);
            if (!doc) continue;
            std::size_t sites = count_nodes(*doc);
            std::size_t site = std::uniform_int_distribution<std::size_t>(0, sites - 1)(rng_);
            Deviation kind = static_cast<Deviation>(
                std::uniform_int_distribution<std::size_t>(0, kNumDeviations - 1)(rng_));
            std::size_t variant = std::uniform_int_distribution<std::size_t>(0, 3)(rng_);
            std::optional<Word> candidate;
            if (kind == Deviation::DuplicateKey) {
                candidate = duplicate_key_word(*doc, site, variant);
            } else if (auto mutated =
                           apply_deviation(*doc, kind, site, variant, grammar_.alphabet())) {
                candidate = mutated->to_word();
            }
            if (candidate && !classical_validate_word(grammar_, *candidate).valid) {
                return candidate;
            }
        }
        throw NoInvalidDocumentError{};
    }

  private:
    const Grammar& grammar_;
    RandomValidGenerator valid_;
    std::mt19937_64 rng_;
};

} // namespace

std::unique_ptr<DocumentGenerator> gen_valid(const Grammar& grammar,
                                             const GeneratorConfig& config) {
    if (config.mode == GeneratorConfig::Mode::Exhaustive) {
        return std::make_unique<ExhaustiveValidGenerator>(grammar, config);
    }
    return std::make_unique<RandomValidGenerator>(grammar, config);
}

std::unique_ptr<DocumentGenerator> gen_invalid(const Grammar& grammar,
                                               const GeneratorConfig& config) {
    if (config.mode == GeneratorConfig::Mode::Exhaustive) {
        return std::make_unique<ExhaustiveInvalidGenerator>(grammar, config);
    }
    return std::make_unique<RandomInvalidGenerator>(grammar, config);
}

DocumentTree sort_pairs(const DocumentTree& doc) {
    if (doc.is_primitive()) return doc;
    if (doc.is_array()) {
        DocumentTree::Array out;
        for (const auto& v : doc.elements()) {
            out.push_back(sort_pairs(v));
        }
        return DocumentTree::array(std::move(out));
    }
    DocumentTree::Object out;
    for (const auto& [k, v] : doc.pairs()) {
        out.emplace_back(k, sort_pairs(v));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return DocumentTree::object(std::move(out));
}

Word gen_ordered(const Word& word) {
    auto doc = DocumentTree::parse_document(word);
    if (!doc) return word;
    return sort_pairs(*doc).to_word();
}

namespace {
DocumentTree shuffle_pairs(const DocumentTree& doc, std::mt19937_64& rng) {
    if (doc.is_primitive()) return doc;
    if (doc.is_array()) {
        DocumentTree::Array out;
        for (const auto& v : doc.elements()) {
            out.push_back(shuffle_pairs(v, rng));
        }
        return DocumentTree::array(std::move(out));
    }
    DocumentTree::Object out;
    for (const auto& [k, v] : doc.pairs()) {
        out.emplace_back(k, shuffle_pairs(v, rng));
    }
    std::shuffle(out.begin(), out.end(), rng);
    return DocumentTree::object(std::move(out));
}
} // namespace

Word permute_objects(const Word& word, std::uint64_t seed) {
    auto doc = DocumentTree::parse_document(word);
    if (!doc) return word;
    std::mt19937_64 rng(seed);
    return shuffle_pairs(*doc, rng).to_word();
}

std::vector<Word> all_valid_documents(const Grammar& grammar, std::size_t max_depth) {
    GeneratorConfig config;
    config.mode = GeneratorConfig::Mode::Exhaustive;
    config.max_depth = max_depth;
    std::vector<Word> out;
    try {
        auto gen = gen_valid(grammar, config);
        while (auto w = gen->next()) {
            out.push_back(std::move(*w));
        }
    } catch (const NoValidDocumentError&) {
    }
    return out;
}

std::vector<DocumentTree> enumerate_all_documents(const PushdownAlphabet& alphabet,
                                                  std::size_t max_depth,
                                                  std::size_t max_array_len) {
    std::vector<DocumentTree> out;
    for (auto& v : enumerate_universe(alphabet, max_depth, max_array_len)) {
        if (v.is_object()) {
            out.push_back(std::move(v));
        }
    }
    return out;
}

} // namespace jsonvpa
