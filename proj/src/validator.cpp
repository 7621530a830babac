#include "jsonvpa/validator.hpp"

#include <algorithm>
#include <map>

namespace jsonvpa {

std::string reject_reason_name(RejectReason r) {
    switch (r) {
    case RejectReason::None: return "none";
    case RejectReason::LexicalError: return "lexical-error";
    case RejectReason::UnknownKey: return "unknown-key";
    case RejectReason::StructuralError: return "structural-error";
    case RejectReason::DuplicateKey: return "duplicate-key";
    case RejectReason::SchemaViolation: return "schema-violation";
    }
    return "?";
}

namespace {

// Relation R as a sorted-unique pair list; all compositions walk it
// linearly and the q0 row is extracted on demand.
using Rel = std::vector<std::pair<StateId, StateId>>;

void sort_unique(Rel& r) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
}

struct Frame {
    enum class Kind { Array, EmptyObjCandidate, Object } kind;
    Rel saved;          // R' (the relation before the call)
    KeySet keys;        // K, object frames only
    KeyId current_key = 0;
    Marks marks;        // marked key-graph vertices
};

struct Engine {
    const OneSevpa& sevpa;
    const KeyGraph& graph;
    const PushdownAlphabet& alphabet;
    const ValidatorOptions& options;
    ValidationResult res;

    Rel rel;
    std::vector<Frame> stack;
    std::uint32_t comma_index;

    // valid_paths memo per (K, M) fingerprint, one document's lifetime
    std::map<std::pair<KeySet, Marks>, std::vector<StateId>> memo;

    Engine(const OneSevpa& m, const KeyGraph& g, const PushdownAlphabet& a,
           const ValidatorOptions& o)
        : sevpa(m), graph(g), alphabet(a), options(o),
          comma_index(static_cast<std::uint32_t>(a.internal_index(AbstractSymbol::comma()))) {}

    Rel identity_of(const std::vector<StateId>& states) {
        Rel r;
        for (StateId q : states) r.emplace_back(q, q);
        sort_unique(r);
        return r;
    }

    void step_internal(std::uint32_t sym) {
        Rel next;
        for (const auto& [p, q] : rel) {
            ++res.transitions_applied;
            if (auto q2 = sevpa.internal_step(q, sym)) {
                next.emplace_back(p, *q2);
            }
        }
        sort_unique(next);
        rel = std::move(next);
    }

    std::vector<StateId> q0_row(const Rel& r) {
        std::vector<StateId> out;
        for (const auto& [p, q] : r) {
            if (p == sevpa.initial()) out.push_back(q);
        }
        return out;
    }

    // R <- {(p,q) | (p,p') in saved, call p' on `call`, (q0,r) inner,
    //        return r on `call` with stack (p', call) to q}
    void step_close(const Rel& saved, std::uint32_t call, const std::vector<StateId>& inner_row) {
        Rel next;
        for (const auto& [p, p2] : saved) {
            for (StateId r : inner_row) {
                ++res.transitions_applied;
                if (auto q = sevpa.return_step(r, call, p2, call)) {
                    next.emplace_back(p, *q);
                }
            }
        }
        sort_unique(next);
        rel = std::move(next);
    }

    const std::vector<StateId>& valid_paths_memoized(const KeySet& keys, const Marks& marks) {
        ++res.valid_paths_calls;
        auto key = std::make_pair(keys, marks);
        auto it = memo.find(key);
        if (it != memo.end()) {
            ++res.valid_paths_memo_hits;
            return it->second;
        }
        return memo.emplace(std::move(key), valid_paths(graph, keys, marks)).first->second;
    }

    // Case (6)/(7) mark rule: vertices (p, k, p') with (p, p') not in R.
    void mark_current_key(Frame& frame) {
        for (std::uint32_t v : graph.vertices_of_key(frame.current_key)) {
            const auto& vx = graph.vertex(v);
            bool in_rel = std::binary_search(rel.begin(), rel.end(),
                                             std::make_pair(vx.from, vx.to));
            if (!in_rel) {
                if (frame.marks.size() <= v) frame.marks.resize(graph.num_vertices(), false);
                frame.marks[v] = true;
            }
        }
    }
};

} // namespace

ValidationResult validate_stream(const OneSevpa& sevpa, const KeyGraph& graph,
                                 const PushdownAlphabet& alphabet, SymbolStream& input,
                                 const ValidatorOptions& options) {
    Engine e(sevpa, graph, alphabet, options);
    e.rel = {{sevpa.initial(), sevpa.initial()}};

    auto reject = [&](RejectReason reason) {
        e.res.valid = false;
        e.res.reason = reason;
        e.res.reject_index = e.res.symbols_consumed;
        return e.res;
    };

    while (true) {
        std::optional<AbstractSymbol> a;
        std::optional<AbstractSymbol> b;
        try {
            a = input.next();
            if (!a) break;
            ++e.res.symbols_consumed;
            b = input.peek();
        } catch (const UnknownKeyError&) {
            ++e.res.symbols_consumed;
            return reject(RejectReason::UnknownKey);
        } catch (const LexError&) {
            ++e.res.symbols_consumed;
            return reject(RejectReason::LexicalError);
        }

        switch (a->tag()) {
        case AbstractSymbol::Tag::LBracket: { // case (1)
            e.stack.push_back({Frame::Kind::Array, std::move(e.rel), {}, 0, {}});
            e.rel = {{sevpa.initial(), sevpa.initial()}};
            break;
        }
        case AbstractSymbol::Tag::LBrace: { // case (4)
            if (b && b->tag() == AbstractSymbol::Tag::RBrace) {
                e.stack.push_back({Frame::Kind::EmptyObjCandidate, std::move(e.rel), {}, 0, {}});
                e.rel = {{sevpa.initial(), sevpa.initial()}};
            } else if (b && b->is_key()) {
                KeyId k = b->key_id();
                KeySet keys(alphabet.num_keys(), false);
                keys[k] = true;
                e.stack.push_back({Frame::Kind::Object, std::move(e.rel), std::move(keys), k,
                                   Marks(graph.num_vertices(), false)});
                e.rel = e.identity_of(graph.start_states(k));
            } else {
                return reject(RejectReason::StructuralError);
            }
            break;
        }
        case AbstractSymbol::Tag::RBracket: { // case (3)
            if (e.stack.empty() || e.stack.back().kind != Frame::Kind::Array) {
                return reject(RejectReason::StructuralError);
            }
            Frame frame = std::move(e.stack.back());
            e.stack.pop_back();
            e.step_close(frame.saved, 1, e.q0_row(e.rel));
            break;
        }
        case AbstractSymbol::Tag::RBrace: { // case (7)
            if (e.stack.empty() || e.stack.back().kind == Frame::Kind::Array) {
                return reject(RejectReason::StructuralError);
            }
            Frame frame = std::move(e.stack.back());
            e.stack.pop_back();
            if (frame.kind == Frame::Kind::EmptyObjCandidate) {
                e.step_close(frame.saved, 0, {sevpa.initial()});
            } else {
                e.mark_current_key(frame);
                const auto& ends = e.valid_paths_memoized(frame.keys, frame.marks);
                e.step_close(frame.saved, 0, ends);
            }
            break;
        }
        case AbstractSymbol::Tag::Comma: {
            if (e.stack.empty()) { // case (8)
                return reject(RejectReason::StructuralError);
            }
            if (e.stack.back().kind == Frame::Kind::Array) { // case (2)
                e.step_internal(e.comma_index);
            } else if (e.stack.back().kind == Frame::Kind::Object) { // case (6)
                Frame& frame = e.stack.back();
                if (!b || !b->is_key()) {
                    return reject(RejectReason::StructuralError);
                }
                KeyId k = b->key_id();
                if (frame.keys[k]) {
                    return reject(RejectReason::DuplicateKey);
                }
                e.mark_current_key(frame);
                frame.keys[k] = true;
                frame.current_key = k;
                e.rel = e.identity_of(graph.start_states(k));
            } else {
                // comma directly inside "{" with "}" lookahead never parses
                return reject(RejectReason::StructuralError);
            }
            break;
        }
        case AbstractSymbol::Tag::Key:
        case AbstractSymbol::Tag::Primitive: { // cases (2), (5), (8)
            if (e.stack.empty()) {
                return reject(RejectReason::StructuralError);
            }
            e.step_internal(
                static_cast<std::uint32_t>(alphabet.internal_index(*a)));
            break;
        }
        }

        e.res.max_stack_height = std::max(e.res.max_stack_height, e.stack.size());
        if (e.options.fast_fail && e.rel.empty()) {
            return reject(RejectReason::SchemaViolation);
        }
    }

    if (!e.stack.empty()) {
        e.res.valid = false;
        e.res.reason = RejectReason::StructuralError;
        e.res.reject_index = e.res.symbols_consumed;
        return e.res;
    }
    for (const auto& [p, q] : e.rel) {
        if (p == sevpa.initial() && sevpa.is_final(q)) {
            e.res.valid = true;
            e.res.reason = RejectReason::None;
            return e.res;
        }
    }
    e.res.valid = false;
    e.res.reason = RejectReason::SchemaViolation;
    e.res.reject_index = e.res.symbols_consumed;
    return e.res;
}

ValidationResult validate_word(const OneSevpa& sevpa, const KeyGraph& graph,
                               const PushdownAlphabet& alphabet, const Word& word,
                               const ValidatorOptions& options) {
    WordStream stream(word);
    return validate_stream(sevpa, graph, alphabet, stream, options);
}

} // namespace jsonvpa
