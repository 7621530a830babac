#include "jsonvpa/construct.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include <json.hpp>

namespace jsonvpa {

// --------------------------------------------------------------------------
// Regex arena
// --------------------------------------------------------------------------

RegexArena::Id RegexArena::intern(Node node) {
    std::uint64_t tok_code = (static_cast<std::uint64_t>(node.tok.is_nonterminal) << 32) |
                             node.tok.index;
    auto key = std::make_tuple(static_cast<std::uint8_t>(node.kind), tok_code, node.children);
    auto it = index_.find(key);
    if (it != index_.end()) {
        return it->second;
    }
    Id id = static_cast<Id>(nodes_.size());
    nodes_.push_back(std::move(node));
    index_.emplace(std::move(key), id);
    return id;
}

RegexArena::Id RegexArena::empty() {
    Node n;
    n.kind = Kind::Empty;
    n.nullable = false;
    return intern(std::move(n));
}

RegexArena::Id RegexArena::epsilon() {
    Node n;
    n.kind = Kind::Epsilon;
    n.nullable = true;
    return intern(std::move(n));
}

RegexArena::Id RegexArena::token(BodyToken t) {
    Node n;
    n.kind = Kind::Token;
    n.tok = t;
    n.nullable = false;
    return intern(std::move(n));
}

RegexArena::Id RegexArena::concat(Id a, Id b) {
    if (nodes_[a].kind == Kind::Empty || nodes_[b].kind == Kind::Empty) return empty();
    if (nodes_[a].kind == Kind::Epsilon) return b;
    if (nodes_[b].kind == Kind::Epsilon) return a;
    if (nodes_[a].kind == Kind::Concat) {
        // right-nest for canonical shape
        return concat(nodes_[a].children[0], concat(nodes_[a].children[1], b));
    }
    Node n;
    n.kind = Kind::Concat;
    n.children = {a, b};
    n.nullable = nodes_[a].nullable && nodes_[b].nullable;
    return intern(std::move(n));
}

RegexArena::Id RegexArena::concat_all(const std::vector<Id>& parts) {
    Id out = epsilon();
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        out = concat(*it, out);
    }
    return out;
}

RegexArena::Id RegexArena::union_of(std::vector<Id> operands) {
    std::vector<Id> flat;
    for (Id id : operands) {
        if (nodes_[id].kind == Kind::Empty) continue;
        if (nodes_[id].kind == Kind::Union) {
            for (Id c : nodes_[id].children) flat.push_back(c);
        } else {
            flat.push_back(id);
        }
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    if (flat.empty()) return empty();
    if (flat.size() == 1) return flat.front();
    Node n;
    n.kind = Kind::Union;
    n.nullable = false;
    for (Id c : flat) n.nullable = n.nullable || nodes_[c].nullable;
    n.children = std::move(flat);
    return intern(std::move(n));
}

RegexArena::Id RegexArena::inter_of(std::vector<Id> operands) {
    std::vector<Id> flat;
    for (Id id : operands) {
        if (nodes_[id].kind == Kind::Empty) return empty();
        if (nodes_[id].kind == Kind::Inter) {
            for (Id c : nodes_[id].children) flat.push_back(c);
        } else {
            flat.push_back(id);
        }
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    if (flat.empty()) return empty();
    if (flat.size() == 1) return flat.front();
    Node n;
    n.kind = Kind::Inter;
    n.nullable = true;
    for (Id c : flat) n.nullable = n.nullable && nodes_[c].nullable;
    n.children = std::move(flat);
    return intern(std::move(n));
}

RegexArena::Id RegexArena::star(Id a) {
    if (nodes_[a].kind == Kind::Empty || nodes_[a].kind == Kind::Epsilon) return epsilon();
    if (nodes_[a].kind == Kind::Star) return a;
    Node n;
    n.kind = Kind::Star;
    n.children = {a};
    n.nullable = true;
    return intern(std::move(n));
}

RegexArena::Id RegexArena::neg(Id a) {
    if (nodes_[a].kind == Kind::Neg) return nodes_[a].children[0];
    Node n;
    n.kind = Kind::Neg;
    n.children = {a};
    n.nullable = !nodes_[a].nullable;
    return intern(std::move(n));
}

bool RegexArena::nullable(Id id) const { return nodes_[id].nullable; }

RegexArena::Id RegexArena::derivative(Id id, BodyToken t) {
    std::uint64_t tok_code = (static_cast<std::uint64_t>(t.is_nonterminal) << 32) | t.index;
    auto key = std::make_pair(id, tok_code);
    auto memo = derivative_memo_.find(key);
    if (memo != derivative_memo_.end()) {
        return memo->second;
    }
    // Note: nodes_ may reallocate during recursion; index by value.
    Id out;
    Node node = nodes_[id];
    switch (node.kind) {
    case Kind::Empty:
    case Kind::Epsilon: out = empty(); break;
    case Kind::Token: out = (node.tok == t) ? epsilon() : empty(); break;
    case Kind::Concat: {
        Id left = derivative(node.children[0], t);
        Id first = concat(left, node.children[1]);
        if (nodes_[node.children[0]].nullable) {
            out = union_of({first, derivative(node.children[1], t)});
        } else {
            out = first;
        }
        break;
    }
    case Kind::Union: {
        std::vector<Id> ds;
        for (Id c : node.children) ds.push_back(derivative(c, t));
        out = union_of(std::move(ds));
        break;
    }
    case Kind::Inter: {
        std::vector<Id> ds;
        for (Id c : node.children) ds.push_back(derivative(c, t));
        out = inter_of(std::move(ds));
        break;
    }
    case Kind::Star: out = concat(derivative(node.children[0], t), id); break;
    case Kind::Neg: out = neg(derivative(node.children[0], t)); break;
    default: out = empty(); break;
    }
    derivative_memo_.emplace(key, out);
    return out;
}

std::vector<BodyToken> RegexArena::tokens_of(Id id) const {
    std::set<BodyToken> seen;
    std::vector<Id> work = {id};
    std::set<Id> visited;
    while (!work.empty()) {
        Id cur = work.back();
        work.pop_back();
        if (!visited.insert(cur).second) continue;
        const Node& n = nodes_[cur];
        if (n.kind == Kind::Token) seen.insert(n.tok);
        for (Id c : n.children) work.push_back(c);
    }
    return {seen.begin(), seen.end()};
}

std::vector<std::uint32_t> RegexArena::nonterminals_under_boolean(Id id) const {
    std::set<std::uint32_t> bad;
    std::function<void(Id, bool)> walk = [&](Id cur, bool under) {
        const Node& n = nodes_[cur];
        bool now = under || n.kind == Kind::Inter || n.kind == Kind::Neg;
        if (n.kind == Kind::Token && now && n.tok.is_nonterminal) {
            bad.insert(n.tok.index);
        }
        for (Id c : n.children) walk(c, now);
    };
    walk(id, false);
    return {bad.begin(), bad.end()};
}

// --------------------------------------------------------------------------
// Body DFA via derivatives
// --------------------------------------------------------------------------

BodyDfa body_to_dfa(RegexArena& arena, RegexArena::Id body,
                    const std::vector<BodyToken>& alphabet) {
    std::map<RegexArena::Id, std::uint32_t> ids;
    std::vector<RegexArena::Id> states;
    std::vector<std::tuple<std::uint32_t, BodyToken, std::uint32_t>> transitions;

    auto intern = [&](RegexArena::Id r) {
        auto [it, inserted] = ids.emplace(r, static_cast<std::uint32_t>(states.size()));
        if (inserted) states.push_back(r);
        return it->second;
    };
    intern(body);
    for (std::uint32_t s = 0; s < states.size(); ++s) {
        for (const BodyToken& t : alphabet) {
            RegexArena::Id d = arena.derivative(states[s], t);
            transitions.emplace_back(s, t, intern(d));
        }
    }

    // Prune: keep states that reach a nullable state (co-accessible); all
    // are accessible by construction.
    std::size_t n = states.size();
    std::vector<bool> keep(n, false);
    bool changed = true;
    for (std::uint32_t s = 0; s < n; ++s) keep[s] = arena.nullable(states[s]);
    while (changed) {
        changed = false;
        for (const auto& [from, tok, to] : transitions) {
            (void)tok;
            if (keep[to] && !keep[from]) {
                keep[from] = true;
                changed = true;
            }
        }
    }

    BodyDfa dfa;
    std::vector<std::uint32_t> remap(n, UINT32_MAX);
    for (std::uint32_t s = 0; s < n; ++s) {
        if (keep[s]) {
            remap[s] = dfa.num_states++;
            dfa.final.push_back(arena.nullable(states[s]));
        }
    }
    if (keep[0]) dfa.initial = remap[0];
    for (const auto& [from, tok, to] : transitions) {
        if (keep[from] && keep[to]) {
            dfa.transitions.emplace_back(remap[from], tok, remap[to]);
        }
    }
    return dfa;
}

// --------------------------------------------------------------------------
// Normalization
// --------------------------------------------------------------------------

namespace {

struct Normalizer {
    const Grammar& grammar;
    bool ordered;
    std::shared_ptr<RegexArena> arena = std::make_shared<RegexArena>();
    std::vector<NormalizedProduction> productions;
    // one normalized production per structural grammar production
    std::map<std::pair<NonterminalId, std::size_t>, std::uint32_t> struct_ids;
    std::vector<std::pair<NonterminalId, std::size_t>> pending;
    std::map<NonterminalId, RegexArena::Id> value_memo;
    bool uses_universal = false;
    std::optional<std::uint32_t> u_obj, u_arr;

    explicit Normalizer(const Grammar& g, bool ord) : grammar(g), ordered(ord) {}

    std::uint32_t internal_of(const AbstractSymbol& s) {
        return static_cast<std::uint32_t>(grammar.alphabet().internal_index(s));
    }
    RegexArena::Id tok_internal(const AbstractSymbol& s) {
        return arena->token(BodyToken{false, internal_of(s)});
    }
    RegexArena::Id tok_nt(std::uint32_t production_index) {
        return arena->token(BodyToken{true, production_index});
    }

    std::uint32_t struct_production(NonterminalId nt, std::size_t alt) {
        auto key = std::make_pair(nt, alt);
        auto it = struct_ids.find(key);
        if (it != struct_ids.end()) return it->second;
        const Production& p = grammar.productions(nt)[alt];
        std::uint32_t bracket = (p.kind == Production::Kind::Object ||
                                 p.kind == Production::Kind::AnyObject)
                                    ? 0
                                    : 1;
        std::uint32_t id = static_cast<std::uint32_t>(productions.size());
        productions.push_back({grammar.name(nt) + "." + std::to_string(alt), bracket,
                               arena->empty()});
        struct_ids.emplace(key, id);
        pending.emplace_back(nt, alt);
        return id;
    }

    std::uint32_t universal_obj();
    std::uint32_t universal_arr();
    RegexArena::Id universal_value();

    // Collected alternatives of a nonterminal seen through Boolean
    // productions: which primitives, and whether any structural production
    // occurs.
    void collect_alternatives(NonterminalId nt, std::set<Prim>& prims, bool& structural,
                              std::set<NonterminalId>& visited) {
        if (!visited.insert(nt).second) return;
        for (const auto& p : grammar.productions(nt)) {
            switch (p.kind) {
            case Production::Kind::Primitive: prims.insert(p.prim); break;
            case Production::Kind::Or:
            case Production::Kind::And:
            case Production::Kind::Not:
                for (NonterminalId op : p.operands) {
                    collect_alternatives(op, prims, structural, visited);
                }
                break;
            default: structural = true; break;
            }
        }
    }

    RegexArena::Id value_regex(NonterminalId nt) {
        auto memo = value_memo.find(nt);
        if (memo != value_memo.end()) return memo->second;
        std::vector<RegexArena::Id> alts;
        const auto& prods = grammar.productions(nt);
        for (std::size_t alt = 0; alt < prods.size(); ++alt) {
            const Production& p = prods[alt];
            switch (p.kind) {
            case Production::Kind::Primitive:
                alts.push_back(tok_internal(AbstractSymbol::prim(p.prim)));
                break;
            case Production::Kind::Object:
            case Production::Kind::AnyObject:
            case Production::Kind::ArrayStar:
            case Production::Kind::ArrayFixed:
                alts.push_back(tok_nt(struct_production(nt, alt)));
                break;
            case Production::Kind::Or: {
                std::vector<RegexArena::Id> ops;
                for (NonterminalId op : p.operands) ops.push_back(value_regex(op));
                alts.push_back(arena->union_of(std::move(ops)));
                break;
            }
            case Production::Kind::And: {
                std::vector<RegexArena::Id> ops;
                for (NonterminalId op : p.operands) ops.push_back(value_regex(op));
                alts.push_back(arena->inter_of(std::move(ops)));
                break;
            }
            case Production::Kind::Not: {
                NonterminalId op = p.operands.front();
                std::set<Prim> prims;
                bool structural = false;
                std::set<NonterminalId> visited;
                collect_alternatives(op, prims, structural, visited);
                if (!structural) {
                    // complement against the full value set
                    std::vector<RegexArena::Id> rest;
                    for (std::size_t i = 0; i < kNumPrims; ++i) {
                        Prim v = static_cast<Prim>(i);
                        if (!prims.count(v)) {
                            rest.push_back(tok_internal(AbstractSymbol::prim(v)));
                        }
                    }
                    rest.push_back(tok_nt(universal_obj()));
                    rest.push_back(tok_nt(universal_arr()));
                    alts.push_back(arena->union_of(std::move(rest)));
                } else {
                    alts.push_back(arena->neg(value_regex(op)));
                }
                break;
            }
            }
        }
        RegexArena::Id out = arena->union_of(std::move(alts));
        value_memo.emplace(nt, out);
        return out;
    }

    RegexArena::Id object_body(const std::vector<std::pair<KeyId, NonterminalId>>& pairs);
    RegexArena::Id ordered_any_object_body(RegexArena::Id value);
    RegexArena::Id body_of(const Production& p);

    void run_pending() {
        while (!pending.empty()) {
            auto [nt, alt] = pending.back();
            pending.pop_back();
            std::uint32_t id = struct_ids.at({nt, alt});
            productions[id].body = body_of(grammar.productions(nt)[alt]);
        }
    }
};

RegexArena::Id Normalizer::object_body(
    const std::vector<std::pair<KeyId, NonterminalId>>& pairs) {
    if (pairs.empty()) return arena->epsilon();
    auto chain = [&](const std::vector<std::pair<KeyId, NonterminalId>>& seq) {
        std::vector<RegexArena::Id> parts;
        bool first = true;
        for (const auto& [k, nt] : seq) {
            if (!first) parts.push_back(tok_internal(AbstractSymbol::comma()));
            first = false;
            parts.push_back(tok_internal(AbstractSymbol::key(k)));
            parts.push_back(value_regex(nt));
        }
        return arena->concat_all(parts);
    };
    if (ordered) {
        auto sorted = pairs;
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        return chain(sorted);
    }
    if (pairs.size() > 8) {
        throw UnsupportedBooleanError(
            "unordered object with more than 8 keys; compile with a key order instead");
    }
    auto perm = pairs;
    std::sort(perm.begin(), perm.end());
    std::vector<RegexArena::Id> alts;
    do {
        alts.push_back(chain(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return arena->union_of(std::move(alts));
}

RegexArena::Id Normalizer::ordered_any_object_body(RegexArena::Id value) {
    // Strictly increasing key sequences: T_k = eps | # k' value T_{k'} for
    // k' > k, assembled from the largest key down.
    const std::size_t num_keys = grammar.alphabet().num_keys();
    std::vector<RegexArena::Id> tail(num_keys + 1, arena->epsilon());
    for (std::size_t k = num_keys; k-- > 0;) {
        std::vector<RegexArena::Id> alts = {arena->epsilon()};
        for (std::size_t k2 = k + 1; k2 < num_keys; ++k2) {
            alts.push_back(arena->concat_all(
                {tok_internal(AbstractSymbol::comma()),
                 tok_internal(AbstractSymbol::key(static_cast<KeyId>(k2))), value, tail[k2]}));
        }
        tail[k] = arena->union_of(std::move(alts));
    }
    std::vector<RegexArena::Id> alts = {arena->epsilon()};
    for (std::size_t k = 0; k < num_keys; ++k) {
        alts.push_back(arena->concat_all(
            {tok_internal(AbstractSymbol::key(static_cast<KeyId>(k))), value, tail[k]}));
    }
    return arena->union_of(std::move(alts));
}

std::uint32_t Normalizer::universal_obj() {
    if (!u_obj) {
        uses_universal = true;
        u_obj = static_cast<std::uint32_t>(productions.size());
        productions.push_back({"U_obj", 0, arena->empty()});
        u_arr = static_cast<std::uint32_t>(productions.size());
        productions.push_back({"U_arr", 1, arena->empty()});
        RegexArena::Id value = universal_value();
        if (ordered) {
            productions[*u_obj].body = ordered_any_object_body(value);
        } else {
            RegexArena::Id key_union = arena->empty();
            {
                std::vector<RegexArena::Id> keys;
                for (std::size_t k = 0; k < grammar.alphabet().num_keys(); ++k) {
                    keys.push_back(tok_internal(AbstractSymbol::key(static_cast<KeyId>(k))));
                }
                key_union = arena->union_of(std::move(keys));
            }
            RegexArena::Id member = arena->concat(key_union, value);
            RegexArena::Id more = arena->star(
                arena->concat(tok_internal(AbstractSymbol::comma()), member));
            productions[*u_obj].body =
                arena->union_of({arena->epsilon(), arena->concat(member, more)});
        }
        RegexArena::Id value2 = universal_value();
        RegexArena::Id more = arena->star(
            arena->concat(tok_internal(AbstractSymbol::comma()), value2));
        productions[*u_arr].body =
            arena->union_of({arena->epsilon(), arena->concat(value2, more)});
    }
    return *u_obj;
}

std::uint32_t Normalizer::universal_arr() {
    universal_obj();
    return *u_arr;
}

RegexArena::Id Normalizer::universal_value() {
    std::vector<RegexArena::Id> alts;
    for (std::size_t i = 0; i < kNumPrims; ++i) {
        alts.push_back(tok_internal(AbstractSymbol::prim(static_cast<Prim>(i))));
    }
    alts.push_back(tok_nt(*u_obj));
    alts.push_back(tok_nt(*u_arr));
    return arena->union_of(std::move(alts));
}

RegexArena::Id Normalizer::body_of(const Production& p) {
    switch (p.kind) {
    case Production::Kind::Object: return object_body(p.pairs);
    case Production::Kind::AnyObject: {
        RegexArena::Id value = value_regex(p.element);
        if (ordered) return ordered_any_object_body(value);
        std::vector<RegexArena::Id> keys;
        for (std::size_t k = 0; k < grammar.alphabet().num_keys(); ++k) {
            keys.push_back(tok_internal(AbstractSymbol::key(static_cast<KeyId>(k))));
        }
        RegexArena::Id member = arena->concat(arena->union_of(std::move(keys)), value);
        RegexArena::Id more =
            arena->star(arena->concat(tok_internal(AbstractSymbol::comma()), member));
        return arena->union_of({arena->epsilon(), arena->concat(member, more)});
    }
    case Production::Kind::ArrayStar: {
        RegexArena::Id value = value_regex(p.element);
        RegexArena::Id more =
            arena->star(arena->concat(tok_internal(AbstractSymbol::comma()), value));
        return arena->union_of({arena->epsilon(), arena->concat(value, more)});
    }
    case Production::Kind::ArrayFixed: {
        if (p.count == 0) return arena->epsilon();
        RegexArena::Id value = value_regex(p.element);
        std::vector<RegexArena::Id> parts;
        for (std::size_t i = 0; i < p.count; ++i) {
            if (i > 0) parts.push_back(tok_internal(AbstractSymbol::comma()));
            parts.push_back(value);
        }
        return arena->concat_all(parts);
    }
    default: throw IllFormedGrammarError("structural production expected");
    }
}

} // namespace

NormalizedGrammar normalize(const Grammar& grammar, bool ordered) {
    auto wf = check_well_formed(grammar);
    if (!wf.ok) {
        throw IllFormedGrammarError(wf.diagnostic);
    }
    Normalizer nz(grammar, ordered);

    // Inlined object body of an axiom-level Boolean combination: the
    // document is an object, so { e1 } op { e2 } hoists to { e1 op e2 }.
    std::function<RegexArena::Id(NonterminalId)> hoisted_body = [&](NonterminalId nt) {
        std::vector<RegexArena::Id> alts;
        for (const auto& p : grammar.productions(nt)) {
            switch (p.kind) {
            case Production::Kind::Object:
            case Production::Kind::AnyObject: alts.push_back(nz.body_of(p)); break;
            case Production::Kind::Or: {
                std::vector<RegexArena::Id> ops;
                for (NonterminalId op : p.operands) ops.push_back(hoisted_body(op));
                alts.push_back(nz.arena->union_of(std::move(ops)));
                break;
            }
            case Production::Kind::And: {
                std::vector<RegexArena::Id> ops;
                for (NonterminalId op : p.operands) ops.push_back(hoisted_body(op));
                alts.push_back(nz.arena->inter_of(std::move(ops)));
                break;
            }
            case Production::Kind::Not:
                alts.push_back(nz.arena->neg(hoisted_body(p.operands.front())));
                break;
            default: break; // primitives and arrays cannot be documents
            }
        }
        return nz.arena->union_of(std::move(alts));
    };

    // Axiom resolution: direct object alternatives stay their own
    // productions (the step-1 split); Boolean alternatives get one hoisted
    // production each.
    std::vector<std::uint32_t> axioms;
    std::function<void(NonterminalId)> resolve_axiom = [&](NonterminalId nt) {
        const auto& prods = grammar.productions(nt);
        for (std::size_t alt = 0; alt < prods.size(); ++alt) {
            const Production& p = prods[alt];
            switch (p.kind) {
            case Production::Kind::Object:
            case Production::Kind::AnyObject:
                axioms.push_back(nz.struct_production(nt, alt));
                break;
            case Production::Kind::Or:
                for (NonterminalId op : p.operands) resolve_axiom(op);
                break;
            case Production::Kind::And:
            case Production::Kind::Not: {
                RegexArena::Id body =
                    p.kind == Production::Kind::And
                        ? [&] {
                              std::vector<RegexArena::Id> ops;
                              for (NonterminalId op : p.operands) ops.push_back(hoisted_body(op));
                              return nz.arena->inter_of(std::move(ops));
                          }()
                        : nz.arena->neg(hoisted_body(p.operands.front()));
                std::uint32_t id = static_cast<std::uint32_t>(nz.productions.size());
                nz.productions.push_back(
                    {grammar.name(nt) + ".hoisted" + std::to_string(alt), 0, body});
                axioms.push_back(id);
                break;
            }
            default: break;
            }
        }
    };
    for (NonterminalId axiom : grammar.axioms()) {
        resolve_axiom(axiom);
    }
    std::sort(axioms.begin(), axioms.end());
    axioms.erase(std::unique(axioms.begin(), axioms.end()), axioms.end());
    nz.run_pending();

    NormalizedGrammar out{nz.arena, std::move(nz.productions), std::move(axioms),
                          grammar.alphabet()};

    // Boolean scopes may only contain internal symbols and universal tokens.
    for (const auto& prod : out.productions) {
        for (std::uint32_t nt : nz.arena->nonterminals_under_boolean(prod.body)) {
            if (nz.u_obj && (nt == *nz.u_obj || nt == *nz.u_arr)) continue;
            throw UnsupportedBooleanError(
                "negation/conjunction over structured schema " + out.productions[nt].name +
                " is not compilable directly; use the learner path");
        }
    }
    return out;
}

// --------------------------------------------------------------------------
// Assembly
// --------------------------------------------------------------------------

Vpa assemble_vpa(const NormalizedGrammar& normalized, const std::vector<BodyDfa>& dfas) {
    Vpa vpa(2, normalized.alphabet.num_internals());

    std::vector<StateId> offset(dfas.size(), 0);
    StateId next = 0;
    for (std::size_t j = 0; j < dfas.size(); ++j) {
        offset[j] = next;
        next += dfas[j].num_states;
    }
    StateId q0_global = next;
    StateId qf_global = next + 1;
    for (StateId q = 0; q < next; ++q) vpa.add_state();
    vpa.add_state(true, false);  // q0_global
    vpa.add_state(false, true);  // qf_global
    // stack symbols are the pushing states
    vpa.ensure_stack_symbols(vpa.num_states());

    for (std::size_t j = 0; j < dfas.size(); ++j) {
        const BodyDfa& dfa = dfas[j];
        for (const auto& [from, tok, to] : dfa.transitions) {
            StateId p = offset[j] + from;
            StateId p2 = offset[j] + to;
            if (!tok.is_nonterminal) {
                vpa.add_internal(p, tok.index, p2);
                continue;
            }
            const BodyDfa& callee = dfas[tok.index];
            if (!callee.initial) continue; // empty body language
            std::uint32_t bracket = normalized.productions[tok.index].bracket;
            vpa.add_call(p, bracket, offset[tok.index] + *callee.initial, p);
            for (std::uint32_t s = 0; s < callee.num_states; ++s) {
                if (callee.final[s]) {
                    vpa.add_return(offset[tok.index] + s, bracket, p, p2);
                }
            }
        }
    }
    for (std::uint32_t j : normalized.axioms) {
        const BodyDfa& dfa = dfas[j];
        if (!dfa.initial) continue;
        vpa.add_call(q0_global, 0, offset[j] + *dfa.initial, q0_global);
        for (std::uint32_t s = 0; s < dfa.num_states; ++s) {
            if (dfa.final[s]) {
                vpa.add_return(offset[j] + s, 0, q0_global, qf_global);
            }
        }
    }
    return vpa;
}

namespace {

std::vector<BodyToken> body_alphabet(const NormalizedGrammar& g) {
    std::vector<BodyToken> tokens;
    for (std::size_t i = 0; i < g.alphabet.num_internals(); ++i) {
        tokens.push_back(BodyToken{false, static_cast<std::uint32_t>(i)});
    }
    for (std::size_t j = 0; j < g.productions.size(); ++j) {
        tokens.push_back(BodyToken{true, static_cast<std::uint32_t>(j)});
    }
    return tokens;
}

Vpa assemble_normalized(const NormalizedGrammar& g) {
    std::vector<BodyToken> alphabet = body_alphabet(g);
    std::vector<BodyDfa> dfas;
    dfas.reserve(g.productions.size());
    for (const auto& prod : g.productions) {
        dfas.push_back(body_to_dfa(*g.arena, prod.body, alphabet));
    }
    return assemble_vpa(g, dfas);
}

NormalizedGrammar universal_normalized(const PushdownAlphabet& alphabet, bool ordered) {
    Grammar u = universal_grammar(alphabet);
    return normalize(u, ordered);
}

} // namespace

Vpa universal_vpa(const PushdownAlphabet& alphabet) {
    return assemble_normalized(universal_normalized(alphabet, false));
}

Vpa ordered_universal_vpa(const PushdownAlphabet& alphabet) {
    return assemble_normalized(universal_normalized(alphabet, true));
}

std::string CompileReport::to_json() const {
    nlohmann::json j;
    j["assembled_states"] = assembled_states;
    j["intersected_states"] = intersected_states;
    j["determinized_states"] = determinized_states;
    j["final_states"] = final_states;
    return j.dump();
}

Vpa vpa_for_schema(const Grammar& grammar, bool ordered, CompileReport* report) {
    NormalizedGrammar normalized = normalize(grammar, ordered);
    Vpa assembled = assemble_normalized(normalized);
    if (report) report->assembled_states = assembled.num_states();

    Vpa universal = ordered ? ordered_universal_vpa(grammar.alphabet())
                            : universal_vpa(grammar.alphabet());
    Vpa both = intersect(assembled, universal);
    if (report) report->intersected_states = both.num_states();

    Vpa det = determinize(both);
    if (report) report->determinized_states = det.num_states();

    Vpa trimmed = trim_unreachable(det);
    if (report) report->final_states = trimmed.num_states();
    return trimmed;
}

} // namespace jsonvpa
