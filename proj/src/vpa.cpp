#include "jsonvpa/vpa.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace jsonvpa {

namespace {

std::uint64_t pack2(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

// (from, ret, stack): from < 2^24, ret < 2^8, stack < 2^32.
std::uint64_t pack_return(StateId from, std::uint32_t ret, StackSym stack) {
    return (static_cast<std::uint64_t>(from) << 40) |
           (static_cast<std::uint64_t>(ret) << 32) | stack;
}

} // namespace

SymRef to_sym_ref(const AbstractSymbol& s, const PushdownAlphabet& alphabet) {
    switch (s.kind()) {
    case SymbolKind::Call:
        return SymRef::call(static_cast<std::uint32_t>(PushdownAlphabet::call_index(s)));
    case SymbolKind::Return:
        return SymRef::ret(static_cast<std::uint32_t>(PushdownAlphabet::return_index(s)));
    case SymbolKind::Internal:
        return SymRef::internal(static_cast<std::uint32_t>(alphabet.internal_index(s)));
    }
    throw std::logic_error("unreachable");
}

SymWord to_sym_word(const Word& w, const PushdownAlphabet& alphabet) {
    SymWord out;
    out.reserve(w.size());
    for (const auto& s : w) {
        out.push_back(to_sym_ref(s, alphabet));
    }
    return out;
}

AbstractSymbol to_abstract_symbol(const SymRef& s, const PushdownAlphabet& alphabet) {
    switch (s.kind) {
    case SymbolKind::Call:
        return s.index == 0 ? AbstractSymbol::lbrace() : AbstractSymbol::lbracket();
    case SymbolKind::Return:
        return s.index == 0 ? AbstractSymbol::rbrace() : AbstractSymbol::rbracket();
    case SymbolKind::Internal: return alphabet.internal_at(s.index);
    }
    throw std::logic_error("unreachable");
}

Word to_abstract_word(const SymWord& w, const PushdownAlphabet& alphabet) {
    Word out;
    out.reserve(w.size());
    for (const auto& s : w) {
        out.push_back(to_abstract_symbol(s, alphabet));
    }
    return out;
}

StateId Vpa::add_state(bool initial, bool final_state) {
    StateId q = static_cast<StateId>(final_.size());
    final_.push_back(final_state);
    if (initial) {
        initials_.push_back(q);
    }
    return q;
}

void Vpa::mark_initial(StateId q) {
    if (!is_initial(q)) {
        initials_.push_back(q);
    }
}

void Vpa::mark_final(StateId q) { final_.at(q) = true; }

bool Vpa::is_initial(StateId q) const {
    return std::find(initials_.begin(), initials_.end(), q) != initials_.end();
}

StackSym Vpa::add_stack_symbol() { return static_cast<StackSym>(num_stack_symbols_++); }

void Vpa::ensure_stack_symbols(std::size_t count) {
    num_stack_symbols_ = std::max(num_stack_symbols_, count);
}

void Vpa::add_call(StateId from, std::uint32_t call, StateId to, StackSym stack) {
    calls_.push_back({from, call, to, stack});
    call_index_[pack2(from, call)].emplace_back(to, stack);
}

void Vpa::add_return(StateId from, std::uint32_t ret, StackSym stack, StateId to) {
    returns_.push_back({from, ret, stack, to});
    return_index_[pack_return(from, ret, stack)].push_back(to);
}

void Vpa::add_internal(StateId from, std::uint32_t sym, StateId to) {
    internals_.push_back({from, sym, to});
    internal_index_[pack2(from, sym)].push_back(to);
}

namespace {
template <typename M, typename K>
const typename M::mapped_type& lookup_or_empty(const M& map, const K& key) {
    static const typename M::mapped_type empty{};
    auto it = map.find(key);
    return it == map.end() ? empty : it->second;
}
} // namespace

const std::vector<std::pair<StateId, StackSym>>& Vpa::call_successors(StateId from,
                                                                      std::uint32_t call) const {
    return lookup_or_empty(call_index_, pack2(from, call));
}

const std::vector<StateId>& Vpa::return_successors(StateId from, std::uint32_t ret,
                                                   StackSym stack) const {
    return lookup_or_empty(return_index_, pack_return(from, ret, stack));
}

const std::vector<StateId>& Vpa::internal_successors(StateId from, std::uint32_t sym) const {
    return lookup_or_empty(internal_index_, pack2(from, sym));
}

bool Vpa::is_deterministic() const {
    if (initials_.size() > 1) {
        return false;
    }
    for (const auto& [key, v] : call_index_) {
        (void)key;
        if (v.size() > 1) return false;
    }
    for (const auto& [key, v] : return_index_) {
        (void)key;
        if (v.size() > 1) return false;
    }
    for (const auto& [key, v] : internal_index_) {
        (void)key;
        if (v.size() > 1) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Acceptance via relation-set simulation.
//
// The current value is the relation of the innermost open level:
// R = {(p,q) | p reaches q over the level word read so far, equal stacks}.
// Calls push (R, a) and reset R to the identity; returns compose the popped
// relation through call/inner/return, mirroring the determinization proof.
// ---------------------------------------------------------------------------

namespace {

using Rel = std::vector<std::pair<StateId, StateId>>;

void sort_unique(Rel& r) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
}

Rel identity_rel(const std::vector<StateId>& states) {
    Rel r;
    r.reserve(states.size());
    for (StateId q : states) {
        r.emplace_back(q, q);
    }
    sort_unique(r);
    return r;
}

Rel identity_all(std::size_t n) {
    Rel r;
    r.reserve(n);
    for (StateId q = 0; q < n; ++q) {
        r.emplace_back(q, q);
    }
    return r;
}

Rel step_internal(const Vpa& vpa, const Rel& r, std::uint32_t sym) {
    Rel out;
    for (const auto& [p, q] : r) {
        for (StateId q2 : vpa.internal_successors(q, sym)) {
            out.emplace_back(p, q2);
        }
    }
    sort_unique(out);
    return out;
}

// Matched excursion: outer relation, call symbol, inner relation, return.
Rel step_return(const Vpa& vpa, const Rel& outer, std::uint32_t call, const Rel& inner,
                std::uint32_t ret) {
    Rel out;
    for (const auto& [p, p2] : outer) {
        for (const auto& [target, gamma] : vpa.call_successors(p2, call)) {
            // inner pairs starting at the call target
            auto lo = std::lower_bound(inner.begin(), inner.end(),
                                       std::make_pair(target, StateId{0}));
            for (auto it = lo; it != inner.end() && it->first == target; ++it) {
                for (StateId q : vpa.return_successors(it->second, ret, gamma)) {
                    out.emplace_back(p, q);
                }
            }
        }
    }
    sort_unique(out);
    return out;
}

} // namespace

bool accepts(const Vpa& vpa, const SymWord& word) {
    Rel current = identity_rel(vpa.initials());
    std::vector<std::pair<Rel, std::uint32_t>> stack;
    for (const auto& s : word) {
        switch (s.kind) {
        case SymbolKind::Call:
            stack.emplace_back(std::move(current), s.index);
            current = identity_all(vpa.num_states());
            break;
        case SymbolKind::Return: {
            if (stack.empty() || stack.back().second != s.index) {
                return false;
            }
            auto [outer, call] = std::move(stack.back());
            stack.pop_back();
            current = step_return(vpa, outer, call, current, s.index);
            break;
        }
        case SymbolKind::Internal: current = step_internal(vpa, current, s.index); break;
        }
    }
    if (!stack.empty()) {
        return false;
    }
    for (const auto& [p, q] : current) {
        if (vpa.is_initial(p) && vpa.is_final(q)) {
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Determinization. States of the result are level relations; the
// exploration keeps top-level states (reachable from Id(I)) apart from
// level states (reachable from Id(Q) between a call and its return) so only
// genuinely occurring relations are materialized.
// ---------------------------------------------------------------------------

namespace {

struct SubsetExplorer {
    const Vpa& input;
    std::map<Rel, StateId> ids;
    std::vector<Rel> rels;
    std::vector<bool> top_level;  // reachable as a top-level relation
    std::vector<bool> in_level;   // reachable as an inner-level relation

    StateId intern(const Rel& r) {
        auto [it, inserted] = ids.emplace(r, static_cast<StateId>(rels.size()));
        if (inserted) {
            rels.push_back(r);
            top_level.push_back(false);
            in_level.push_back(false);
        }
        return it->second;
    }
};

} // namespace

Vpa determinize(const Vpa& input) {
    SubsetExplorer ex{input, {}, {}, {}, {}};
    const std::size_t num_calls = input.num_calls();
    const std::size_t num_internals = input.num_internals();

    StateId init = ex.intern(identity_rel(input.initials()));
    StateId level_init = ex.intern(identity_all(input.num_states()));
    ex.top_level[init] = true;
    ex.in_level[level_init] = true;

    bool changed = true;
    while (changed) {
        changed = false;
        // Internal closure within each flag class.
        for (StateId s = 0; s < ex.rels.size(); ++s) {
            if (!ex.top_level[s] && !ex.in_level[s]) continue;
            for (std::uint32_t a = 0; a < num_internals; ++a) {
                Rel t = step_internal(input, ex.rels[s], a);
                StateId tid = ex.intern(t);
                if (ex.top_level[s] && !ex.top_level[tid]) {
                    ex.top_level[tid] = true;
                    changed = true;
                }
                if (ex.in_level[s] && !ex.in_level[tid]) {
                    ex.in_level[tid] = true;
                    changed = true;
                }
            }
        }
        // Matched excursions: any reachable S may call; the inner level runs
        // from Id(Q); the return lands back in S's class.
        for (StateId s = 0; s < ex.rels.size(); ++s) {
            if (!ex.top_level[s] && !ex.in_level[s]) continue;
            for (StateId inner = 0; inner < ex.rels.size(); ++inner) {
                if (!ex.in_level[inner]) continue;
                for (std::uint32_t a = 0; a < num_calls; ++a) {
                    Rel t = step_return(input, ex.rels[s], a, ex.rels[inner], a);
                    StateId tid = ex.intern(t);
                    if (ex.top_level[s] && !ex.top_level[tid]) {
                        ex.top_level[tid] = true;
                        changed = true;
                    }
                    if (ex.in_level[s] && !ex.in_level[tid]) {
                        ex.in_level[tid] = true;
                        changed = true;
                    }
                }
            }
        }
    }

    // Keep only flagged states, renumbered densely.
    std::vector<StateId> remap(ex.rels.size(), UINT32_MAX);
    Vpa out(num_calls, num_internals);
    for (StateId s = 0; s < ex.rels.size(); ++s) {
        if (!ex.top_level[s] && !ex.in_level[s]) continue;
        bool is_final = false;
        for (const auto& [p, q] : ex.rels[s]) {
            if (input.is_initial(p) && input.is_final(q)) {
                is_final = true;
                break;
            }
        }
        remap[s] = out.add_state(s == init, is_final);
    }
    out.ensure_stack_symbols(out.num_states() * num_calls);
    auto gamma = [&](StateId s, std::uint32_t a) {
        return static_cast<StackSym>(remap[s] * num_calls + a);
    };

    for (StateId s = 0; s < ex.rels.size(); ++s) {
        if (remap[s] == UINT32_MAX) continue;
        for (std::uint32_t a = 0; a < num_internals; ++a) {
            Rel t = step_internal(input, ex.rels[s], a);
            out.add_internal(remap[s], a, remap[ex.ids.at(t)]);
        }
        for (std::uint32_t a = 0; a < num_calls; ++a) {
            out.add_call(remap[s], a, remap[level_init], gamma(s, a));
        }
        if (ex.in_level[s]) {
            for (StateId outer = 0; outer < ex.rels.size(); ++outer) {
                if (remap[outer] == UINT32_MAX) continue;
                for (std::uint32_t a = 0; a < num_calls; ++a) {
                    Rel t = step_return(input, ex.rels[outer], a, ex.rels[s], a);
                    out.add_return(remap[s], a, gamma(outer, a), remap[ex.ids.at(t)]);
                }
            }
        }
    }
    return out;
}

Vpa intersect(const Vpa& a, const Vpa& b) {
    if (a.num_calls() != b.num_calls() || a.num_internals() != b.num_internals()) {
        throw AlphabetMismatchError{};
    }
    Vpa out(a.num_calls(), a.num_internals());
    auto id = [&](StateId qa, StateId qb) {
        return static_cast<StateId>(qa * b.num_states() + qb);
    };
    for (StateId qa = 0; qa < a.num_states(); ++qa) {
        for (StateId qb = 0; qb < b.num_states(); ++qb) {
            out.add_state(a.is_initial(qa) && b.is_initial(qb),
                          a.is_final(qa) && b.is_final(qb));
        }
    }
    out.ensure_stack_symbols(a.num_stack_symbols() * b.num_stack_symbols());
    auto stack_id = [&](StackSym ga, StackSym gb) {
        return static_cast<StackSym>(ga * b.num_stack_symbols() + gb);
    };
    for (const auto& ta : a.internals()) {
        for (const auto& tb : b.internals()) {
            if (ta.symbol != tb.symbol) continue;
            out.add_internal(id(ta.from, tb.from), ta.symbol, id(ta.to, tb.to));
        }
    }
    for (const auto& ta : a.calls()) {
        for (const auto& tb : b.calls()) {
            if (ta.symbol != tb.symbol) continue;
            out.add_call(id(ta.from, tb.from), ta.symbol, id(ta.to, tb.to),
                         stack_id(ta.stack, tb.stack));
        }
    }
    for (const auto& ta : a.returns()) {
        for (const auto& tb : b.returns()) {
            if (ta.symbol != tb.symbol) continue;
            out.add_return(id(ta.from, tb.from), ta.symbol, stack_id(ta.stack, tb.stack),
                           id(ta.to, tb.to));
        }
    }
    return trim_unreachable(out);
}

Vpa trim_unreachable(const Vpa& vpa) {
    // Forward walk ignoring stack constraints; an overapproximation of
    // reachability, so dropping the rest is safe.
    std::vector<bool> seen(vpa.num_states(), false);
    std::vector<StateId> work;
    for (StateId q : vpa.initials()) {
        if (!seen[q]) {
            seen[q] = true;
            work.push_back(q);
        }
    }
    std::vector<std::vector<StateId>> adj(vpa.num_states());
    for (const auto& t : vpa.internals()) adj[t.from].push_back(t.to);
    for (const auto& t : vpa.calls()) adj[t.from].push_back(t.to);
    for (const auto& t : vpa.returns()) adj[t.from].push_back(t.to);
    while (!work.empty()) {
        StateId q = work.back();
        work.pop_back();
        for (StateId to : adj[q]) {
            if (!seen[to]) {
                seen[to] = true;
                work.push_back(to);
            }
        }
    }
    std::vector<StateId> remap(vpa.num_states(), UINT32_MAX);
    Vpa out(vpa.num_calls(), vpa.num_internals());
    for (StateId q = 0; q < vpa.num_states(); ++q) {
        if (seen[q]) {
            remap[q] = out.add_state(vpa.is_initial(q), vpa.is_final(q));
        }
    }
    out.ensure_stack_symbols(vpa.num_stack_symbols());
    for (const auto& t : vpa.internals()) {
        if (seen[t.from] && seen[t.to]) out.add_internal(remap[t.from], t.symbol, remap[t.to]);
    }
    for (const auto& t : vpa.calls()) {
        if (seen[t.from] && seen[t.to]) out.add_call(remap[t.from], t.symbol, remap[t.to], t.stack);
    }
    for (const auto& t : vpa.returns()) {
        if (seen[t.from] && seen[t.to]) out.add_return(remap[t.from], t.symbol, t.stack, remap[t.to]);
    }
    return out;
}

std::string Vpa::to_dot(const std::vector<std::string>& call_names,
                        const std::vector<std::string>& internal_names) const {
    auto call_name = [&](std::uint32_t i) {
        return i < call_names.size() ? call_names[i] : "c" + std::to_string(i);
    };
    auto internal_name = [&](std::uint32_t i) {
        return i < internal_names.size() ? internal_names[i] : "x" + std::to_string(i);
    };
    std::ostringstream os;
    os << "digraph vpa {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (StateId q = 0; q < num_states(); ++q) {
        os << "  q" << q;
        if (is_final(q)) os << " [shape=doublecircle]";
        os << ";\n";
    }
    for (StateId q : initials_) {
        os << "  init" << q << " [shape=point]; init" << q << " -> q" << q << ";\n";
    }
    for (const auto& t : internals_) {
        os << "  q" << t.from << " -> q" << t.to << " [label=\"" << internal_name(t.symbol)
           << "\"];\n";
    }
    for (const auto& t : calls_) {
        os << "  q" << t.from << " -> q" << t.to << " [label=\"" << call_name(t.symbol) << ", g"
           << t.stack << "\"];\n";
    }
    for (const auto& t : returns_) {
        os << "  q" << t.from << " -> q" << t.to << " [label=\"~" << call_name(t.symbol) << ", g"
           << t.stack << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

std::string Vpa::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["kind"] = "vpa";
    j["num_calls"] = num_calls_;
    j["num_internals"] = num_internals_;
    j["num_states"] = num_states();
    j["num_stack_symbols"] = num_stack_symbols_;
    j["initials"] = initials_;
    std::vector<StateId> finals;
    for (StateId q = 0; q < num_states(); ++q) {
        if (final_[q]) finals.push_back(q);
    }
    j["finals"] = finals;
    auto& jc = j["calls"] = nlohmann::json::array();
    for (const auto& t : calls_) jc.push_back({t.from, t.symbol, t.to, t.stack});
    auto& jr = j["returns"] = nlohmann::json::array();
    for (const auto& t : returns_) jr.push_back({t.from, t.symbol, t.stack, t.to});
    auto& ji = j["internals"] = nlohmann::json::array();
    for (const auto& t : internals_) ji.push_back({t.from, t.symbol, t.to});
    return j.dump();
}

Vpa Vpa::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("version", 0) != 1 || j.value("kind", "") != "vpa") {
        throw std::runtime_error("unsupported vpa format");
    }
    Vpa out(j["num_calls"].get<std::size_t>(), j["num_internals"].get<std::size_t>());
    std::size_t n = j["num_states"].get<std::size_t>();
    for (std::size_t q = 0; q < n; ++q) {
        out.add_state();
    }
    for (StateId q : j["initials"].get<std::vector<StateId>>()) out.mark_initial(q);
    for (StateId q : j["finals"].get<std::vector<StateId>>()) out.mark_final(q);
    out.ensure_stack_symbols(j["num_stack_symbols"].get<std::size_t>());
    for (const auto& t : j["calls"]) {
        out.add_call(t[0].get<StateId>(), t[1].get<std::uint32_t>(), t[2].get<StateId>(),
                     t[3].get<StackSym>());
    }
    for (const auto& t : j["returns"]) {
        out.add_return(t[0].get<StateId>(), t[1].get<std::uint32_t>(), t[2].get<StackSym>(),
                       t[3].get<StateId>());
    }
    for (const auto& t : j["internals"]) {
        out.add_internal(t[0].get<StateId>(), t[1].get<std::uint32_t>(), t[2].get<StateId>());
    }
    return out;
}

} // namespace jsonvpa
