#include "jsonvpa/one_sevpa.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

namespace jsonvpa {

namespace {
std::uint64_t pack_ret(StateId from, std::uint32_t ret, StackSym stack) {
    return (static_cast<std::uint64_t>(from) << 40) | (static_cast<std::uint64_t>(ret) << 32) |
           stack;
}
} // namespace

StateId OneSevpa::add_state(bool final_state) {
    StateId q = static_cast<StateId>(final_.size());
    final_.push_back(final_state);
    internal_.resize(final_.size() * num_internals_, -1);
    return q;
}

void OneSevpa::set_internal(StateId from, std::uint32_t sym, StateId to) {
    internal_.at(from * num_internals_ + sym) = to;
}

void OneSevpa::set_return(StateId from, std::uint32_t ret, StateId call_source, std::uint32_t call,
                          StateId to) {
    returns_[pack_ret(from, ret, stack_symbol(call_source, call))] = to;
}

std::optional<StateId> OneSevpa::internal_step(StateId from, std::uint32_t sym) const {
    std::int64_t to = internal_.at(from * num_internals_ + sym);
    if (to < 0) return std::nullopt;
    return static_cast<StateId>(to);
}

std::optional<StateId> OneSevpa::return_step(StateId from, std::uint32_t ret, StateId call_source,
                                             std::uint32_t call) const {
    auto it = returns_.find(pack_ret(from, ret, stack_symbol(call_source, call)));
    if (it == returns_.end()) return std::nullopt;
    return it->second;
}

std::size_t OneSevpa::num_internal_transitions() const {
    return static_cast<std::size_t>(
        std::count_if(internal_.begin(), internal_.end(), [](std::int64_t t) { return t >= 0; }));
}

std::vector<ReturnTransition> OneSevpa::return_transitions() const {
    std::vector<ReturnTransition> out;
    out.reserve(returns_.size());
    for (const auto& [key, to] : returns_) {
        StateId from = static_cast<StateId>(key >> 40);
        std::uint32_t ret = static_cast<std::uint32_t>((key >> 32) & 0xFF);
        StackSym stack = static_cast<StackSym>(key & 0xFFFFFFFF);
        out.push_back({from, ret, stack, to});
    }
    return out;
}

bool OneSevpa::accepts(const SymWord& word) const {
    StateId q = initial();
    std::vector<StackSym> stack;
    for (const auto& s : word) {
        switch (s.kind) {
        case SymbolKind::Call:
            stack.push_back(stack_symbol(q, s.index));
            q = initial();
            break;
        case SymbolKind::Return: {
            if (stack.empty()) return false;
            StackSym g = stack.back();
            stack.pop_back();
            auto [src, call] = decode_stack(g);
            auto next = return_step(q, s.index, src, call);
            if (!next || call != s.index) return false;
            q = *next;
            break;
        }
        case SymbolKind::Internal: {
            auto next = internal_step(q, s.index);
            if (!next) return false;
            q = *next;
            break;
        }
        }
    }
    return stack.empty() && is_final(q);
}

Vpa OneSevpa::to_vpa() const {
    Vpa out(num_calls_, num_internals_);
    for (StateId q = 0; q < num_states(); ++q) {
        out.add_state(q == initial(), is_final(q));
    }
    out.ensure_stack_symbols(num_states() * num_calls_);
    for (StateId q = 0; q < num_states(); ++q) {
        for (std::uint32_t a = 0; a < num_calls_; ++a) {
            out.add_call(q, a, initial(), stack_symbol(q, a));
        }
        for (std::uint32_t x = 0; x < num_internals_; ++x) {
            if (auto to = internal_step(q, x)) {
                out.add_internal(q, x, *to);
            }
        }
    }
    for (const auto& t : return_transitions()) {
        out.add_return(t.from, t.symbol, t.stack, t.to);
    }
    return out;
}

std::string OneSevpa::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["kind"] = "one_sevpa";
    j["num_calls"] = num_calls_;
    j["num_internals"] = num_internals_;
    j["num_states"] = num_states();
    std::vector<StateId> finals;
    for (StateId q = 0; q < num_states(); ++q) {
        if (final_[q]) finals.push_back(q);
    }
    j["finals"] = finals;
    auto& ji = j["internals"] = nlohmann::json::array();
    for (StateId q = 0; q < num_states(); ++q) {
        for (std::uint32_t x = 0; x < num_internals_; ++x) {
            if (auto to = internal_step(q, x)) {
                ji.push_back({q, x, *to});
            }
        }
    }
    auto rts = return_transitions();
    std::sort(rts.begin(), rts.end(), [](const auto& a, const auto& b) {
        return std::tie(a.from, a.symbol, a.stack) < std::tie(b.from, b.symbol, b.stack);
    });
    auto& jr = j["returns"] = nlohmann::json::array();
    for (const auto& t : rts) {
        jr.push_back({t.from, t.symbol, t.stack, t.to});
    }
    return j.dump();
}

OneSevpa OneSevpa::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("version", 0) != 1 || j.value("kind", "") != "one_sevpa") {
        throw std::runtime_error("unsupported automaton format");
    }
    OneSevpa out(j["num_calls"].get<std::size_t>(), j["num_internals"].get<std::size_t>());
    std::size_t n = j["num_states"].get<std::size_t>();
    for (std::size_t q = 0; q < n; ++q) {
        out.add_state();
    }
    for (StateId q : j["finals"].get<std::vector<StateId>>()) out.mark_final(q);
    for (const auto& t : j["internals"]) {
        out.set_internal(t[0].get<StateId>(), t[1].get<std::uint32_t>(), t[2].get<StateId>());
    }
    for (const auto& t : j["returns"]) {
        StackSym g = t[2].get<StackSym>();
        auto [src, call] = out.decode_stack(g);
        out.set_return(t[0].get<StateId>(), t[1].get<std::uint32_t>(), src, call,
                       t[3].get<StateId>());
    }
    return out;
}

std::uint64_t OneSevpa::structural_hash() const {
    std::string s = to_json();
    std::uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::string OneSevpa::to_dot(const std::vector<std::string>& call_names,
                             const std::vector<std::string>& internal_names) const {
    return to_vpa().to_dot(call_names, internal_names);
}

bool is_one_sevpa(const Vpa& vpa) {
    if (vpa.initials().size() != 1 || !vpa.is_deterministic()) {
        return false;
    }
    if (vpa.num_stack_symbols() != vpa.num_states() * vpa.num_calls()) {
        return false;
    }
    StateId q0 = vpa.initials().front();
    for (const auto& t : vpa.calls()) {
        if (t.to != q0 || t.stack != t.from * vpa.num_calls() + t.symbol) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Relation-subset conversion. A 1-SEVPA state stands for the relation of the
// current level word; since every call resets the level to q0 = Id(Q), the
// whole construction closes under internal steps and matched excursions.
// ---------------------------------------------------------------------------

namespace {

using Rel = std::vector<std::pair<StateId, StateId>>;

void sort_unique(Rel& r) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
}

Rel rel_step_internal(const Vpa& vpa, const Rel& r, std::uint32_t sym) {
    Rel out;
    for (const auto& [p, q] : r) {
        for (StateId q2 : vpa.internal_successors(q, sym)) {
            out.emplace_back(p, q2);
        }
    }
    sort_unique(out);
    return out;
}

Rel rel_step_return(const Vpa& vpa, const Rel& outer, std::uint32_t call, const Rel& inner,
                    std::uint32_t ret) {
    Rel out;
    for (const auto& [p, p2] : outer) {
        for (const auto& [target, gamma] : vpa.call_successors(p2, call)) {
            auto lo =
                std::lower_bound(inner.begin(), inner.end(), std::make_pair(target, StateId{0}));
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

OneSevpa to_one_sevpa(const Vpa& input) {
    const std::size_t num_calls = input.num_calls();
    const std::size_t num_internals = input.num_internals();

    std::map<Rel, StateId> ids;
    std::vector<Rel> rels;
    auto intern = [&](const Rel& r) {
        auto [it, inserted] = ids.emplace(r, static_cast<StateId>(rels.size()));
        if (inserted) {
            rels.push_back(r);
        }
        return it->second;
    };

    Rel id_all;
    for (StateId q = 0; q < input.num_states(); ++q) {
        id_all.emplace_back(q, q);
    }
    intern(id_all); // q0 = Id(Q)

    // Close under internal steps and matched excursions.
    for (std::size_t next = 0; next < rels.size(); ++next) {
        for (std::uint32_t x = 0; x < num_internals; ++x) {
            intern(rel_step_internal(input, rels[next], x));
        }
        // Excursions pair every known outer with every known inner; new
        // states extend the loop bound, so all pairs eventually run.
        for (std::size_t other = 0; other <= next; ++other) {
            for (std::uint32_t a = 0; a < num_calls; ++a) {
                intern(rel_step_return(input, rels[next], a, rels[other], a));
                intern(rel_step_return(input, rels[other], a, rels[next], a));
            }
        }
    }

    OneSevpa out(num_calls, num_internals);
    for (const Rel& r : rels) {
        bool is_final = false;
        for (const auto& [p, q] : r) {
            if (input.is_initial(p) && input.is_final(q)) {
                is_final = true;
                break;
            }
        }
        out.add_state(is_final);
    }
    for (StateId s = 0; s < rels.size(); ++s) {
        for (std::uint32_t x = 0; x < num_internals; ++x) {
            out.set_internal(s, x, ids.at(rel_step_internal(input, rels[s], x)));
        }
        for (StateId outer = 0; outer < rels.size(); ++outer) {
            for (std::uint32_t a = 0; a < num_calls; ++a) {
                out.set_return(s, a, outer, a,
                               ids.at(rel_step_return(input, rels[outer], a, rels[s], a)));
            }
        }
    }
    return out;
}

} // namespace jsonvpa
