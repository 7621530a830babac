#include "jsonvpa/analysis.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace jsonvpa {

struct Witness::Node {
    enum class Kind { Leaf, Concat, Wrap } kind;
    SymRef leaf{SymbolKind::Internal, 0};
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    std::uint32_t call = 0;
};

Witness Witness::empty() { return Witness{nullptr}; }

Witness Witness::leaf(SymRef s) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Leaf;
    n->leaf = s;
    return Witness{std::move(n)};
}

Witness Witness::word(const SymWord& w) {
    Witness out = empty();
    for (const auto& s : w) {
        out = concat(out, leaf(s));
    }
    return out;
}

Witness Witness::concat(const Witness& a, const Witness& b) {
    if (!a.node_) return b;
    if (!b.node_) return a;
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Concat;
    n->left = a.node_;
    n->right = b.node_;
    return Witness{std::move(n)};
}

Witness Witness::wrap(std::uint32_t call, const Witness& inner) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Wrap;
    n->call = call;
    n->left = inner.node_;
    return Witness{std::move(n)};
}

SymWord Witness::materialize() const {
    SymWord out;
    struct Frame {
        const Node* node;     // nullptr = emit a pending return
        std::uint32_t ret;    // only for node == nullptr
    };
    std::vector<Frame> stack;
    if (node_) stack.push_back({node_.get(), 0});
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.node == nullptr) {
            out.push_back(SymRef::ret(f.ret));
            continue;
        }
        switch (f.node->kind) {
        case Node::Kind::Leaf: out.push_back(f.node->leaf); break;
        case Node::Kind::Concat:
            stack.push_back({f.node->right.get(), 0});
            stack.push_back({f.node->left.get(), 0});
            break;
        case Node::Kind::Wrap:
            out.push_back(SymRef::call(f.node->call));
            stack.push_back({nullptr, f.node->call});
            if (f.node->left) stack.push_back({f.node->left.get(), 0});
            break;
        }
    }
    return out;
}

ReachRelation::ReachRelation(std::size_t num_states)
    : num_states_(num_states), member_(num_states * num_states, false),
      wit_(num_states * num_states, Witness::empty()), targets_(num_states) {}

bool ReachRelation::add(StateId p, StateId q, Witness w) {
    auto idx = p * num_states_ + q;
    if (member_[idx]) return false;
    member_[idx] = true;
    wit_[idx] = std::move(w);
    targets_[p].push_back(q);
    ++size_;
    return true;
}

const Witness& ReachRelation::witness(StateId p, StateId q) const {
    if (!contains(p, q)) throw std::out_of_range("pair not in reachability relation");
    return wit_[p * num_states_ + q];
}

std::vector<SymWord> ReachRelation::witness_words() const {
    std::vector<SymWord> out;
    for (StateId p = 0; p < num_states_; ++p) {
        for (StateId q : targets_[p]) {
            SymWord w = witness_word(p, q);
            if (!w.empty()) {
                out.push_back(std::move(w));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const SymWord& a, const SymWord& b) {
        return a.size() < b.size();
    });
    return out;
}

std::vector<std::pair<StateId, StateId>> level_relation(const Vpa& vpa, const SymWord& word) {
    using Rel = std::vector<std::pair<StateId, StateId>>;
    Rel current;
    for (StateId q = 0; q < vpa.num_states(); ++q) {
        current.emplace_back(q, q);
    }
    std::vector<std::pair<Rel, std::uint32_t>> stack;
    auto sort_unique = [](Rel& r) {
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
    };
    for (const auto& s : word) {
        switch (s.kind) {
        case SymbolKind::Internal: {
            Rel next;
            for (const auto& [p, q] : current) {
                for (StateId q2 : vpa.internal_successors(q, s.index)) {
                    next.emplace_back(p, q2);
                }
            }
            sort_unique(next);
            current = std::move(next);
            break;
        }
        case SymbolKind::Call: {
            stack.emplace_back(std::move(current), s.index);
            current.clear();
            for (StateId q = 0; q < vpa.num_states(); ++q) {
                current.emplace_back(q, q);
            }
            break;
        }
        case SymbolKind::Return: {
            if (stack.empty() || stack.back().second != s.index) {
                return {};
            }
            auto [outer, call] = std::move(stack.back());
            stack.pop_back();
            Rel next;
            for (const auto& [p, p2] : outer) {
                for (const auto& [target, gamma] : vpa.call_successors(p2, call)) {
                    auto lo = std::lower_bound(current.begin(), current.end(),
                                               std::make_pair(target, StateId{0}));
                    for (auto it = lo; it != current.end() && it->first == target; ++it) {
                        for (StateId q : vpa.return_successors(it->second, s.index, gamma)) {
                            next.emplace_back(p, q);
                        }
                    }
                }
            }
            sort_unique(next);
            current = std::move(next);
            break;
        }
        }
    }
    if (!stack.empty()) return {};
    return current;
}

namespace {

// Transitive closure driven by newly added pairs.
void close_transitively(ReachRelation& r, std::deque<std::pair<StateId, StateId>>& fresh) {
    while (!fresh.empty()) {
        auto [p, q] = fresh.front();
        fresh.pop_front();
        for (StateId t : std::vector<StateId>(r.targets_of(q))) {
            if (r.add(p, t, Witness::concat(r.witness(p, q), r.witness(q, t)))) {
                fresh.emplace_back(p, t);
            }
        }
        for (StateId s = 0; s < r.num_states(); ++s) {
            if (r.contains(s, p) &&
                r.add(s, q, Witness::concat(r.witness(s, p), r.witness(p, q)))) {
                fresh.emplace_back(s, q);
            }
        }
    }
}

} // namespace

ReachRelation reachability(const Vpa& vpa, const std::vector<SymWord>& seed_words) {
    const std::size_t n = vpa.num_states();
    ReachRelation r(n);
    std::deque<std::pair<StateId, StateId>> fresh;

    for (StateId q = 0; q < n; ++q) {
        r.add(q, q, Witness::empty());
        fresh.emplace_back(q, q);
    }
    for (const auto& t : vpa.internals()) {
        if (r.add(t.from, t.to, Witness::leaf(SymRef::internal(t.symbol)))) {
            fresh.emplace_back(t.from, t.to);
        }
    }
    for (const SymWord& w : seed_words) {
        for (const auto& [p, q] : level_relation(vpa, w)) {
            if (r.add(p, q, Witness::word(w))) {
                fresh.emplace_back(p, q);
            }
        }
    }
    close_transitively(r, fresh);

    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& ct : vpa.calls()) {
            for (StateId p2 : std::vector<StateId>(r.targets_of(ct.to))) {
                for (StateId q2 : vpa.return_successors(p2, ct.symbol, ct.stack)) {
                    Witness w = Witness::wrap(ct.symbol, r.witness(ct.to, p2));
                    if (r.add(ct.from, q2, std::move(w))) {
                        fresh.emplace_back(ct.from, q2);
                        changed = true;
                    }
                }
            }
        }
        close_transitively(r, fresh);
    }
    return r;
}

std::size_t LiveSet::count() const {
    return static_cast<std::size_t>(std::count(live_.begin(), live_.end(), true));
}

bool LiveSet::add(StateId p, Witness before, Witness after) {
    if (live_.at(p)) return false;
    live_[p] = true;
    wit_[p] = std::make_pair(std::move(before), std::move(after));
    return true;
}

std::pair<SymWord, SymWord> LiveSet::witness_pair(StateId p) const {
    return {before(p).materialize(), after(p).materialize()};
}

const Witness& LiveSet::before(StateId p) const {
    if (!live_.at(p)) throw std::out_of_range("state is not live");
    return wit_[p]->first;
}

const Witness& LiveSet::after(StateId p) const {
    if (!live_.at(p)) throw std::out_of_range("state is not live");
    return wit_[p]->second;
}

LiveSet live_set(const OneSevpa& sevpa, const ReachRelation& reach) {
    const std::size_t n = sevpa.num_states();
    LiveSet live(n);
    std::deque<StateId> work;
    for (StateId q = 0; q < n; ++q) {
        if (sevpa.is_final(q) && live.add(q, Witness::empty(), Witness::empty())) {
            work.push_back(q);
        }
    }
    const auto returns = sevpa.return_transitions();
    while (!work.empty()) {
        StateId p = work.front();
        work.pop_front();
        // Rule 1: (p', p) in Reach => p' live with (w, t' w').
        for (StateId p2 = 0; p2 < n; ++p2) {
            if (live.is_live(p2) || !reach.contains(p2, p)) continue;
            Witness after = Witness::concat(reach.witness(p2, p), live.after(p));
            live.add(p2, live.before(p), std::move(after));
            work.push_back(p2);
        }
        // Rule 2: return (p', ~a, (r, a), p) with (q0, r) in Reach
        // => p' live with (w t a, ~a w').
        for (const auto& rt : returns) {
            if (rt.to != p || live.is_live(rt.from)) continue;
            auto [src, call] = sevpa.decode_stack(rt.stack);
            if (rt.symbol != call) continue;
            if (!reach.contains(sevpa.initial(), src)) continue;
            Witness before = Witness::concat(
                live.before(p), Witness::concat(reach.witness(sevpa.initial(), src),
                                                Witness::leaf(SymRef::call(call))));
            Witness after = Witness::concat(Witness::leaf(SymRef::ret(rt.symbol)), live.after(p));
            live.add(rt.from, std::move(before), std::move(after));
            work.push_back(rt.from);
        }
    }
    return live;
}

BinRemoval remove_bin_states(const OneSevpa& sevpa, const LiveSet& live) {
    if (!live.is_live(sevpa.initial())) {
        throw EmptyAutomatonError{};
    }
    std::vector<std::optional<StateId>> map(sevpa.num_states());
    OneSevpa out(sevpa.num_calls(), sevpa.num_internals());
    for (StateId q = 0; q < sevpa.num_states(); ++q) {
        if (live.is_live(q)) {
            map[q] = out.add_state(sevpa.is_final(q));
        }
    }
    for (StateId q = 0; q < sevpa.num_states(); ++q) {
        if (!map[q]) continue;
        for (std::uint32_t x = 0; x < sevpa.num_internals(); ++x) {
            auto to = sevpa.internal_step(q, x);
            if (to && map[*to]) {
                out.set_internal(*map[q], x, *map[*to]);
            }
        }
    }
    for (const auto& rt : sevpa.return_transitions()) {
        auto [src, call] = sevpa.decode_stack(rt.stack);
        if (map[rt.from] && map[rt.to] && map[src]) {
            out.set_return(*map[rt.from], rt.symbol, *map[src], call, *map[rt.to]);
        }
    }
    return BinRemoval{std::move(out), std::move(map)};
}

std::optional<StateId> run_well_matched(const OneSevpa& sevpa, StateId from, const SymWord& word) {
    StateId q = from;
    std::vector<StackSym> stack;
    for (const auto& s : word) {
        switch (s.kind) {
        case SymbolKind::Call:
            stack.push_back(sevpa.stack_symbol(q, s.index));
            q = sevpa.initial();
            break;
        case SymbolKind::Return: {
            if (stack.empty()) return std::nullopt;
            auto [src, call] = sevpa.decode_stack(stack.back());
            stack.pop_back();
            if (call != s.index) return std::nullopt;
            auto next = sevpa.return_step(q, s.index, src, call);
            if (!next) return std::nullopt;
            q = *next;
            break;
        }
        case SymbolKind::Internal: {
            auto next = sevpa.internal_step(q, s.index);
            if (!next) return std::nullopt;
            q = *next;
            break;
        }
        }
    }
    if (!stack.empty()) return std::nullopt;
    return q;
}

} // namespace jsonvpa
