#include "jsonvpa/families.hpp"

#include <string>
#include <vector>

namespace jsonvpa {

Grammar worstcase_grammar(std::size_t ell) {
    std::vector<std::string> keys;
    for (std::size_t i = 1; i <= ell; ++i) {
        // zero-padded so the lexicographic alphabet order matches k1 < k2 < ...
        std::string n = std::to_string(i);
        keys.push_back("k" + std::string(3 - std::min<std::size_t>(3, n.size()), '0') + n);
    }
    Grammar g{PushdownAlphabet(keys)};
    NonterminalId str = g.add_nonterminal("Str");
    g.add_production(str, Production::primitive(Prim::Str));

    std::vector<NonterminalId> r(ell);
    for (std::size_t i = 0; i < ell; ++i) {
        r[i] = g.add_nonterminal("R" + std::to_string(i + 1));
        std::vector<std::pair<KeyId, NonterminalId>> pairs;
        for (std::size_t j = i; j < ell; ++j) {
            pairs.emplace_back(static_cast<KeyId>(j), str);
        }
        g.add_production(r[i], Production::object(std::move(pairs)));
    }
    std::vector<NonterminalId> s(ell);
    for (std::size_t i = 0; i < ell; ++i) {
        s[i] = g.add_nonterminal("S" + std::to_string(i + 1));
        std::vector<NonterminalId> ops(r.begin() + static_cast<long>(i), r.end());
        g.add_production(s[i], Production::or_of(std::move(ops)));
    }
    NonterminalId root = g.add_nonterminal("S");
    g.add_production(root, Production::and_of(s));
    g.mark_axiom(root);
    return g;
}

Grammar permutation_family(std::size_t n) {
    std::vector<std::string> keys;
    for (std::size_t i = 1; i <= n; ++i) {
        std::string d = std::to_string(i);
        keys.push_back("k" + std::string(3 - std::min<std::size_t>(3, d.size()), '0') + d);
    }
    Grammar g{PushdownAlphabet(keys)};
    NonterminalId str = g.add_nonterminal("Str");
    g.add_production(str, Production::primitive(Prim::Str));
    NonterminalId root = g.add_nonterminal("Sn");
    std::vector<std::pair<KeyId, NonterminalId>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        pairs.emplace_back(static_cast<KeyId>(i), str);
    }
    g.add_production(root, Production::object(std::move(pairs)));
    g.mark_axiom(root);
    return g;
}

bool verify_subset_distinguishability(const Grammar& family, std::size_t n) {
    std::size_t subsets = std::size_t{1} << n;
    auto prefix_of = [&](std::size_t mask) {
        Word w{AbstractSymbol::lbrace()};
        bool first = true;
        for (std::size_t k = 0; k < n; ++k) {
            if (!(mask & (std::size_t{1} << k))) continue;
            if (!first) w.push_back(AbstractSymbol::comma());
            first = false;
            w.push_back(AbstractSymbol::key(static_cast<KeyId>(k)));
            w.push_back(AbstractSymbol::prim(Prim::Str));
        }
        return w;
    };
    auto completion_of = [&](std::size_t mask) {
        Word w;
        for (std::size_t k = 0; k < n; ++k) {
            if (mask & (std::size_t{1} << k)) continue;
            if (!w.empty() || mask != 0) w.push_back(AbstractSymbol::comma());
            w.push_back(AbstractSymbol::key(static_cast<KeyId>(k)));
            w.push_back(AbstractSymbol::prim(Prim::Str));
        }
        w.push_back(AbstractSymbol::rbrace());
        return w;
    };
    for (std::size_t t = 0; t < subsets; ++t) {
        Word completion = completion_of(t);
        Word own = prefix_of(t);
        own.insert(own.end(), completion.begin(), completion.end());
        if (!classical_validate_word(family, own).valid) {
            return false;
        }
        for (std::size_t other = 0; other < subsets; ++other) {
            if (other == t) continue;
            Word w = prefix_of(other);
            w.insert(w.end(), completion.begin(), completion.end());
            if (classical_validate_word(family, w).valid) {
                return false;
            }
        }
    }
    return true;
}

} // namespace jsonvpa
