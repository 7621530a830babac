#include "jsonvpa/learner.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include <json.hpp>

#include "jsonvpa/analysis.hpp"
#include "jsonvpa/keygraph.hpp"

namespace jsonvpa {

namespace {

bool keys_sorted(const DocumentTree& doc) {
    if (doc.is_primitive()) return true;
    if (doc.is_array()) {
        for (const auto& v : doc.elements()) {
            if (!keys_sorted(v)) return false;
        }
        return true;
    }
    bool first = true;
    KeyId prev = 0;
    for (const auto& [k, v] : doc.pairs()) {
        if (!first && k <= prev) return false;
        prev = k;
        first = false;
        if (!keys_sorted(v)) return false;
    }
    return true;
}

} // namespace

Teacher::Teacher(const Grammar& grammar, TeacherConfig config)
    : grammar_(grammar), config_(config) {}

bool Teacher::membership(const Word& word) {
    auto it = cache_.find(word);
    if (it != cache_.end()) return it->second;
    ++queries_;
    bool ok = false;
    if (auto doc = DocumentTree::parse_document(word)) {
        ok = keys_sorted(*doc) && classical_validate(grammar_, *doc).valid;
    }
    cache_.emplace(word, ok);
    return ok;
}

std::vector<Word> Teacher::valid_sample(std::size_t round) {
    std::vector<Word> out;
    if (config_.exhaustive) {
        for (std::size_t d = 1; d <= config_.max_depth; ++d) {
            for (auto& w : all_valid_documents(grammar_, d)) {
                out.push_back(std::move(w));
            }
        }
    } else {
        for (std::size_t d = 1; d <= config_.max_depth; ++d) {
            GeneratorConfig gc;
            gc.mode = GeneratorConfig::Mode::Random;
            gc.max_depth = d;
            gc.seed = config_.seed * 1000003 + round * 101 + d;
            try {
                auto gen = gen_valid(grammar_, gc);
                for (std::size_t i = 0; i < config_.docs_per_depth; ++i) {
                    auto w = gen->next();
                    if (!w) break;
                    out.push_back(gen_ordered(*w));
                }
            } catch (const NoValidDocumentError&) {
                continue;
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Word> Teacher::invalid_sample(std::size_t round) {
    std::vector<Word> out;
    auto push = [&](Word w) { out.push_back(gen_ordered(std::move(w))); };
    if (config_.exhaustive) {
        GeneratorConfig gc;
        gc.mode = GeneratorConfig::Mode::Exhaustive;
        gc.max_depth = config_.max_depth;
        try {
            auto gen = gen_invalid(grammar_, gc);
            std::size_t cap = 5000;
            while (auto w = gen->next()) {
                push(std::move(*w));
                if (--cap == 0) break;
            }
        } catch (const NoInvalidDocumentError&) {
        }
    } else {
        for (std::size_t d = 1; d <= config_.max_depth; ++d) {
            GeneratorConfig gc;
            gc.mode = GeneratorConfig::Mode::Random;
            gc.max_depth = d;
            gc.seed = config_.seed * 7000003 + round * 211 + d;
            try {
                auto gen = gen_invalid(grammar_, gc);
                for (std::size_t i = 0; i < config_.docs_per_depth; ++i) {
                    auto w = gen->next();
                    if (!w) break;
                    push(std::move(*w));
                }
            } catch (const NoValidDocumentError&) {
                continue;
            } catch (const NoInvalidDocumentError&) {
                continue;
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Observation table
// ---------------------------------------------------------------------------

namespace {

struct ObservationTable {
    Teacher& teacher;
    const PushdownAlphabet& alphabet;
    std::vector<Word> rows;                      // pairwise distinct signatures
    std::vector<std::pair<Word, Word>> columns;  // context pairs (u, v)
    std::size_t num_internals;

    explicit ObservationTable(Teacher& t)
        : teacher(t), alphabet(t.alphabet()), num_internals(t.alphabet().num_internals()) {
        rows.push_back({});
        columns.push_back({{}, {}});
        columns.push_back({{AbstractSymbol::lbrace()}, {AbstractSymbol::rbrace()}});
        columns.push_back({{AbstractSymbol::lbracket()}, {AbstractSymbol::rbracket()}});
    }

    std::vector<bool> signature(const Word& w) {
        std::vector<bool> sig;
        sig.reserve(columns.size());
        for (const auto& [u, v] : columns) {
            Word q;
            q.reserve(u.size() + w.size() + v.size());
            q.insert(q.end(), u.begin(), u.end());
            q.insert(q.end(), w.begin(), w.end());
            q.insert(q.end(), v.begin(), v.end());
            sig.push_back(teacher.membership(q));
        }
        return sig;
    }

    Word extend_internal(const Word& w, std::size_t internal_idx) const {
        Word out = w;
        out.push_back(alphabet.internal_at(internal_idx));
        return out;
    }

    Word sandwich(const Word& u, std::uint32_t call, const Word& w) const {
        Word out;
        AbstractSymbol open = call == 0 ? AbstractSymbol::lbrace() : AbstractSymbol::lbracket();
        out.reserve(u.size() + w.size() + 2);
        out.insert(out.end(), u.begin(), u.end());
        out.push_back(open);
        out.insert(out.end(), w.begin(), w.end());
        out.push_back(open.matching());
        return out;
    }

    /// Promotes extended rows with unseen signatures until every extension
    /// maps onto an existing row. Returns the signature table of the rows.
    std::vector<std::vector<bool>> close() {
        while (true) {
            std::map<std::vector<bool>, StateId> sig_ids;
            std::vector<std::vector<bool>> sigs;
            for (const auto& r : rows) {
                auto sig = signature(r);
                sig_ids.emplace(sig, static_cast<StateId>(sigs.size()));
                sigs.push_back(std::move(sig));
            }
            bool grew = false;
            auto consider = [&](Word&& candidate) {
                if (grew) return;
                auto sig = signature(candidate);
                if (!sig_ids.count(sig)) {
                    rows.push_back(std::move(candidate));
                    grew = true;
                }
            };
            std::size_t n = rows.size();
            for (std::size_t r = 0; r < n && !grew; ++r) {
                for (std::size_t x = 0; x < num_internals && !grew; ++x) {
                    consider(extend_internal(rows[r], x));
                }
            }
            for (std::size_t r = 0; r < n && !grew; ++r) {
                for (std::size_t u = 0; u < n && !grew; ++u) {
                    for (std::uint32_t call = 0; call < 2 && !grew; ++call) {
                        consider(sandwich(rows[u], call, rows[r]));
                    }
                }
            }
            if (!grew) {
                return sigs;
            }
        }
    }

    OneSevpa build_hypothesis() {
        auto sigs = close();
        std::map<std::vector<bool>, StateId> sig_ids;
        for (std::size_t i = 0; i < sigs.size(); ++i) {
            sig_ids.emplace(sigs[i], static_cast<StateId>(i));
        }
        OneSevpa hyp(2, num_internals);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            hyp.add_state(sigs[i][0]); // column (eps, eps) is first
        }
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t x = 0; x < num_internals; ++x) {
                hyp.set_internal(static_cast<StateId>(r), static_cast<std::uint32_t>(x),
                                 sig_ids.at(signature(extend_internal(rows[r], x))));
            }
            for (std::size_t u = 0; u < rows.size(); ++u) {
                for (std::uint32_t call = 0; call < 2; ++call) {
                    hyp.set_return(static_cast<StateId>(r), call, static_cast<StateId>(u), call,
                                   sig_ids.at(signature(sandwich(rows[u], call, rows[r]))));
                }
            }
        }
        return hyp;
    }

    /// All context-pair decompositions z = u w v with u in (WM.calls)*,
    /// w well matched and v the rest; added as new columns.
    bool add_counterexample_columns(const Word& z) {
        bool added = false;
        for (std::size_t i = 0; i <= z.size(); ++i) {
            Word u(z.begin(), z.begin() + static_cast<long>(i));
            if (!in_wm_call_star(u)) continue;
            for (std::size_t j = i; j <= z.size(); ++j) {
                Word w(z.begin() + static_cast<long>(i), z.begin() + static_cast<long>(j));
                if (!is_well_matched(w)) continue;
                Word v(z.begin() + static_cast<long>(j), z.end());
                std::pair<Word, Word> col{u, v};
                if (std::find(columns.begin(), columns.end(), col) == columns.end()) {
                    columns.push_back(std::move(col));
                    added = true;
                }
            }
        }
        return added;
    }

    static bool in_wm_call_star(const Word& u) {
        // (WM . call)*: kind-correct prefix whose pending part ends exactly
        // at each call, i.e. empty or ending with a call symbol.
        if (u.empty()) return true;
        if (!u.back().is_call()) return false;
        std::vector<AbstractSymbol> pending;
        for (const auto& s : u) {
            if (s.is_call()) {
                pending.push_back(s);
            } else if (s.is_return()) {
                if (pending.empty() || pending.back().matching() != s) return false;
                pending.pop_back();
            }
        }
        return true;
    }
};

// Shortest accepted word of a total 1-SEVPA through its reachability
// witnesses (configuration search would also do; witnesses are already at
// hand and exact).
std::optional<Word> some_accepted_word(const OneSevpa& hyp, const PushdownAlphabet& alphabet) {
    ReachRelation reach = reachability(hyp.to_vpa());
    std::optional<SymWord> best;
    for (StateId q : reach.targets_of(hyp.initial())) {
        if (!hyp.is_final(q)) continue;
        SymWord w = reach.witness_word(hyp.initial(), q);
        if (!best || w.size() < best->size()) {
            best = std::move(w);
        }
    }
    if (!best) return std::nullopt;
    return to_abstract_word(*best, alphabet);
}

} // namespace

std::optional<Word> equivalence(Teacher& teacher, const OneSevpa& hypothesis, std::size_t round,
                                int* which_check, const std::vector<Word>* reach_seed_words,
                                std::vector<Word>* reach_witnesses_out) {
    const PushdownAlphabet& alphabet = teacher.alphabet();
    std::vector<SymWord> seeds;
    if (reach_seed_words) {
        // replay is per-word quadratic in the state count; past a few
        // thousand words a fresh fixed point is cheaper
        std::size_t cap = std::min<std::size_t>(reach_seed_words->size(), 2000);
        for (std::size_t i = 0; i < cap; ++i) {
            seeds.push_back(to_sym_word((*reach_seed_words)[i], alphabet));
        }
    }
    auto report = [&](int check, Word w) {
        if (which_check) *which_check = check;
        return w;
    };

    // Check 1: internal loop on the initial state.
    for (std::size_t x = 0; x < alphabet.num_internals(); ++x) {
        auto to = hypothesis.internal_step(hypothesis.initial(), static_cast<std::uint32_t>(x));
        if (!to || *to != hypothesis.initial()) continue;
        auto accepted = some_accepted_word(hypothesis, alphabet);
        if (!accepted) break;
        Word z;
        z.push_back(alphabet.internal_at(x));
        z.insert(z.end(), accepted->begin(), accepted->end());
        if (hypothesis.accepts(to_sym_word(z, alphabet)) && !teacher.membership(z)) {
            return report(1, std::move(z));
        }
    }

    // Check 2: valid documents the hypothesis misses.
    for (const Word& w : teacher.valid_sample(round)) {
        if (!hypothesis.accepts(to_sym_word(w, alphabet))) {
            return report(2, w);
        }
    }

    // Check 3: invalid documents the hypothesis accepts.
    for (const Word& w : teacher.invalid_sample(round)) {
        if (hypothesis.accepts(to_sym_word(w, alphabet)) && !teacher.membership(w)) {
            return report(3, w);
        }
    }

    // Check 4: repeated key along a q0-rooted key graph path. The previous
    // round's witnesses seed the fixed point; stale ones drop out in replay.
    ReachRelation reach = reachability(hypothesis.to_vpa(), seeds);
    if (reach_witnesses_out) {
        reach_witnesses_out->clear();
        for (SymWord& w : reach.witness_words()) {
            reach_witnesses_out->push_back(to_abstract_word(w, alphabet));
        }
    }
    LiveSet live = live_set(hypothesis, reach);
    if (live.is_live(hypothesis.initial())) {
        auto removal = remove_bin_states(hypothesis, live);
        ReachRelation reach2 = reachability(removal.automaton.to_vpa());
        LiveSet live2 = live_set(removal.automaton, reach2);
        KeyGraph graph = build_key_graph(removal.automaton, reach2, alphabet, true);
        if (auto bad = find_repeated_key_path(graph)) {
            SymWord cex = counterexample_from_bad_path(graph, *bad, live2, alphabet);
            Word z = to_abstract_word(cex, alphabet);
            if (hypothesis.accepts(to_sym_word(z, alphabet)) && !teacher.membership(z)) {
                return report(4, std::move(z));
            }
        }
    }
    return std::nullopt;
}

LearnResult learn_one_sevpa(Teacher& teacher, const LearnerConfig& config) {
    ObservationTable table(teacher);
    LearnResult result;
    result.automaton = OneSevpa(2, teacher.alphabet().num_internals());

    std::size_t previous_states = 0;
    std::vector<Word> reach_witnesses;
    for (std::size_t round = 1; round <= config.max_rounds; ++round) {
        result.rounds = round;
        OneSevpa hyp = table.build_hypothesis();
        result.states_per_round.push_back(hyp.num_states());
        result.automaton = hyp;
        if (hyp.num_states() <= previous_states) {
            break; // no progress; return the best hypothesis as incomplete
        }
        previous_states = hyp.num_states();

        ++result.equivalence_queries;
        int check = 0;
        auto cex = equivalence(teacher, hyp, round, &check, &reach_witnesses, &reach_witnesses);
        result.membership_queries = teacher.membership_queries();
        if (!cex) {
            result.complete = true;
            break;
        }
        bool verified = teacher.membership(*cex) !=
                        hyp.accepts(to_sym_word(*cex, teacher.alphabet()));
        result.counterexamples.push_back({*cex, check, verified});
        if (!verified) {
            break; // a spurious counterexample would loop forever
        }
        if (!table.add_counterexample_columns(*cex)) {
            break; // nothing new to distinguish; flag incomplete
        }
        if (teacher.membership_queries() > config.max_membership_queries) {
            break;
        }
    }
    result.membership_queries = teacher.membership_queries();
    return result;
}

std::string LearnResult::report_json() const {
    nlohmann::json j;
    j["complete"] = complete;
    j["rounds"] = rounds;
    j["membership_queries"] = membership_queries;
    j["equivalence_queries"] = equivalence_queries;
    j["states_per_round"] = states_per_round;
    j["final_states"] = automaton.num_states();
    auto& cexs = j["counterexamples"] = nlohmann::json::array();
    for (const auto& c : counterexamples) {
        nlohmann::json jc;
        jc["check"] = c.check;
        jc["verified"] = c.verified;
        jc["length"] = c.word.size();
        cexs.push_back(std::move(jc));
    }
    return j.dump();
}

} // namespace jsonvpa
