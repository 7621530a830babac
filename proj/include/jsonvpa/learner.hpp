#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jsonvpa/generator.hpp"
#include "jsonvpa/grammar.hpp"
#include "jsonvpa/one_sevpa.hpp"

namespace jsonvpa {

struct TeacherConfig {
    /// Random documents per depth per equivalence query (C).
    std::size_t docs_per_depth = 100;
    /// Maximal generated document depth (D).
    std::size_t max_depth = 3;
    bool exhaustive = false;
    std::uint64_t seed = 1;
};

/// Answers membership (is this word a key-sorted valid document?) through
/// the classical validator, and feeds the equivalence sweeps. Queries are
/// cached; the counter counts distinct queries.
class Teacher {
  public:
    Teacher(const Grammar& grammar, TeacherConfig config);

    bool membership(const Word& word);
    std::size_t membership_queries() const { return queries_; }

    const Grammar& grammar() const { return grammar_; }
    const PushdownAlphabet& alphabet() const { return grammar_.alphabet(); }
    const TeacherConfig& config() const { return config_; }

    /// Key-sorted valid (resp. invalid) documents for one equivalence
    /// sweep; `round` varies the random seed.
    std::vector<Word> valid_sample(std::size_t round);
    std::vector<Word> invalid_sample(std::size_t round);

  private:
    const Grammar& grammar_;
    TeacherConfig config_;
    std::map<Word, bool> cache_;
    std::size_t queries_ = 0;
};

struct CounterexampleLog {
    Word word;
    int check;     // equivalence check 1..4 that produced it
    bool verified; // membership disagreed with the hypothesis when logged
};

struct LearnerConfig {
    std::size_t max_rounds = 50;
    std::size_t max_membership_queries = 1000000;
};

struct LearnResult {
    OneSevpa automaton{2, 0}; // total transition function, bin state included
    bool complete = false;
    std::size_t rounds = 0;
    std::size_t membership_queries = 0;
    std::size_t equivalence_queries = 0;
    std::vector<std::size_t> states_per_round;
    std::vector<CounterexampleLog> counterexamples;

    std::string report_json() const;
};

/// One equivalence query: the four ordered checks (initial-state internal
/// loop, missed valid documents, accepted invalid documents, repeated-key
/// path in the hypothesis key graph). Returns a verified counterexample or
/// nullopt; `which_check` reports the firing check.
std::optional<Word> equivalence(Teacher& teacher, const OneSevpa& hypothesis, std::size_t round,
                                int* which_check = nullptr,
                                const std::vector<Word>* reach_seed_words = nullptr,
                                std::vector<Word>* reach_witnesses_out = nullptr);

/// Observation-table learner over context pairs. Rows are well-matched
/// access words, columns context pairs (u, v); the hypothesis reads its
/// internal steps from one-letter extensions and its return steps from
/// u a w ~a sandwiches. Counterexamples contribute all their context-pair
/// decompositions as new columns.
LearnResult learn_one_sevpa(Teacher& teacher, const LearnerConfig& config = {});

} // namespace jsonvpa
