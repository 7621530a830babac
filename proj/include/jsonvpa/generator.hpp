#pragma once

#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "jsonvpa/grammar.hpp"

namespace jsonvpa {

class NoValidDocumentError : public std::runtime_error {
  public:
    NoValidDocumentError() : std::runtime_error("schema admits no valid document at this depth") {}
};

class NoInvalidDocumentError : public std::runtime_error {
  public:
    NoInvalidDocumentError()
        : std::runtime_error("could not derive an invalid document for this schema") {}
};

struct GeneratorConfig {
    enum class Mode { Random, Exhaustive };
    /// Maximal number of nested objects/arrays; documents themselves are
    /// objects, so useful values start at 1.
    std::size_t max_depth = 3;
    Mode mode = Mode::Random;
    std::uint64_t seed = 0;
};

enum class Deviation {
    WrongPrimitive,
    DropRequiredKey,
    AddForeignKey,
    WrongElementCount,
    SwapObjectArray,
    DuplicateKey,
};

inline constexpr std::size_t kNumDeviations = 6;

/// Pull-based document stream. Exhaustive generators end; random ones are
/// infinite. Single consumer.
class DocumentGenerator {
  public:
    virtual ~DocumentGenerator() = default;
    virtual std::optional<Word> next() = 0;
};

/// Valid documents of the grammar. Disjunction choices are random or
/// exhaustively enumerated; conjunctions and negations propagate into the
/// structural options, with every emitted document re-checked against the
/// evaluator. Throws NoValidDocumentError when the schema is unsatisfiable
/// within the depth budget (random mode: after the retry budget).
std::unique_ptr<DocumentGenerator> gen_valid(const Grammar& grammar,
                                             const GeneratorConfig& config);

/// Invalid documents: a valid walk with one injected deviation, filtered so
/// every emitted word really is rejected by the evaluator.
std::unique_ptr<DocumentGenerator> gen_invalid(const Grammar& grammar,
                                               const GeneratorConfig& config);

/// Every object's pairs sorted by the alphabet order, recursively.
DocumentTree sort_pairs(const DocumentTree& doc);
/// Word-level convenience; words that do not parse as documents (for
/// instance duplicate-key words) pass through unchanged.
Word gen_ordered(const Word& word);

/// Random permutation of every object's pairs; inverse fixture of
/// gen_ordered.
Word permute_objects(const Word& word, std::uint64_t seed);

/// All valid documents at nesting depth <= max_depth, in a stable order.
std::vector<Word> all_valid_documents(const Grammar& grammar, std::size_t max_depth);

/// Brute-force enumeration of every abstract document over the alphabet at
/// nesting depth <= max_depth with arrays capped at max_array_len elements —
/// the independent oracle for exhaustive-generator completeness.
std::vector<DocumentTree> enumerate_all_documents(const PushdownAlphabet& alphabet,
                                                  std::size_t max_depth,
                                                  std::size_t max_array_len = 3);

} // namespace jsonvpa
