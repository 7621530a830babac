#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jsonvpa/keygraph.hpp"
#include "jsonvpa/lexer.hpp"
#include "jsonvpa/one_sevpa.hpp"
#include "jsonvpa/symbols.hpp"

namespace jsonvpa {

enum class RejectReason {
    None,           // accepted
    LexicalError,   // the stream raised a lexing error
    UnknownKey,     // key outside the alphabet
    StructuralError, // bracket mismatch, truncation, misplaced symbol
    DuplicateKey,   // same key twice within one object
    SchemaViolation // well-formed JSON that the schema rejects
};

std::string reject_reason_name(RejectReason r);

struct ValidationResult {
    bool valid = false;
    RejectReason reason = RejectReason::None;
    /// 1-based index of the abstract symbol at which rejection fired;
    /// 0 when the document was accepted or the input was empty.
    std::size_t reject_index = 0;

    // instrumentation
    std::size_t symbols_consumed = 0;
    std::size_t max_stack_height = 0;
    std::size_t transitions_applied = 0;
    std::size_t valid_paths_calls = 0;
    std::size_t valid_paths_memo_hits = 0;
};

struct ValidatorOptions {
    /// Reject as soon as the tracked relation becomes empty instead of
    /// carrying the empty set to the enclosing close. Accept/reject
    /// behaviour is identical; only the rejection index moves earlier.
    bool fast_fail = false;
};

/// Single-pass validation of one abstract symbol stream against a bin-free
/// fixed-order automaton and its key graph. Memory grows with the nesting
/// depth only; one symbol of lookahead; rejection consumes nothing further.
ValidationResult validate_stream(const OneSevpa& sevpa, const KeyGraph& graph,
                                 const PushdownAlphabet& alphabet, SymbolStream& input,
                                 const ValidatorOptions& options = {});

/// Convenience entry for in-memory words.
ValidationResult validate_word(const OneSevpa& sevpa, const KeyGraph& graph,
                               const PushdownAlphabet& alphabet, const Word& word,
                               const ValidatorOptions& options = {});

} // namespace jsonvpa
