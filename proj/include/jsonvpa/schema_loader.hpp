#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jsonvpa/grammar.hpp"

namespace jsonvpa {

class MalformedSchemaError : public std::runtime_error {
  public:
    explicit MalformedSchemaError(const std::string& what) : std::runtime_error(what) {}
};

class UnsupportedKeywordError : public std::runtime_error {
  public:
    explicit UnsupportedKeywordError(const std::vector<std::string>& keywords);
    const std::vector<std::string>& keywords() const { return keywords_; }

  private:
    std::vector<std::string> keywords_;
};

/// Loads a JSON Schema (the abstracted keyword subset) into a Grammar.
///
/// Supported: type string/number/integer/boolean/null/object/array, enum,
/// properties + required, patternProperties (the pattern text is the key),
/// items (with optional minItems == maxItems for a fixed count),
/// allOf/anyOf/not, $ref to "#", "#/definitions/..." or "#/$defs/...".
/// Optional keys expand into one object production per admissible key
/// subset. `key_order`, when given, fixes the alphabet order; otherwise
/// keys are ordered lexicographically.
Grammar load_json_schema(const std::string& schema_text,
                         const std::optional<std::vector<std::string>>& key_order = std::nullopt);

} // namespace jsonvpa
