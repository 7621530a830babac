#pragma once

#include <istream>
#include <memory>
#include <optional>
#include <string>

#include "jsonvpa/symbols.hpp"

namespace jsonvpa {

class LexError : public std::runtime_error {
  public:
    explicit LexError(const std::string& what) : std::runtime_error(what) {}
};

class UnknownKeyError : public LexError {
  public:
    explicit UnknownKeyError(const std::string& key)
        : LexError("unknown key: " + key), key_(key) {}
    const std::string& key() const { return key_; }

  private:
    std::string key_;
};

/// Pull-based stream of abstract symbols with exactly one symbol of
/// lookahead. Single consumer; not shareable.
class SymbolStream {
  public:
    virtual ~SymbolStream() = default;

    /// The next symbol without consuming it, or nullopt at end of input.
    virtual std::optional<AbstractSymbol> peek() = 0;

    /// Consume and return the next symbol.
    virtual std::optional<AbstractSymbol> next() = 0;
};

/// Stream over a materialized word.
class WordStream final : public SymbolStream {
  public:
    explicit WordStream(Word word) : word_(std::move(word)) {}

    std::optional<AbstractSymbol> peek() override {
        if (pos_ >= word_.size()) return std::nullopt;
        return word_[pos_];
    }
    std::optional<AbstractSymbol> next() override {
        if (pos_ >= word_.size()) return std::nullopt;
        return word_[pos_++];
    }

  private:
    Word word_;
    std::size_t pos_ = 0;
};

/// Single-pass lexer turning concrete JSON text into abstract symbols.
///
/// String literals in value position become `s` (or `e` when the literal is
/// one of the alphabet's enum literals), numbers become `i` or `n`, a key
/// string and its colon fuse into one key symbol. The document is never
/// buffered; errors surface as LexError / UnknownKeyError on next()/peek().
class JsonLexer final : public SymbolStream {
  public:
    JsonLexer(std::istream& input, const PushdownAlphabet& alphabet);

    std::optional<AbstractSymbol> peek() override;
    std::optional<AbstractSymbol> next() override;

  private:
    std::optional<AbstractSymbol> lex_one();
    void skip_whitespace();
    int get();
    int peek_char();
    std::string lex_string_body();
    AbstractSymbol lex_number(char first);
    AbstractSymbol lex_literal_word();

    std::istream& input_;
    const PushdownAlphabet& alphabet_;
    std::optional<AbstractSymbol> lookahead_;
    bool done_ = false;
};

/// Convenience: lex a whole in-memory document.
Word abstract_lex(const std::string& json_text, const PushdownAlphabet& alphabet);

/// Render an abstract word back to concrete JSON text. `s` becomes "s",
/// `i` 1, `n` 1.5, `e` the first enum literal of the alphabet (or "e").
std::string render_json(const Word& word, const PushdownAlphabet& alphabet);

} // namespace jsonvpa
