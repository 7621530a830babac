#include "jsonvpa/lexer.hpp"

#include <cctype>
#include <sstream>

namespace jsonvpa {

JsonLexer::JsonLexer(std::istream& input, const PushdownAlphabet& alphabet)
    : input_(input), alphabet_(alphabet) {}

std::optional<AbstractSymbol> JsonLexer::peek() {
    if (!lookahead_ && !done_) {
        lookahead_ = lex_one();
        if (!lookahead_) {
            done_ = true;
        }
    }
    return lookahead_;
}

std::optional<AbstractSymbol> JsonLexer::next() {
    auto s = peek();
    lookahead_.reset();
    return s;
}

int JsonLexer::get() { return input_.get(); }

int JsonLexer::peek_char() { return input_.peek(); }

void JsonLexer::skip_whitespace() {
    while (true) {
        int c = peek_char();
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            get();
        } else {
            break;
        }
    }
}

std::string JsonLexer::lex_string_body() {
    // Opening quote already consumed. Standard JSON unescaping.
    std::string out;
    while (true) {
        int c = get();
        if (c == EOF) {
            throw LexError("unterminated string");
        }
        if (c == '"') {
            return out;
        }
        if (c != '\\') {
            out.push_back(static_cast<char>(c));
            continue;
        }
        int esc = get();
        switch (esc) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case '/': out.push_back('/'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case 't': out.push_back('\t'); break;
        case 'u': {
            unsigned code = 0;
            for (int i = 0; i < 4; ++i) {
                int h = get();
                if (h == EOF || !std::isxdigit(h)) {
                    throw LexError("bad \\u escape");
                }
                code = code * 16 +
                       static_cast<unsigned>(std::isdigit(h) ? h - '0' : std::tolower(h) - 'a' + 10);
            }
            // Encode as UTF-8; surrogate pairs are passed through untouched
            // since key comparison only needs a consistent byte form.
            if (code < 0x80) {
                out.push_back(static_cast<char>(code));
            } else if (code < 0x800) {
                out.push_back(static_cast<char>(0xC0 | (code >> 6)));
                out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
            } else {
                out.push_back(static_cast<char>(0xE0 | (code >> 12)));
                out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
            }
            break;
        }
        case EOF: throw LexError("unterminated escape");
        default: throw LexError("invalid escape character");
        }
    }
}

AbstractSymbol JsonLexer::lex_number(char first) {
    std::string text(1, first);
    bool integral = true;
    if (first == '-') {
        int c = get();
        if (c == EOF || !std::isdigit(c)) {
            throw LexError("minus without digits");
        }
        text.push_back(static_cast<char>(c));
    }
    while (std::isdigit(peek_char())) {
        text.push_back(static_cast<char>(get()));
    }
    if (peek_char() == '.') {
        integral = false;
        text.push_back(static_cast<char>(get()));
        if (!std::isdigit(peek_char())) {
            throw LexError("digits expected after decimal point");
        }
        while (std::isdigit(peek_char())) {
            text.push_back(static_cast<char>(get()));
        }
    }
    if (peek_char() == 'e' || peek_char() == 'E') {
        integral = false;
        text.push_back(static_cast<char>(get()));
        if (peek_char() == '+' || peek_char() == '-') {
            text.push_back(static_cast<char>(get()));
        }
        if (!std::isdigit(peek_char())) {
            throw LexError("digits expected in exponent");
        }
        while (std::isdigit(peek_char())) {
            text.push_back(static_cast<char>(get()));
        }
    }
    if (alphabet_.is_enum_literal(text)) {
        return AbstractSymbol::prim(Prim::Enum);
    }
    return AbstractSymbol::prim(integral ? Prim::Int : Prim::Num);
}

AbstractSymbol JsonLexer::lex_literal_word() {
    std::string text;
    while (std::isalpha(peek_char())) {
        text.push_back(static_cast<char>(get()));
    }
    if (alphabet_.is_enum_literal(text)) {
        return AbstractSymbol::prim(Prim::Enum);
    }
    if (text == "true") return AbstractSymbol::prim(Prim::True);
    if (text == "false") return AbstractSymbol::prim(Prim::False);
    if (text == "null") return AbstractSymbol::prim(Prim::Null);
    throw LexError("invalid literal: " + text);
}

std::optional<AbstractSymbol> JsonLexer::lex_one() {
    skip_whitespace();
    int c = get();
    if (c == EOF) {
        return std::nullopt;
    }
    switch (c) {
    case '{': return AbstractSymbol::lbrace();
    case '[': return AbstractSymbol::lbracket();
    case '}': return AbstractSymbol::rbrace();
    case ']': return AbstractSymbol::rbracket();
    case ',': return AbstractSymbol::comma();
    case ':': throw LexError("unexpected ':'");
    case '"': {
        std::string body = lex_string_body();
        skip_whitespace();
        if (peek_char() == ':') {
            get();
            auto id = alphabet_.key_id(body);
            if (!id) {
                throw UnknownKeyError(body);
            }
            return AbstractSymbol::key(*id);
        }
        std::string quoted = "\"" + body + "\"";
        if (alphabet_.is_enum_literal(quoted)) {
            return AbstractSymbol::prim(Prim::Enum);
        }
        return AbstractSymbol::prim(Prim::Str);
    }
    default:
        if (c == '-' || std::isdigit(c)) {
            return lex_number(static_cast<char>(c));
        }
        if (std::isalpha(c)) {
            input_.putback(static_cast<char>(c));
            return lex_literal_word();
        }
        throw LexError(std::string("unexpected character: ") + static_cast<char>(c));
    }
}

Word abstract_lex(const std::string& json_text, const PushdownAlphabet& alphabet) {
    std::istringstream in(json_text);
    JsonLexer lexer(in, alphabet);
    Word word;
    while (auto s = lexer.next()) {
        word.push_back(*s);
    }
    return word;
}

std::string render_json(const Word& word, const PushdownAlphabet& alphabet) {
    std::string out;
    std::string enum_text = alphabet.enum_literals().empty()
                                ? std::string{"\"e\""}
                                : alphabet.enum_literals().front();
    for (const auto& s : word) {
        switch (s.tag()) {
        case AbstractSymbol::Tag::LBrace: out += '{'; break;
        case AbstractSymbol::Tag::LBracket: out += '['; break;
        case AbstractSymbol::Tag::RBrace: out += '}'; break;
        case AbstractSymbol::Tag::RBracket: out += ']'; break;
        case AbstractSymbol::Tag::Comma: out += ','; break;
        case AbstractSymbol::Tag::Key:
            out += '"';
            out += alphabet.key_name(s.key_id());
            out += "\":";
            break;
        case AbstractSymbol::Tag::Primitive:
            switch (s.prim_value()) {
            case Prim::True: out += "true"; break;
            case Prim::False: out += "false"; break;
            case Prim::Null: out += "null"; break;
            case Prim::Str: out += "\"s\""; break;
            case Prim::Num: out += "1.5"; break;
            case Prim::Int: out += "1"; break;
            case Prim::Enum: out += enum_text; break;
            }
            break;
        }
    }
    return out;
}

} // namespace jsonvpa
