// SPDX-License-Identifier: Apache-2.0
#include "augmine/java/lexer.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace augmine::java {

namespace {

const std::unordered_set<std::string>& reserved_words() {
    static const std::unordered_set<std::string> words = {
        "abstract", "assert", "boolean", "break", "byte", "case", "catch",
        "char", "class", "const", "continue", "default", "do", "double",
        "else", "enum", "extends", "final", "finally", "float", "for",
        "goto", "if", "implements", "import", "instanceof", "int",
        "interface", "long", "native", "new", "package", "private",
        "protected", "public", "return", "short", "static", "strictfp",
        "super", "switch", "synchronized", "this", "throw", "throws",
        "transient", "try", "void", "volatile", "while",
        // reserved literals and the reserved identifier
        "true", "false", "null", "_",
    };
    return words;
}

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool ident_part(char c) {
    return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

// Two-character operators merged into one token. '<' '>' stay single so
// generic argument lists can be skipped by bracket counting.
const std::array<const char*, 18> two_char_ops = {
    "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "->", "::",
};

} // namespace

bool is_reserved_word(const std::string& s) {
    return reserved_words().count(s) > 0;
}

std::vector<Token> lex(const std::string& source) {
    std::vector<Token> out;
    size_t i = 0;
    const size_t n = source.size();
    int line = 1;
    int col = 1;

    if (n >= 3 && static_cast<unsigned char>(source[0]) == 0xEF &&
        static_cast<unsigned char>(source[1]) == 0xBB &&
        static_cast<unsigned char>(source[2]) == 0xBF) {
        i = 3;
    }

    auto advance = [&](size_t count) {
        for (size_t k = 0; k < count && i < n; ++k, ++i) {
            if (source[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };

    while (i < n) {
        char c = source[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < n && source[i + 1] == '/') {
            while (i < n && source[i] != '\n') advance(1);
            continue;
        }
        if (c == '/' && i + 1 < n && source[i + 1] == '*') {
            int start_line = line, start_col = col;
            advance(2);
            bool closed = false;
            while (i < n) {
                if (source[i] == '*' && i + 1 < n && source[i + 1] == '/') {
                    advance(2);
                    closed = true;
                    break;
                }
                advance(1);
            }
            if (!closed) throw SyntaxError("unterminated block comment", start_line, start_col);
            continue;
        }

        Token tok;
        tok.line = line;
        tok.col = col;

        if (ident_start(c)) {
            size_t j = i;
            while (j < n && ident_part(source[j])) ++j;
            tok.text = source.substr(i, j - i);
            tok.kind = is_reserved_word(tok.text) ? TokenKind::Keyword : TokenKind::Identifier;
            advance(j - i);
            out.push_back(std::move(tok));
            continue;
        }

        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(source[i + 1])))) {
            size_t j = i;
            bool is_float = (c == '.');
            if (source[j] == '0' && j + 1 < n && (source[j + 1] == 'x' || source[j + 1] == 'X')) {
                j += 2;
                while (j < n && (std::isxdigit(static_cast<unsigned char>(source[j])) || source[j] == '_')) ++j;
            } else if (source[j] == '0' && j + 1 < n && (source[j + 1] == 'b' || source[j + 1] == 'B')) {
                j += 2;
                while (j < n && (source[j] == '0' || source[j] == '1' || source[j] == '_')) ++j;
            } else {
                while (j < n && (std::isdigit(static_cast<unsigned char>(source[j])) || source[j] == '_')) ++j;
                if (j < n && source[j] == '.' && (j + 1 >= n || source[j + 1] != '.')) {
                    is_float = true;
                    ++j;
                    while (j < n && (std::isdigit(static_cast<unsigned char>(source[j])) || source[j] == '_')) ++j;
                }
                if (j < n && (source[j] == 'e' || source[j] == 'E')) {
                    size_t k = j + 1;
                    if (k < n && (source[k] == '+' || source[k] == '-')) ++k;
                    if (k < n && std::isdigit(static_cast<unsigned char>(source[k]))) {
                        is_float = true;
                        j = k;
                        while (j < n && std::isdigit(static_cast<unsigned char>(source[j]))) ++j;
                    }
                }
            }
            if (j < n && (source[j] == 'f' || source[j] == 'F' || source[j] == 'd' || source[j] == 'D')) {
                is_float = true;
                ++j;
            } else if (j < n && (source[j] == 'l' || source[j] == 'L')) {
                ++j;
            }
            tok.text = source.substr(i, j - i);
            tok.kind = is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral;
            advance(j - i);
            out.push_back(std::move(tok));
            continue;
        }

        if (c == '"') {
            int start_line = line, start_col = col;
            size_t j = i + 1;
            std::string value;
            bool closed = false;
            while (j < n) {
                char d = source[j];
                if (d == '\\' && j + 1 < n) {
                    value.push_back(d);
                    value.push_back(source[j + 1]);
                    j += 2;
                    continue;
                }
                if (d == '"') {
                    closed = true;
                    ++j;
                    break;
                }
                if (d == '\n') break;
                value.push_back(d);
                ++j;
            }
            if (!closed) throw SyntaxError("unterminated string literal", start_line, start_col);
            tok.kind = TokenKind::StringLiteral;
            tok.text = value;
            advance(j - i);
            out.push_back(std::move(tok));
            continue;
        }

        if (c == '\'') {
            int start_line = line, start_col = col;
            size_t j = i + 1;
            std::string value;
            bool closed = false;
            while (j < n) {
                char d = source[j];
                if (d == '\\' && j + 1 < n) {
                    value.push_back(d);
                    value.push_back(source[j + 1]);
                    j += 2;
                    continue;
                }
                if (d == '\'') {
                    closed = true;
                    ++j;
                    break;
                }
                if (d == '\n') break;
                value.push_back(d);
                ++j;
            }
            if (!closed) throw SyntaxError("unterminated char literal", start_line, start_col);
            tok.kind = TokenKind::CharLiteral;
            tok.text = value;
            advance(j - i);
            out.push_back(std::move(tok));
            continue;
        }

        bool merged = false;
        if (i + 1 < n) {
            char pair[3] = {c, source[i + 1], '\0'};
            for (const char* op : two_char_ops) {
                if (pair[0] == op[0] && pair[1] == op[1]) {
                    tok.kind = TokenKind::Punct;
                    tok.text = op;
                    advance(2);
                    out.push_back(std::move(tok));
                    merged = true;
                    break;
                }
            }
        }
        if (merged) continue;

        tok.kind = TokenKind::Punct;
        tok.text = std::string(1, c);
        advance(1);
        out.push_back(std::move(tok));
    }

    Token eof;
    eof.kind = TokenKind::End;
    eof.line = line;
    eof.col = col;
    out.push_back(eof);
    return out;
}

} // namespace augmine::java
