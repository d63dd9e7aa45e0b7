// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "augmine/common.hpp"

namespace augmine::java {

struct SyntaxError : Error {
    SyntaxError(const std::string& msg, int line, int col)
        : Error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
          line(line), col(col) {}
    int line;
    int col;
};

enum class TokenKind {
    Identifier,
    Keyword,
    IntLiteral,
    FloatLiteral,
    CharLiteral,
    StringLiteral,
    Punct,
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    int line = 0;
    int col = 0;

    bool is(TokenKind k, const char* t) const { return kind == k && text == t; }
    bool is_punct(const char* t) const { return is(TokenKind::Punct, t); }
    bool is_keyword(const char* t) const { return is(TokenKind::Keyword, t); }
    bool is_word() const { return kind == TokenKind::Identifier || kind == TokenKind::Keyword; }
};

bool is_reserved_word(const std::string& s);

// Tokenizes Java source. Comments and whitespace are skipped; CRLF and a
// leading BOM are tolerated. Throws SyntaxError on unterminated comments,
// string or char literals.
std::vector<Token> lex(const std::string& source);

} // namespace augmine::java
