// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace slicefix {

enum class TokenKind {
    Identifier,
    Keyword,
    Literal,  // numbers, strings, chars, true/false/null
    Operator,
    Unknown,
};

struct Token {
    TokenKind kind = TokenKind::Unknown;
    std::string text;
    int line = 0;  // 0-based physical line in the lexed text

    bool is(std::string_view t) const { return text == t; }
    bool is_identifier() const { return kind == TokenKind::Identifier; }
};

/// Splits Java-like source into tokens. Comments and whitespace are dropped.
/// The lexer is total: characters it does not recognise become single-char
/// Unknown tokens, and an unterminated string runs to the end of its line.
std::vector<Token> lex(std::string_view source);

/// Token texts only.
std::vector<std::string> lex_texts(std::string_view source);

/// Joins token texts with single spaces.
std::string join_tokens(const std::vector<Token>& tokens);
std::string join_tokens(const std::vector<std::string>& tokens);

bool is_java_keyword(std::string_view word);

}  // namespace slicefix
