// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include "slicefix/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace slicefix {

namespace {

// Longest first; the scanner takes the first prefix match.
constexpr std::array<std::string_view, 50> kOperators = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&",
    "||",   "==",  "!=",  "<=",  ">=",  "+=", "-=", "*=", "/=", "%=",
    "&=",   "|=",  "^=",  "<<",  ">>",  "(",  ")",  "{",  "}",  "[",
    "]",    ";",   ",",   ".",   "@",   "=",  ">",  "<",  "!",  "~",
    "?",    ":",   "+",   "-",   "*",   "/",  "&",  "|",  "^",  "%",
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool ident_part(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

}  // namespace

bool is_java_keyword(std::string_view word) {
    static const std::unordered_set<std::string_view> kKeywords = {
        "abstract", "assert",     "boolean",   "break",     "byte",     "case",
        "catch",    "char",       "class",     "const",     "continue", "default",
        "do",       "double",     "else",      "enum",      "extends",  "final",
        "finally",  "float",      "for",       "goto",      "if",       "implements",
        "import",   "instanceof", "int",       "interface", "long",     "native",
        "new",      "package",    "private",   "protected", "public",   "return",
        "short",    "static",     "strictfp",  "super",     "switch",   "synchronized",
        "this",     "throw",      "throws",    "transient", "try",      "void",
        "volatile", "while",
    };
    return kKeywords.contains(word);
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 0;
    std::size_t i = 0;
    const std::size_t n = src.size();

    auto push = [&](TokenKind kind, std::size_t begin, std::size_t end) {
        out.push_back(Token{kind, std::string(src.substr(begin, end - begin)), line});
    };

    while (i < n) {
        const char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            while (i < n && src[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            i += 2;
            while (i < n && !(src[i] == '*' && i + 1 < n && src[i + 1] == '/')) {
                if (src[i] == '\n') ++line;
                ++i;
            }
            i = std::min(n, i + 2);
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i + 1;
            while (j < n && ident_part(src[j])) ++j;
            std::string_view word = src.substr(i, j - i);
            TokenKind kind = TokenKind::Identifier;
            if (word == "true" || word == "false" || word == "null") {
                kind = TokenKind::Literal;
            } else if (is_java_keyword(word)) {
                kind = TokenKind::Keyword;
            }
            push(kind, i, j);
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            bool hex = c == '0' && i + 1 < n && (src[i + 1] == 'x' || src[i + 1] == 'X');
            if (hex) j += 2;
            while (j < n) {
                char d = src[j];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
                    // exponent sign: 1e-5, 1.5E+3
                    if (!hex && (d == 'e' || d == 'E') && j + 1 < n &&
                        (src[j + 1] == '+' || src[j + 1] == '-')) {
                        j += 2;
                        continue;
                    }
                    ++j;
                    continue;
                }
                break;
            }
            push(TokenKind::Literal, i, j);
            i = j;
            continue;
        }
        if (c == '"' || c == '\'') {
            std::size_t j = i + 1;
            while (j < n && src[j] != c && src[j] != '\n') {
                if (src[j] == '\\' && j + 1 < n && src[j + 1] != '\n') ++j;
                ++j;
            }
            if (j < n && src[j] == c) ++j;
            push(TokenKind::Literal, i, j);
            i = j;
            continue;
        }
        bool matched = false;
        for (std::string_view op : kOperators) {
            if (src.substr(i, op.size()) == op) {
                push(TokenKind::Operator, i, i + op.size());
                i += op.size();
                matched = true;
                break;
            }
        }
        if (!matched) {
            push(TokenKind::Unknown, i, i + 1);
            ++i;
        }
    }
    return out;
}

std::vector<std::string> lex_texts(std::string_view source) {
    std::vector<std::string> out;
    for (auto& t : lex(source)) out.push_back(std::move(t.text));
    return out;
}

std::string join_tokens(const std::vector<Token>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t.text;
    }
    return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

}  // namespace slicefix
