// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

// Internal: token-level parsing shared by the method and class parsers.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slicefix/java_frontend.hpp"
#include "slicefix/lexer.hpp"

namespace slicefix::detail {

struct Expr {
    enum class Kind {
        Name,
        Literal,
        This,
        Field,
        Call,
        New,
        NewArray,
        ArrayInit,
        Index,
        Prefix,
        Postfix,
        Binary,
        Assign,
        Conditional,
        Cast,
        InstanceOf,
        ClassLiteral,
    };

    Kind kind = Kind::Literal;
    std::string text;         // identifier, operator, callee or simple type name
    bool has_target = false;  // Call: kids[0] is the receiver
    std::vector<Expr> kids;

    std::size_t arg_count() const { return kids.size() - (has_target ? 1 : 0); }
};

bool is_primitive_type(std::string_view word);
bool is_modifier(std::string_view word);

/// Cursor over one line's tokens with the recursive-descent pieces the
/// statement parser needs. Every failure throws ParseFailure tagged with the
/// line the cursor was built for.
class SyntaxParser {
public:
    SyntaxParser(std::vector<Token> tokens, int line);

    bool at_end() const { return pos_ >= toks_.size(); }
    std::size_t pos() const { return pos_; }
    std::size_t size() const { return toks_.size(); }
    const Token& peek(std::size_t ahead = 0) const;
    bool next_is(std::string_view text, std::size_t ahead = 0) const;
    bool accept(std::string_view text);
    void expect(std::string_view text);
    std::string expect_identifier();
    void expect_end();
    [[noreturn]] void fail(const std::string& message) const;

    Expr parse_expression();
    Expr parse_array_initializer();

    /// Parses a type and returns its tokens; restores the cursor and returns
    /// nullopt when the upcoming tokens are not a type.
    std::optional<std::vector<std::string>> try_parse_type();
    std::vector<std::string> parse_type();

    /// Skips `@Name`, `@Name(...)` and modifier keywords.
    void skip_modifiers();

    /// Attempts `Type name`; on success leaves the cursor after the name.
    std::optional<std::pair<std::vector<std::string>, std::string>> try_parse_typed_name();

private:
    bool parse_type_into(std::vector<std::string>& out, bool allow_dims);
    bool parse_type_arguments(std::vector<std::string>& out);
    bool close_angle(std::vector<std::string>& out);
    bool looks_like_cast();

    Expr parse_assignment();
    Expr parse_conditional();
    Expr parse_binary(int min_prec);
    Expr parse_unary();
    Expr parse_primary();
    Expr parse_postfix(Expr base);
    Expr parse_creator();
    std::vector<Expr> parse_arguments();

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int line_;
};

/// Adds the defs/uses/invocations of an expression evaluated for its value.
void add_ingredients(const Expr& e, IngredientSet& out);

/// Adds the ingredients of an expression used as an assignment target.
void add_target_ingredients(const Expr& target, bool compound, IngredientSet& out);

/// Lays out a method one statement per line (see normalize_method_lines).
std::vector<std::vector<Token>> layout_method(std::string_view source);

}  // namespace slicefix::detail
