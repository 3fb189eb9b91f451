// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "slicefix/lexer.hpp"

namespace slicefix {

/// Identifies a statement by its 0-based line in the normalized method text.
/// Line 0 holds the method header, so body statements start at 1.
struct StatementId {
    int value = 0;

    static constexpr StatementId entry() { return StatementId{-1}; }
    static constexpr StatementId exit() { return StatementId{-2}; }

    bool is_synthetic() const { return value < 0; }
    friend auto operator<=>(const StatementId&, const StatementId&) = default;
};

std::string to_string(StatementId id);

enum class StatementKind {
    Declaration,
    Assignment,
    Expression,
    If,
    Loop,
    Return,
    Throw,
    Jump,   // break / continue
    Block,  // brace and `else` lines; never a graph node
    Try,    // `try {`; never a graph node
    Catch,  // catch head; a graph node defining the exception variable
};

std::string_view to_string(StatementKind kind);

/// Whether statements of this kind become CFG/PDG nodes.
bool is_graph_node(StatementKind kind);

struct Invocation {
    std::string callee;
    int arity = 0;

    friend auto operator<=>(const Invocation&, const Invocation&) = default;
};

struct IngredientSet {
    std::set<std::string> vars_used;
    std::set<std::string> vars_defined;
    std::set<Invocation> invocations;

    friend bool operator==(const IngredientSet&, const IngredientSet&) = default;
};

struct Statement {
    StatementId id;
    std::string text;  // normalized: tokens joined by single spaces
    std::vector<Token> tokens;
    StatementKind kind = StatementKind::Expression;
    IngredientSet ingredients;

    int line() const { return id.value; }
    bool is_node() const { return is_graph_node(kind); }
};

/// Structured view of a method body. Each node refers to a statement by its
/// index in MethodAst::statements; closing-brace lines are not referenced.
struct FlowNode {
    enum class Shape { Simple, Branch, Loop, Guarded, Scope };

    struct Handler {
        std::size_t head = 0;  // the Catch statement
        std::vector<FlowNode> body;
    };

    Shape shape = Shape::Simple;
    std::size_t stmt = 0;  // simple stmt, predicate, loop header, `try {` or `{`
    std::vector<FlowNode> body;
    std::vector<FlowNode> orelse;
    bool has_else = false;
    std::vector<Handler> handlers;
    std::vector<FlowNode> finally_body;
    bool has_finally = false;
};

struct Parameter {
    std::string name;
    std::string type;

    friend bool operator==(const Parameter&, const Parameter&) = default;
};

struct MethodAst {
    std::string name;
    std::string return_type;  // empty for constructors
    std::vector<Parameter> params;
    std::vector<std::string> lines;  // normalized method text, one entry per line
    std::vector<Statement> statements;
    std::vector<FlowNode> body;

    const Statement* find(StatementId id) const;
    std::vector<const Statement*> nodes() const;

    /// Header, statement texts and closing brace joined by newlines.
    std::string reconstruct() const;
};

/// One public field of the enclosing class. A multi-declarator field line
/// yields one entry per name, each carrying the whole declaration.
struct FieldEntry {
    std::string name;
    std::string declaration;
    int first_token = 0;  // position in the class token stream, for ordering

    friend bool operator==(const FieldEntry&, const FieldEntry&) = default;
};

struct MethodSignature {
    std::string name;
    int arity = 0;
    bool varargs = false;
    std::string signature;
    int first_token = 0;

    bool accepts(int call_arity) const {
        return varargs ? call_arity >= arity - 1 : call_arity == arity;
    }
    friend bool operator==(const MethodSignature&, const MethodSignature&) = default;
};

struct ClassContext {
    std::vector<FieldEntry> public_fields;
    std::vector<MethodSignature> public_method_signatures;

    bool empty() const { return public_fields.empty() && public_method_signatures.empty(); }
};

/// Lays out a method one statement per line with tokens separated by single
/// spaces. Total on any input; unsupported constructs are left for the parser
/// to reject.
std::vector<std::string> normalize_method_lines(std::string_view source);
std::string normalize_method(std::string_view source);

MethodAst parse_method(std::string_view source);

ClassContext extract_class_context(std::optional<std::string_view> class_source,
                                   std::string_view exclude_method);

IngredientSet collect_ingredients(const Statement& stmt);

}  // namespace slicefix
