// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include <algorithm>

#include "slicefix/errors.hpp"
#include "slicefix/java_frontend.hpp"
#include "syntax.hpp"

namespace slicefix {

using detail::Expr;
using detail::SyntaxParser;

std::string to_string(StatementId id) {
    if (id == StatementId::entry()) return "ENTRY";
    if (id == StatementId::exit()) return "EXIT";
    return "S" + std::to_string(id.value);
}

std::string_view to_string(StatementKind kind) {
    switch (kind) {
        case StatementKind::Declaration: return "declaration";
        case StatementKind::Assignment: return "assignment";
        case StatementKind::Expression: return "expression";
        case StatementKind::If: return "if";
        case StatementKind::Loop: return "loop";
        case StatementKind::Return: return "return";
        case StatementKind::Throw: return "throw";
        case StatementKind::Jump: return "jump";
        case StatementKind::Block: return "block";
        case StatementKind::Try: return "try";
        case StatementKind::Catch: return "catch";
    }
    return "unknown";
}

bool is_graph_node(StatementKind kind) {
    return kind != StatementKind::Block && kind != StatementKind::Try;
}

const Statement* MethodAst::find(StatementId id) const {
    auto it = std::lower_bound(statements.begin(), statements.end(), id,
                               [](const Statement& s, StatementId v) { return s.id < v; });
    return it != statements.end() && it->id == id ? &*it : nullptr;
}

std::vector<const Statement*> MethodAst::nodes() const {
    std::vector<const Statement*> out;
    for (const auto& s : statements) {
        if (s.is_node()) out.push_back(&s);
    }
    return out;
}

std::string MethodAst::reconstruct() const {
    std::string out = lines.empty() ? std::string() : lines.front();
    for (const auto& s : statements) out += "\n" + s.text;
    if (lines.size() > 1) out += "\n" + lines.back();
    return out;
}

std::vector<std::string> normalize_method_lines(std::string_view source) {
    std::vector<std::string> out;
    for (const auto& line : detail::layout_method(source)) out.push_back(join_tokens(line));
    return out;
}

std::string normalize_method(std::string_view source) {
    std::string out;
    for (const auto& line : normalize_method_lines(source)) {
        if (!out.empty()) out += '\n';
        out += line;
    }
    return out;
}

namespace {

// Parses the part of a statement line that follows any leading `}` / `else`.
// Returns the kind and fills the ingredients; the parser must consume the
// whole line.
struct LineInfo {
    StatementKind kind;
    IngredientSet ingredients;
    bool opens_block = false;  // line ends with `{`
};

void parse_declarators(SyntaxParser& p, IngredientSet& ing) {
    while (true) {
        std::string name = p.expect_identifier();
        while (p.accept("[")) p.expect("]");
        ing.vars_defined.insert(name);
        if (p.accept("=")) {
            Expr init = p.next_is("{") ? p.parse_array_initializer() : p.parse_expression();
            detail::add_ingredients(init, ing);
        }
        if (!p.accept(",")) return;
    }
}

// Local declaration without the trailing `;`. Returns false (cursor untouched)
// when the tokens are not a declaration.
bool try_parse_declaration(SyntaxParser& p, IngredientSet& ing) {
    bool had_modifier = false;
    while (p.next_is("final") || p.next_is("@")) {
        if (p.next_is("@")) {
            p.skip_modifiers();
        } else {
            p.accept("final");
        }
        had_modifier = true;
    }
    auto typed = p.try_parse_typed_name();
    if (!typed) {
        if (had_modifier) p.fail("expected declaration after modifier");
        return false;
    }
    const bool decl_follows = p.at_end() || p.next_is("=") || p.next_is(";") ||
                              p.next_is(",") || p.next_is("[") || p.next_is(":");
    if (!decl_follows) p.fail("unexpected '" + p.peek().text + "' after declaration");
    ing.vars_defined.insert(typed->second);
    while (p.accept("[")) p.expect("]");
    if (p.accept("=")) {
        Expr init = p.next_is("{") ? p.parse_array_initializer() : p.parse_expression();
        detail::add_ingredients(init, ing);
    }
    if (p.accept(",")) parse_declarators(p, ing);
    return true;
}

StatementKind expression_statement_kind(const Expr& e, const SyntaxParser& p) {
    switch (e.kind) {
        case Expr::Kind::Assign:
            return StatementKind::Assignment;
        case Expr::Kind::Prefix:
        case Expr::Kind::Postfix:
            if (e.text == "++" || e.text == "--") return StatementKind::Assignment;
            break;
        case Expr::Kind::Call:
        case Expr::Kind::New:
            return StatementKind::Expression;
        default:
            break;
    }
    p.fail("not a statement");
}

void parse_expression_list(SyntaxParser& p, IngredientSet& ing, std::string_view terminator) {
    if (p.next_is(terminator)) return;
    while (true) {
        Expr e = p.parse_expression();
        expression_statement_kind(e, p);
        detail::add_ingredients(e, ing);
        if (!p.accept(",")) return;
    }
}

void parse_parenthesized_condition(SyntaxParser& p, IngredientSet& ing) {
    p.expect("(");
    detail::add_ingredients(p.parse_expression(), ing);
    p.expect(")");
}

void parse_for_header(SyntaxParser& p, IngredientSet& ing) {
    p.expect("(");
    // enhanced for: ( [final] Type name : expr )
    {
        SyntaxParser probe = p;
        probe.accept("final");
        if (auto typed = probe.try_parse_typed_name(); typed && probe.next_is(":")) {
            probe.accept(":");
            ing.vars_defined.insert(typed->second);
            detail::add_ingredients(probe.parse_expression(), ing);
            probe.expect(")");
            p = std::move(probe);
            return;
        }
    }
    if (!p.next_is(";") && !try_parse_declaration(p, ing)) parse_expression_list(p, ing, ";");
    p.expect(";");
    if (!p.next_is(";")) detail::add_ingredients(p.parse_expression(), ing);
    p.expect(";");
    parse_expression_list(p, ing, ")");
    p.expect(")");
}

LineInfo parse_control_line(SyntaxParser& p) {
    LineInfo info{StatementKind::Expression, {}, false};
    if (p.accept("if")) {
        info.kind = StatementKind::If;
        parse_parenthesized_condition(p, info.ingredients);
    } else if (p.accept("while")) {
        info.kind = StatementKind::Loop;
        parse_parenthesized_condition(p, info.ingredients);
    } else if (p.accept("for")) {
        info.kind = StatementKind::Loop;
        parse_for_header(p, info.ingredients);
    } else {
        p.fail("expected control statement");
    }
    info.opens_block = p.accept("{");
    p.expect_end();
    return info;
}

LineInfo parse_simple_line(SyntaxParser& p) {
    LineInfo info{StatementKind::Expression, {}, false};
    const Token& first = p.peek();
    if (first.is("return")) {
        p.accept("return");
        info.kind = StatementKind::Return;
        if (!p.next_is(";")) detail::add_ingredients(p.parse_expression(), info.ingredients);
    } else if (first.is("throw")) {
        p.accept("throw");
        info.kind = StatementKind::Throw;
        detail::add_ingredients(p.parse_expression(), info.ingredients);
    } else if (first.is("break") || first.is("continue")) {
        p.accept(first.text);
        info.kind = StatementKind::Jump;
        if (p.peek().is_identifier()) p.fail("labeled jumps are not supported");
    } else if (first.is(";")) {
        info.kind = StatementKind::Expression;
    } else if (first.kind == TokenKind::Keyword &&
               (first.is("switch") || first.is("do") || first.is("synchronized") ||
                first.is("assert") || first.is("class") || first.is("interface") ||
                first.is("enum") || first.is("case") || first.is("default") || first.is("goto"))) {
        p.fail("'" + first.text + "' statements are not supported");
    } else if (try_parse_declaration(p, info.ingredients)) {
        info.kind = StatementKind::Declaration;
    } else {
        if (p.peek().is_identifier() && p.next_is(":", 1)) p.fail("labels are not supported");
        Expr e = p.parse_expression();
        info.kind = expression_statement_kind(e, p);
        detail::add_ingredients(e, info.ingredients);
    }
    p.expect(";");
    p.expect_end();
    return info;
}

struct MethodHeader {
    std::string name;
    std::string return_type;
    std::vector<Parameter> params;
};

MethodHeader parse_header(const std::vector<Token>& line) {
    SyntaxParser p(line, 0);
    MethodHeader h;
    p.skip_modifiers();
    if (p.next_is("<")) {
        int depth = 0;
        do {
            if (p.next_is("<")) ++depth;
            if (p.next_is(">")) --depth;
            if (p.next_is(">>")) depth -= 2;
            p.accept(p.peek().text);
        } while (!p.at_end() && depth > 0);
        p.skip_modifiers();
    }
    if (p.peek().is_identifier() && p.next_is("(", 1)) {
        h.name = p.expect_identifier();
    } else {
        auto typed = p.try_parse_typed_name();
        if (!typed) p.fail("expected method declaration");
        h.return_type = join_tokens(typed->first);
        h.name = typed->second;
    }
    p.expect("(");
    if (!p.accept(")")) {
        while (true) {
            p.skip_modifiers();
            auto type = p.parse_type();
            if (p.accept("...")) type.emplace_back("...");
            std::string name = p.expect_identifier();
            while (p.accept("[")) {
                p.expect("]");
                type.emplace_back("[");
                type.emplace_back("]");
            }
            h.params.push_back(Parameter{name, join_tokens(type)});
            if (p.accept(",")) continue;
            p.expect(")");
            break;
        }
    }
    while (p.accept("[")) p.expect("]");
    if (p.accept("throws")) {
        do {
            p.parse_type();
        } while (p.accept(","));
    }
    p.expect("{");
    p.expect_end();
    return h;
}

class MethodParser {
public:
    explicit MethodParser(std::vector<std::vector<Token>> lines) : lines_(std::move(lines)) {}

    MethodAst run() {
        if (lines_.empty()) throw ParseFailure("empty method source", -1);
        for (const auto& l : lines_) ast_.lines.push_back(join_tokens(l));
        if (lines_.size() < 2) throw ParseFailure("missing method body", 0);
        for (const auto& l : lines_) {
            for (const auto& t : l) {
                if (t.kind == TokenKind::Unknown) {
                    throw ParseFailure("unexpected character '" + t.text + "'", t.line);
                }
            }
        }
        MethodHeader h = parse_header(lines_.front());
        ast_.name = std::move(h.name);
        ast_.return_type = std::move(h.return_type);
        ast_.params = std::move(h.params);

        cur_ = 1;
        ast_.body = parse_block();
        const int last = static_cast<int>(lines_.size()) - 1;
        if (cur_ != lines_.size() - 1) {
            throw ParseFailure("unexpected closing brace before end of method",
                               static_cast<int>(std::min<std::size_t>(cur_, lines_.size() - 1)));
        }
        if (!is_close_only(lines_.back())) throw ParseFailure("expected closing '}'", last);
        return std::move(ast_);
    }

private:
    static bool is_close_only(const std::vector<Token>& l) { return l.size() == 1 && l[0].is("}"); }

    const std::vector<Token>& line() const {
        if (cur_ >= lines_.size()) {
            throw ParseFailure("unexpected end of method", static_cast<int>(lines_.size()) - 1);
        }
        return lines_[cur_];
    }
    int line_no() const { return static_cast<int>(cur_); }

    std::size_t add_statement(StatementKind kind, IngredientSet ing) {
        Statement s;
        s.id = StatementId{line_no()};
        s.tokens = lines_[cur_];
        s.text = join_tokens(s.tokens);
        s.kind = kind;
        s.ingredients = std::move(ing);
        ast_.statements.push_back(std::move(s));
        ++cur_;
        return ast_.statements.size() - 1;
    }

    void consume_block_line() { add_statement(StatementKind::Block, {}); }

    // Closing line of a braced body that must be exactly `}`.
    void expect_close_only() {
        if (!is_close_only(line())) throw ParseFailure("expected '}'", line_no());
        consume_block_line();
    }

    static bool starts_with(const std::vector<Token>& l, std::initializer_list<std::string_view> words) {
        if (l.size() < words.size()) return false;
        std::size_t i = 0;
        for (auto w : words) {
            if (l[i].kind == TokenKind::Literal || l[i].text != w) return false;
            ++i;
        }
        return true;
    }

    static bool completes(const FlowNode& n, const MethodAst& ast) {
        switch (n.shape) {
            case FlowNode::Shape::Simple: {
                auto k = ast.statements[n.stmt].kind;
                return k != StatementKind::Return && k != StatementKind::Throw &&
                       k != StatementKind::Jump;
            }
            case FlowNode::Shape::Branch:
                return !n.has_else || completes(n.body, ast) || completes(n.orelse, ast);
            case FlowNode::Shape::Loop:
                return true;
            case FlowNode::Shape::Guarded: {
                bool c = completes(n.body, ast);
                for (const auto& h : n.handlers) c = c || completes(h.body, ast);
                if (n.has_finally && !completes(n.finally_body, ast)) return false;
                return c;
            }
            case FlowNode::Shape::Scope:
                return completes(n.body, ast);
        }
        return true;
    }
    static bool completes(const std::vector<FlowNode>& block, const MethodAst& ast) {
        return block.empty() || completes(block.back(), ast);
    }

    std::vector<FlowNode> parse_block() {
        std::vector<FlowNode> out;
        while (true) {
            const auto& l = line();
            if (!l.empty() && l[0].is("}")) return out;
            if (!out.empty() && !completes(out.back(), ast_)) {
                throw ParseFailure("unreachable statement", line_no());
            }
            out.push_back(parse_statement());
        }
    }

    std::vector<FlowNode> parse_body(bool braced) {
        if (braced) {
            auto body = parse_block();
            return body;
        }
        std::vector<FlowNode> body;
        const auto& l = line();
        if (!l.empty() && l[0].is("}")) throw ParseFailure("missing statement body", line_no());
        body.push_back(parse_statement());
        return body;
    }

    FlowNode parse_statement() {
        const auto& l = line();
        const Token& first = l.front();
        if (first.is("if")) return parse_if(0);
        if (first.is("while") || first.is("for")) return parse_loop();
        if (first.is("try")) return parse_try();
        if (first.is("{") && l.size() == 1) {
            FlowNode n;
            n.shape = FlowNode::Shape::Scope;
            n.stmt = add_statement(StatementKind::Block, {});
            n.body = parse_block();
            expect_close_only();
            return n;
        }
        if (first.is("else")) throw ParseFailure("'else' without 'if'", line_no());
        if (first.is("catch") || first.is("finally")) {
            throw ParseFailure("'" + first.text + "' without 'try'", line_no());
        }
        if (first.is("do")) throw ParseFailure("'do' statements are not supported", line_no());
        SyntaxParser p(l, line_no());
        LineInfo info = parse_simple_line(p);
        FlowNode n;
        n.shape = FlowNode::Shape::Simple;
        if (info.kind == StatementKind::Jump && loop_depth_ == 0) {
            throw ParseFailure("'" + first.text + "' outside of a loop", line_no());
        }
        n.stmt = add_statement(info.kind, std::move(info.ingredients));
        return n;
    }

    // `skip` leading tokens (`}` / `else`) precede the `if`.
    FlowNode parse_if(std::size_t skip) {
        const auto& l = line();
        std::vector<Token> rest(l.begin() + static_cast<std::ptrdiff_t>(skip), l.end());
        SyntaxParser p(rest, line_no());
        LineInfo info = parse_control_line(p);
        FlowNode n;
        n.shape = FlowNode::Shape::Branch;
        n.stmt = add_statement(info.kind, std::move(info.ingredients));
        n.body = parse_body(info.opens_block);

        if (info.opens_block) {
            const auto& close = line();
            if (close.empty() || !close[0].is("}")) throw ParseFailure("expected '}'", line_no());
            if (is_close_only(close)) {
                consume_block_line();
                return n;
            }
            if (!starts_with(close, {"}", "else"})) {
                throw ParseFailure("unexpected '" + close[1].text + "' after if-block", line_no());
            }
            parse_else(n, 2);
            return n;
        }
        if (cur_ < lines_.size() && starts_with(lines_[cur_], {"else"})) parse_else(n, 1);
        return n;
    }

    // The current line starts with `} else` (skip = 2) or `else` (skip = 1).
    void parse_else(FlowNode& n, std::size_t skip) {
        const auto& l = line();
        n.has_else = true;
        if (l.size() > skip && l[skip].is("if")) {
            n.orelse.push_back(parse_if(skip));
            return;
        }
        if (l.size() == skip + 1 && l[skip].is("{")) {
            consume_block_line();
            n.orelse = parse_block();
            expect_close_only();
            return;
        }
        if (l.size() != skip) throw ParseFailure("malformed else", line_no());
        consume_block_line();
        n.orelse = parse_body(false);
    }

    FlowNode parse_loop() {
        SyntaxParser p(line(), line_no());
        LineInfo info = parse_control_line(p);
        FlowNode n;
        n.shape = FlowNode::Shape::Loop;
        n.stmt = add_statement(info.kind, std::move(info.ingredients));
        ++loop_depth_;
        n.body = parse_body(info.opens_block);
        --loop_depth_;
        if (info.opens_block) {
            const auto& close = line();
            if (starts_with(close, {"}", "while"})) {
                throw ParseFailure("'do' statements are not supported", line_no());
            }
            expect_close_only();
        }
        return n;
    }

    FlowNode parse_try() {
        const auto& l = line();
        if (!(l.size() == 2 && l[1].is("{"))) {
            throw ParseFailure(l.size() > 1 && l[1].is("(")
                                   ? "try-with-resources is not supported"
                                   : "malformed try",
                               line_no());
        }
        FlowNode n;
        n.shape = FlowNode::Shape::Guarded;
        n.stmt = add_statement(StatementKind::Try, {});
        n.body = parse_block();
        while (true) {
            const auto& close = line();
            if (starts_with(close, {"}", "catch"})) {
                SyntaxParser p(std::vector<Token>(close.begin() + 2, close.end()), line_no());
                IngredientSet ing;
                p.expect("(");
                p.accept("final");
                p.parse_type();
                while (p.accept("|")) p.parse_type();
                ing.vars_defined.insert(p.expect_identifier());
                p.expect(")");
                p.expect("{");
                p.expect_end();
                FlowNode::Handler h;
                h.head = add_statement(StatementKind::Catch, std::move(ing));
                h.body = parse_block();
                n.handlers.push_back(std::move(h));
                continue;
            }
            if (starts_with(close, {"}", "finally", "{"}) && close.size() == 3) {
                consume_block_line();
                n.has_finally = true;
                n.finally_body = parse_block();
                expect_close_only();
                break;
            }
            if (is_close_only(close)) {
                consume_block_line();
                break;
            }
            throw ParseFailure("malformed try statement", line_no());
        }
        if (n.handlers.empty() && !n.has_finally) {
            throw ParseFailure("'try' without 'catch' or 'finally'",
                               ast_.statements[n.stmt].line());
        }
        return n;
    }

    std::vector<std::vector<Token>> lines_;
    std::size_t cur_ = 0;
    int loop_depth_ = 0;
    MethodAst ast_;
};

}  // namespace

MethodAst parse_method(std::string_view source) {
    return MethodParser(detail::layout_method(source)).run();
}

IngredientSet collect_ingredients(const Statement& stmt) {
    const auto& toks = stmt.tokens;
    std::size_t skip = 0;
    while (skip < toks.size() && (toks[skip].is("}") || toks[skip].is("else"))) ++skip;
    std::vector<Token> rest(toks.begin() + static_cast<std::ptrdiff_t>(skip), toks.end());
    SyntaxParser p(rest, stmt.line());
    switch (stmt.kind) {
        case StatementKind::Block:
        case StatementKind::Try:
            return {};
        case StatementKind::If:
        case StatementKind::Loop:
            return parse_control_line(p).ingredients;
        case StatementKind::Catch: {
            IngredientSet ing;
            p.expect("catch");
            p.expect("(");
            p.accept("final");
            p.parse_type();
            while (p.accept("|")) p.parse_type();
            ing.vars_defined.insert(p.expect_identifier());
            return ing;
        }
        default:
            return parse_simple_line(p).ingredients;
    }
}

}  // namespace slicefix
