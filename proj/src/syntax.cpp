// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include "syntax.hpp"

#include <unordered_map>
#include <unordered_set>

#include "slicefix/errors.hpp"

namespace slicefix::detail {

namespace {

int binary_precedence(const Token& t) {
    static const std::unordered_map<std::string_view, int> kPrec = {
        {"||", 1},  {"&&", 2}, {"|", 3},  {"^", 4},  {"&", 5},          {"==", 6}, {"!=", 6},
        {"<", 7},   {">", 7},  {"<=", 7}, {">=", 7}, {"instanceof", 7}, {"<<", 8}, {">>", 8},
        {">>>", 8}, {"+", 9},  {"-", 9},  {"*", 10}, {"/", 10},         {"%", 10},
    };
    if (t.kind != TokenKind::Operator && t.kind != TokenKind::Keyword) return 0;
    auto it = kPrec.find(t.text);
    return it == kPrec.end() ? 0 : it->second;
}

bool is_assignment_operator(const Token& t) {
    static const std::unordered_set<std::string_view> kOps = {
        "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=",
    };
    return t.kind == TokenKind::Operator && kOps.contains(t.text);
}

bool is_assignable(const Expr& e) {
    return e.kind == Expr::Kind::Name || e.kind == Expr::Kind::Field ||
           e.kind == Expr::Kind::Index;
}

}  // namespace

bool is_primitive_type(std::string_view w) {
    return w == "boolean" || w == "byte" || w == "char" || w == "short" || w == "int" ||
           w == "long" || w == "float" || w == "double" || w == "void";
}

bool is_modifier(std::string_view w) {
    return w == "public" || w == "protected" || w == "private" || w == "static" || w == "final" ||
           w == "abstract" || w == "synchronized" || w == "native" || w == "strictfp" ||
           w == "transient" || w == "volatile" || w == "default";
}

SyntaxParser::SyntaxParser(std::vector<Token> tokens, int line)
    : toks_(std::move(tokens)), line_(line) {}

const Token& SyntaxParser::peek(std::size_t ahead) const {
    static const Token kEnd{TokenKind::Unknown, "", 0};
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : kEnd;
}

bool SyntaxParser::next_is(std::string_view text, std::size_t ahead) const {
    return pos_ + ahead < toks_.size() && toks_[pos_ + ahead].kind != TokenKind::Literal &&
           toks_[pos_ + ahead].text == text;
}

bool SyntaxParser::accept(std::string_view text) {
    if (!next_is(text)) return false;
    ++pos_;
    return true;
}

void SyntaxParser::expect(std::string_view text) {
    if (!accept(text)) {
        fail("expected '" + std::string(text) + "' but found " +
             (at_end() ? std::string("end of line") : "'" + peek().text + "'"));
    }
}

std::string SyntaxParser::expect_identifier() {
    if (!peek().is_identifier()) {
        fail("expected identifier but found " +
             (at_end() ? std::string("end of line") : "'" + peek().text + "'"));
    }
    return toks_[pos_++].text;
}

void SyntaxParser::expect_end() {
    if (!at_end()) fail("unexpected '" + peek().text + "'");
}

void SyntaxParser::fail(const std::string& message) const { throw ParseFailure(message, line_); }

// ---- types ------------------------------------------------------------------

bool SyntaxParser::close_angle(std::vector<std::string>& out) {
    if (at_end()) return false;
    Token& t = toks_[pos_];
    if (t.kind != TokenKind::Operator || t.text.empty() || t.text[0] != '>') return false;
    out.emplace_back(">");
    if (t.text == ">") {
        ++pos_;
    } else {
        t.text.erase(0, 1);  // `>>` closes two argument lists
    }
    return true;
}

bool SyntaxParser::parse_type_arguments(std::vector<std::string>& out) {
    if (!next_is("<")) return false;
    ++pos_;
    out.emplace_back("<");
    if (close_angle(out)) return true;  // diamond
    while (true) {
        if (next_is("?")) {
            ++pos_;
            out.emplace_back("?");
            if (next_is("extends") || next_is("super")) {
                out.push_back(toks_[pos_++].text);
                if (!parse_type_into(out, true)) return false;
            }
        } else if (!parse_type_into(out, true)) {
            return false;
        }
        if (next_is(",")) {
            ++pos_;
            out.emplace_back(",");
            continue;
        }
        return close_angle(out);
    }
}

bool SyntaxParser::parse_type_into(std::vector<std::string>& out, bool allow_dims) {
    const Token& t = peek();
    if (t.kind == TokenKind::Keyword && is_primitive_type(t.text)) {
        out.push_back(t.text);
        ++pos_;
    } else if (t.is_identifier()) {
        while (true) {
            out.push_back(toks_[pos_++].text);
            if (next_is("<") && !parse_type_arguments(out)) return false;
            if (next_is(".") && peek(1).is_identifier()) {
                out.emplace_back(".");
                ++pos_;
                continue;
            }
            break;
        }
    } else {
        return false;
    }
    while (allow_dims && next_is("[") && next_is("]", 1)) {
        out.emplace_back("[");
        out.emplace_back("]");
        pos_ += 2;
    }
    return true;
}

std::optional<std::vector<std::string>> SyntaxParser::try_parse_type() {
    const auto saved_toks = toks_;
    const auto saved_pos = pos_;
    std::vector<std::string> out;
    if (parse_type_into(out, true)) return out;
    toks_ = saved_toks;
    pos_ = saved_pos;
    return std::nullopt;
}

std::vector<std::string> SyntaxParser::parse_type() {
    auto t = try_parse_type();
    if (!t) fail("expected type");
    return *t;
}

std::optional<std::pair<std::vector<std::string>, std::string>> SyntaxParser::try_parse_typed_name() {
    const auto saved_toks = toks_;
    const auto saved_pos = pos_;
    std::vector<std::string> type;
    if (parse_type_into(type, true) && peek().is_identifier()) {
        std::string name = toks_[pos_++].text;
        return std::make_pair(std::move(type), std::move(name));
    }
    toks_ = saved_toks;
    pos_ = saved_pos;
    return std::nullopt;
}

void SyntaxParser::skip_modifiers() {
    while (!at_end()) {
        if (next_is("@")) {
            if (next_is("interface", 1)) return;
            ++pos_;
            expect_identifier();
            while (next_is(".") && peek(1).is_identifier()) pos_ += 2;
            if (next_is("(")) {
                int depth = 0;
                do {
                    if (next_is("(")) ++depth;
                    if (next_is(")")) --depth;
                    ++pos_;
                } while (!at_end() && depth > 0);
                if (depth != 0) fail("unbalanced annotation arguments");
            }
        } else if (peek().kind == TokenKind::Keyword && is_modifier(peek().text)) {
            ++pos_;
        } else {
            return;
        }
    }
}

// ---- expressions ------------------------------------------------------------

Expr SyntaxParser::parse_expression() { return parse_assignment(); }

Expr SyntaxParser::parse_assignment() {
    Expr lhs = parse_conditional();
    if (next_is("->")) fail("lambda expressions are not supported");
    if (is_assignment_operator(peek())) {
        if (!is_assignable(lhs)) fail("invalid assignment target");
        Expr e{Expr::Kind::Assign, toks_[pos_++].text, false, {}};
        e.kids.push_back(std::move(lhs));
        if (next_is("{")) {
            e.kids.push_back(parse_array_initializer());
        } else {
            e.kids.push_back(parse_assignment());
        }
        return e;
    }
    return lhs;
}

Expr SyntaxParser::parse_conditional() {
    Expr cond = parse_binary(1);
    if (!next_is("?")) return cond;
    ++pos_;
    Expr yes = parse_expression();
    expect(":");
    Expr no = parse_conditional();
    Expr e{Expr::Kind::Conditional, "?:", false, {}};
    e.kids.push_back(std::move(cond));
    e.kids.push_back(std::move(yes));
    e.kids.push_back(std::move(no));
    return e;
}

Expr SyntaxParser::parse_binary(int min_prec) {
    Expr left = parse_unary();
    while (true) {
        const int prec = binary_precedence(peek());
        if (prec == 0 || prec < min_prec) break;
        std::string op = toks_[pos_++].text;
        if (op == "instanceof") {
            accept("final");
            parse_type();
            if (peek().is_identifier()) fail("instanceof patterns are not supported");
            Expr e{Expr::Kind::InstanceOf, op, false, {}};
            e.kids.push_back(std::move(left));
            left = std::move(e);
            continue;
        }
        Expr right = parse_binary(prec + 1);
        Expr e{Expr::Kind::Binary, std::move(op), false, {}};
        e.kids.push_back(std::move(left));
        e.kids.push_back(std::move(right));
        left = std::move(e);
    }
    return left;
}

bool SyntaxParser::looks_like_cast() {
    const auto saved_toks = toks_;
    const auto saved_pos = pos_;
    ++pos_;  // (
    std::vector<std::string> type;
    bool cast = false;
    if (parse_type_into(type, true) && next_is(")")) {
        const Token& after = peek(1);
        const bool primitive = type.size() == 1 && is_primitive_type(type[0]);
        if (after.is_identifier() || after.kind == TokenKind::Literal || after.is("(") ||
            after.is("!") || after.is("~") || after.is("this") || after.is("new") ||
            after.is("super")) {
            cast = true;
        } else if (primitive &&
                   (after.is("+") || after.is("-") || after.is("++") || after.is("--"))) {
            cast = true;
        }
    }
    if (cast) {
        ++pos_;  // )
        return true;
    }
    toks_ = saved_toks;
    pos_ = saved_pos;
    return false;
}

Expr SyntaxParser::parse_unary() {
    const Token& t = peek();
    if (t.is("++") || t.is("--")) {
        std::string op = toks_[pos_++].text;
        Expr operand = parse_unary();
        if (!is_assignable(operand)) fail("invalid operand for " + op);
        Expr e{Expr::Kind::Prefix, std::move(op), false, {}};
        e.kids.push_back(std::move(operand));
        return e;
    }
    if (t.is("+") || t.is("-") || t.is("!") || t.is("~")) {
        std::string op = toks_[pos_++].text;
        Expr e{Expr::Kind::Prefix, std::move(op), false, {}};
        e.kids.push_back(parse_unary());
        return e;
    }
    if (t.is("(") && looks_like_cast()) {
        Expr e{Expr::Kind::Cast, "cast", false, {}};
        e.kids.push_back(parse_unary());
        return e;
    }
    return parse_postfix(parse_primary());
}

std::vector<Expr> SyntaxParser::parse_arguments() {
    expect("(");
    std::vector<Expr> args;
    if (accept(")")) return args;
    while (true) {
        args.push_back(parse_expression());
        if (accept(",")) continue;
        expect(")");
        return args;
    }
}

Expr SyntaxParser::parse_array_initializer() {
    expect("{");
    Expr e{Expr::Kind::ArrayInit, "{}", false, {}};
    while (!next_is("}")) {
        if (at_end()) fail("unterminated array initializer");
        e.kids.push_back(next_is("{") ? parse_array_initializer() : parse_expression());
        if (!accept(",")) break;
    }
    expect("}");
    return e;
}

Expr SyntaxParser::parse_creator() {
    expect("new");
    std::vector<std::string> type;
    if (!parse_type_into(type, false)) fail("expected type after 'new'");
    std::string simple;
    for (const auto& part : type) {
        if (part == "<") break;
        if (part != ".") simple = part;
    }
    if (next_is("(")) {
        Expr e{Expr::Kind::New, simple, false, parse_arguments()};
        if (next_is("{")) fail("anonymous classes are not supported");
        return e;
    }
    if (!next_is("[")) fail("expected '(' or '[' after 'new " + simple + "'");
    Expr e{Expr::Kind::NewArray, simple, false, {}};
    bool open_dims = false;
    while (accept("[")) {
        if (accept("]")) {
            open_dims = true;
            continue;
        }
        if (open_dims) fail("array dimension after empty dimension");
        e.kids.push_back(parse_expression());
        expect("]");
    }
    if (next_is("{")) {
        if (!e.kids.empty()) fail("array initializer with explicit dimension");
        e.kids.push_back(parse_array_initializer());
    }
    return e;
}

Expr SyntaxParser::parse_primary() {
    const Token& t = peek();
    if (at_end()) fail("unexpected end of line in expression");
    if (t.is("(") && t.kind == TokenKind::Operator) {
        ++pos_;
        Expr inner = parse_expression();
        expect(")");
        return inner;
    }
    if (t.kind == TokenKind::Literal) {
        return Expr{Expr::Kind::Literal, toks_[pos_++].text, false, {}};
    }
    if (t.is("this") || t.is("super")) {
        std::string word = toks_[pos_++].text;
        if (next_is("(")) {
            return Expr{Expr::Kind::Call, word, false, parse_arguments()};
        }
        if (word == "super" && !next_is(".")) fail("'super' must be qualified");
        return Expr{Expr::Kind::This, word, false, {}};
    }
    if (t.is_identifier()) {
        std::string name = toks_[pos_++].text;
        if (next_is("(")) return Expr{Expr::Kind::Call, name, false, parse_arguments()};
        return Expr{Expr::Kind::Name, name, false, {}};
    }
    if (t.is("new")) return parse_creator();
    if (t.kind == TokenKind::Keyword && is_primitive_type(t.text)) {
        std::vector<std::string> type;
        parse_type_into(type, true);
        expect(".");
        expect("class");
        return Expr{Expr::Kind::ClassLiteral, "class", false, {}};
    }
    if (t.is("{")) return parse_array_initializer();
    if (t.is("->")) fail("lambda expressions are not supported");
    if (t.is("switch")) fail("switch is not supported");
    fail("unexpected '" + t.text + "' in expression");
}

Expr SyntaxParser::parse_postfix(Expr base) {
    while (true) {
        if (next_is(".")) {
            ++pos_;
            if (accept("class")) {
                base = Expr{Expr::Kind::ClassLiteral, "class", false, {}};
                continue;
            }
            if (next_is("<")) fail("explicit generic invocations are not supported");
            if (next_is("new")) fail("qualified instance creation is not supported");
            if (accept("this")) {
                base = Expr{Expr::Kind::This, "this", false, {}};
                continue;
            }
            std::string name = expect_identifier();
            if (next_is("(")) {
                Expr call{Expr::Kind::Call, std::move(name), true, {}};
                call.kids.push_back(std::move(base));
                for (auto& a : parse_arguments()) call.kids.push_back(std::move(a));
                base = std::move(call);
            } else {
                Expr field{Expr::Kind::Field, std::move(name), false, {}};
                field.kids.push_back(std::move(base));
                base = std::move(field);
            }
        } else if (next_is("[")) {
            ++pos_;
            Expr idx{Expr::Kind::Index, "[]", false, {}};
            idx.kids.push_back(std::move(base));
            idx.kids.push_back(parse_expression());
            expect("]");
            base = std::move(idx);
        } else if (next_is("++") || next_is("--")) {
            if (!is_assignable(base)) fail("invalid operand for " + peek().text);
            Expr e{Expr::Kind::Postfix, toks_[pos_++].text, false, {}};
            e.kids.push_back(std::move(base));
            base = std::move(e);
        } else if (next_is("::")) {
            fail("method references are not supported");
        } else {
            return base;
        }
    }
}

// ---- ingredients ------------------------------------------------------------

void add_target_ingredients(const Expr& target, bool compound, IngredientSet& out) {
    switch (target.kind) {
        case Expr::Kind::Name:
            out.vars_defined.insert(target.text);
            if (compound) out.vars_used.insert(target.text);
            break;
        case Expr::Kind::Field:
            add_ingredients(target.kids[0], out);
            out.vars_defined.insert(target.text);
            if (compound) out.vars_used.insert(target.text);
            break;
        case Expr::Kind::Index:
            // element store: the array keeps its other elements
            add_target_ingredients(target.kids[0], true, out);
            add_ingredients(target.kids[1], out);
            break;
        default:
            add_ingredients(target, out);
            break;
    }
}

void add_ingredients(const Expr& e, IngredientSet& out) {
    using K = Expr::Kind;
    switch (e.kind) {
        case K::Name:
            out.vars_used.insert(e.text);
            return;
        case K::Literal:
        case K::This:
        case K::ClassLiteral:
            return;
        case K::Field:
            add_ingredients(e.kids[0], out);
            out.vars_used.insert(e.text);
            return;
        case K::Call:
            out.invocations.insert(Invocation{e.text, static_cast<int>(e.arg_count())});
            for (const auto& k : e.kids) add_ingredients(k, out);
            return;
        case K::New:
            out.invocations.insert(Invocation{e.text, static_cast<int>(e.kids.size())});
            for (const auto& k : e.kids) add_ingredients(k, out);
            return;
        case K::Prefix:
        case K::Postfix:
            if (e.text == "++" || e.text == "--") {
                add_target_ingredients(e.kids[0], true, out);
            } else {
                add_ingredients(e.kids[0], out);
            }
            return;
        case K::Assign:
            add_target_ingredients(e.kids[0], e.text != "=", out);
            add_ingredients(e.kids[1], out);
            return;
        default:
            for (const auto& k : e.kids) add_ingredients(k, out);
            return;
    }
}

// ---- layout -----------------------------------------------------------------

std::vector<std::vector<Token>> layout_method(std::string_view source) {
    const std::vector<Token> toks = lex(source);
    std::vector<std::vector<Token>> lines;
    std::vector<Token> cur;
    std::vector<bool> brace_is_block;
    std::vector<int> control_parens;
    int paren_depth = 0;

    auto flush = [&] {
        if (cur.empty()) return;
        for (auto& t : cur) t.line = static_cast<int>(lines.size());
        lines.push_back(std::move(cur));
        cur.clear();
    };
    auto op_at = [&](std::size_t i, std::string_view text) {
        return i < toks.size() && toks[i].kind != TokenKind::Literal && toks[i].text == text;
    };
    auto in_initializer = [&] { return !brace_is_block.empty() && !brace_is_block.back(); };

    for (std::size_t i = 0; i < toks.size(); ++i) {
        const Token& t = toks[i];
        const bool is_op = t.kind == TokenKind::Operator || t.kind == TokenKind::Keyword;

        if (is_op && t.text == "}" && !brace_is_block.empty() && brace_is_block.back()) {
            brace_is_block.pop_back();
            flush();
            cur.push_back(t);
            if (!(op_at(i + 1, "else") || op_at(i + 1, "catch") || op_at(i + 1, "finally"))) {
                flush();
            }
            continue;
        }

        cur.push_back(t);
        if (!is_op) continue;

        if (t.text == "(") {
            ++paren_depth;
            if (i > 0 && (op_at(i - 1, "if") || op_at(i - 1, "while") || op_at(i - 1, "for") ||
                          op_at(i - 1, "catch") || op_at(i - 1, "switch") ||
                          op_at(i - 1, "synchronized"))) {
                control_parens.push_back(paren_depth);
            }
        } else if (t.text == ")") {
            if (!control_parens.empty() && control_parens.back() == paren_depth) {
                control_parens.pop_back();
                if (!op_at(i + 1, "{")) flush();
            }
            paren_depth = std::max(0, paren_depth - 1);
        } else if (t.text == "{") {
            const bool init = paren_depth > 0 || in_initializer() ||
                              (i > 0 && (op_at(i - 1, "=") || op_at(i - 1, "]") ||
                                         op_at(i - 1, ",") || op_at(i - 1, "return")));
            brace_is_block.push_back(!init);
            if (!init) flush();
        } else if (t.text == "}") {
            if (!brace_is_block.empty()) brace_is_block.pop_back();
        } else if (t.text == ";") {
            if (paren_depth == 0 && !in_initializer()) flush();
        } else if (t.text == "else") {
            if (!op_at(i + 1, "if") && !op_at(i + 1, "{")) flush();
        }
    }
    flush();
    return lines;
}

}  // namespace slicefix::detail
