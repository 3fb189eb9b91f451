// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include <algorithm>
#include <set>

#include "slicefix/errors.hpp"
#include "slicefix/java_frontend.hpp"
#include "syntax.hpp"

namespace slicefix {

namespace {

class ClassScanner {
public:
    ClassScanner(std::vector<Token> toks, std::string_view exclude)
        : toks_(std::move(toks)), exclude_(exclude) {}

    ClassContext run() {
        for (const auto& t : toks_) {
            if (t.kind == TokenKind::Unknown) fail("unexpected character '" + t.text + "'", t.line);
        }
        skip_preamble();
        std::size_t body_end = open_type_body();
        while (pos_ < body_end) member();
        std::sort(ctx_.public_fields.begin(), ctx_.public_fields.end(),
                  [](const auto& a, const auto& b) { return a.first_token < b.first_token; });
        std::sort(ctx_.public_method_signatures.begin(), ctx_.public_method_signatures.end(),
                  [](const auto& a, const auto& b) { return a.first_token < b.first_token; });
        return std::move(ctx_);
    }

private:
    [[noreturn]] void fail(const std::string& msg, int line) const { throw ParseFailure(msg, line); }
    [[noreturn]] void fail_here(const std::string& msg) const {
        fail(msg, pos_ < toks_.size() ? toks_[pos_].line : (toks_.empty() ? 0 : toks_.back().line));
    }

    bool at(std::string_view text, std::size_t i) const {
        return i < toks_.size() && toks_[i].kind != TokenKind::Literal && toks_[i].text == text;
    }
    bool at(std::string_view text) const { return at(text, pos_); }

    // Index one past the token closing the bracket at `open`.
    std::size_t match(std::size_t open) const {
        const std::string& o = toks_[open].text;
        const std::string c = o == "(" ? ")" : o == "{" ? "}" : "]";
        int depth = 0;
        for (std::size_t i = open; i < toks_.size(); ++i) {
            if (at(o, i)) ++depth;
            if (at(c, i) && --depth == 0) return i + 1;
        }
        fail("unbalanced '" + o + "'", toks_[open].line);
    }

    void skip_annotation() {
        ++pos_;  // @
        if (pos_ < toks_.size() && toks_[pos_].is_identifier()) ++pos_;
        while (at(".") && pos_ + 1 < toks_.size() && toks_[pos_ + 1].is_identifier()) pos_ += 2;
        if (at("(")) pos_ = match(pos_);
    }

    struct Modifiers {
        bool is_public = false;
        bool is_private = false;
        std::size_t first_keyword = 0;  // start of the declaration text
    };

    Modifiers modifiers() {
        Modifiers m;
        bool seen_keyword = false;
        while (pos_ < toks_.size()) {
            if (at("@") && !at("interface", pos_ + 1)) {
                skip_annotation();
            } else if (toks_[pos_].kind == TokenKind::Keyword && detail::is_modifier(toks_[pos_].text)) {
                if (!seen_keyword) m.first_keyword = pos_;
                seen_keyword = true;
                m.is_public = m.is_public || toks_[pos_].is("public");
                m.is_private = m.is_private || toks_[pos_].is("private");
                ++pos_;
            } else {
                break;
            }
        }
        if (!seen_keyword) m.first_keyword = pos_;
        return m;
    }

    void skip_preamble() {
        while (at("package") || at("import")) {
            while (pos_ < toks_.size() && !at(";")) ++pos_;
            ++pos_;
        }
    }

    std::size_t open_type_body() {
        modifiers();
        if (at("enum") || (pos_ < toks_.size() && toks_[pos_].is("record"))) {
            fail_here("'" + toks_[pos_].text + "' declarations are not supported");
        }
        if (at("interface")) {
            interface_ = true;
        } else if (at("@") && at("interface", pos_ + 1)) {
            fail_here("annotation types are not supported");
        } else if (!at("class")) {
            fail_here("expected class declaration");
        }
        ++pos_;
        if (pos_ >= toks_.size() || !toks_[pos_].is_identifier()) fail_here("expected class name");
        class_name_ = toks_[pos_++].text;
        while (pos_ < toks_.size() && !at("{")) ++pos_;
        if (pos_ >= toks_.size()) fail_here("missing class body");
        const std::size_t end = match(pos_) - 1;
        ++pos_;
        return end;
    }

    void skip_to_body_end() {
        // after a method's parameter list: throws clause then body or `;`
        while (pos_ < toks_.size() && !at("{") && !at(";")) ++pos_;
        if (pos_ >= toks_.size()) fail_here("unterminated member");
        pos_ = at("{") ? match(pos_) : pos_ + 1;
    }

    void member() {
        if (at(";")) {
            ++pos_;
            return;
        }
        const Modifiers mods = modifiers();
        const std::size_t text_start = mods.first_keyword;
        if (at("{")) {  // initializer block
            pos_ = match(pos_);
            return;
        }
        if (at("class") || at("interface") || at("enum") || (at("@") && at("interface", pos_ + 1))) {
            while (pos_ < toks_.size() && !at("{")) ++pos_;
            if (pos_ >= toks_.size()) fail_here("missing nested type body");
            pos_ = match(pos_);
            return;
        }
        if (at("<")) {  // generic method
            int depth = 0;
            do {
                if (at("<")) ++depth;
                if (at(">")) --depth;
                if (at(">>")) depth -= 2;
                ++pos_;
            } while (pos_ < toks_.size() && depth > 0);
        }
        const bool is_public = mods.is_public || (interface_ && !mods.is_private);
        if (pos_ < toks_.size() && toks_[pos_].is_identifier() && toks_[pos_].text == class_name_ &&
            at("(", pos_ + 1)) {
            pos_ = match(pos_ + 1);  // constructor
            skip_to_body_end();
            return;
        }

        detail::SyntaxParser p(std::vector<Token>(toks_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                                  toks_.end()),
                               pos_ < toks_.size() ? toks_[pos_].line : 0);
        auto typed = p.try_parse_typed_name();
        if (!typed) fail_here("expected member declaration");
        const std::size_t name_pos = pos_ + p.pos() - 1;
        pos_ += p.pos();

        if (at("(")) {
            method(typed->second, is_public, text_start);
            return;
        }
        field(typed->second, is_public, text_start, name_pos);
    }

    void method(const std::string& name, bool is_public, std::size_t text_start) {
        const std::size_t open = pos_;
        const std::size_t close = match(open) - 1;
        int arity = 0;
        bool varargs = false;
        if (close > open + 1) {
            arity = 1;
            int depth = 0;
            for (std::size_t i = open + 1; i < close; ++i) {
                const auto& t = toks_[i].text;
                if (t == "(" || t == "<" || t == "[") ++depth;
                if (t == ")" || t == ">" || t == "]") --depth;
                if (t == ">>") depth -= 2;
                if (t == "," && depth == 0) ++arity;
                if (t == "...") varargs = true;
            }
        }
        pos_ = close + 1;
        std::size_t sig_end = pos_;
        while (sig_end < toks_.size() && !at("{", sig_end) && !at(";", sig_end)) ++sig_end;
        std::vector<Token> sig(toks_.begin() + static_cast<std::ptrdiff_t>(text_start),
                               toks_.begin() + static_cast<std::ptrdiff_t>(sig_end));
        skip_to_body_end();
        if (!is_public || name == exclude_) return;
        if (!seen_methods_.insert({name, arity}).second) return;
        ctx_.public_method_signatures.push_back(
            MethodSignature{name, arity, varargs, join_tokens(sig), static_cast<int>(text_start)});
    }

    void field(const std::string& first_name, bool is_public, std::size_t text_start,
               std::size_t name_pos) {
        std::vector<std::string> names{first_name};
        detail::SyntaxParser p(std::vector<Token>(toks_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                                  toks_.end()),
                               pos_ < toks_.size() ? toks_[pos_].line : 0);
        std::size_t end = 0;
        try {
            while (p.accept("[")) p.expect("]");
            while (true) {
                if (p.accept("=")) {
                    if (p.next_is("{")) {
                        p.parse_array_initializer();
                    } else {
                        p.parse_expression();
                    }
                }
                if (!p.accept(",")) break;
                names.push_back(p.expect_identifier());
                while (p.accept("[")) p.expect("]");
            }
            p.expect(";");
            end = pos_ + p.pos();
        } catch (const ParseFailure&) {
            // Initializer outside the subset (e.g. a lambda): keep the first
            // name and resynchronise on the next top-level `;`.
            std::size_t i = pos_;
            int depth = 0;
            while (i < toks_.size()) {
                const auto& t = toks_[i].text;
                if (t == "(" || t == "{" || t == "[") ++depth;
                if (t == ")" || t == "}" || t == "]") --depth;
                if (t == ";" && depth == 0) break;
                ++i;
            }
            if (i >= toks_.size()) fail("unterminated field declaration", toks_[name_pos].line);
            names.resize(1);
            end = i + 1;
        }
        std::vector<Token> decl(toks_.begin() + static_cast<std::ptrdiff_t>(text_start),
                                toks_.begin() + static_cast<std::ptrdiff_t>(end));
        pos_ = end;
        if (!is_public) return;
        const std::string text = join_tokens(decl);
        for (const auto& n : names) {
            if (!seen_fields_.insert(n).second) continue;
            ctx_.public_fields.push_back(FieldEntry{n, text, static_cast<int>(text_start)});
        }
    }

    std::vector<Token> toks_;
    std::string exclude_;
    std::size_t pos_ = 0;
    bool interface_ = false;
    std::string class_name_;
    std::set<std::string> seen_fields_;
    std::set<std::pair<std::string, int>> seen_methods_;
    ClassContext ctx_;
};

}  // namespace

ClassContext extract_class_context(std::optional<std::string_view> class_source,
                                   std::string_view exclude_method) {
    if (!class_source) return {};
    auto toks = lex(*class_source);
    if (toks.empty()) return {};
    return ClassScanner(std::move(toks), exclude_method).run();
}

}  // namespace slicefix
