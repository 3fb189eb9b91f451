// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include "slicefix/encoder.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <stdexcept>

#include "slicefix/errors.hpp"
#include "slicefix/lexer.hpp"

namespace slicefix {

namespace {

// Number of leading backslashes when they are followed by `<`, else npos.
std::size_t escape_depth(std::string_view t) {
    std::size_t i = 0;
    while (i < t.size() && t[i] == '\\') ++i;
    return i < t.size() && t[i] == '<' ? i : std::string_view::npos;
}

std::vector<std::string> content_tokens(const std::string& text) {
    std::vector<std::string> out;
    for (auto& t : lex_texts(text)) out.push_back(escape_token(t));
    return out;
}

std::string decode_segment(const std::vector<std::string>& tokens, std::size_t begin,
                           std::size_t end) {
    std::vector<std::string> raw;
    raw.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) raw.push_back(unescape_token(tokens[i]));
    return join_tokens(raw);
}

struct Item {
    std::vector<std::string> tokens;
    int line = 0;  // intra only
    bool kept = true;
};

std::size_t cost(const std::vector<Item>& items) {
    std::size_t n = 0;
    for (const auto& it : items) {
        if (it.kept) n += it.tokens.size() + 1;  // + <SEP>
    }
    return n;
}

}  // namespace

bool is_marker(std::string_view token) {
    static constexpr std::array markers{kGlb, kCtx, kBol, kEol, kSep};
    return std::find(markers.begin(), markers.end(), token) != markers.end();
}

std::string escape_token(std::string_view token) {
    if (escape_depth(token) == std::string_view::npos) return std::string(token);
    return "\\" + std::string(token);
}

std::string unescape_token(std::string_view token) {
    const std::size_t d = escape_depth(token);
    if (d == std::string_view::npos || d == 0) return std::string(token);
    return std::string(token.substr(1));
}

std::string ModelInput::text() const { return join_tokens(tokens); }

ModelInput encode_input(const SliceContext& sc, std::size_t budget) {
    const auto buggy = content_tokens(sc.buggy.text);
    if (buggy.empty()) throw std::invalid_argument("buggy statement has no tokens");
    if (budget < buggy.size() + 4) {
        throw std::invalid_argument("budget " + std::to_string(budget) + " cannot hold a buggy statement of " +
                                    std::to_string(buggy.size()) + " tokens");
    }

    std::vector<Item> global;
    for (const auto& g : sc.global) global.push_back({content_tokens(g.text), 0, true});
    std::vector<Item> intra;
    for (const auto& s : sc.intra) intra.push_back({content_tokens(s.text), s.line, true});

    ModelInput out;
    out.budget = budget;
    const std::size_t fixed = buggy.size() + 4;
    auto total = [&] { return fixed + cost(global) + cost(intra); };

    // Intra statements farthest from the buggy line go first; on equal
    // distance the earlier statement goes. One intra statement is kept until
    // all global items are gone.
    std::vector<std::size_t> order(intra.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const int da = std::abs(intra[a].line - sc.buggy.line);
        const int db = std::abs(intra[b].line - sc.buggy.line);
        if (da != db) return da > db;
        return intra[a].line < intra[b].line;
    });
    std::size_t next = 0;
    while (total() > budget && next + 1 < order.size()) {
        intra[order[next++]].kept = false;
        out.truncated = true;
    }
    for (auto it = global.rbegin(); it != global.rend() && total() > budget; ++it) {
        it->kept = false;
        out.truncated = true;
    }
    if (total() > budget && next < order.size()) {
        intra[order[next++]].kept = false;
        out.truncated = true;
    }

    auto emit = [&out](const std::vector<Item>& items) {
        for (const auto& it : items) {
            if (!it.kept) continue;
            out.tokens.insert(out.tokens.end(), it.tokens.begin(), it.tokens.end());
            out.tokens.emplace_back(kSep);
        }
    };
    out.tokens.emplace_back(kGlb);
    out.global.begin = out.tokens.size();
    emit(global);
    out.global.end = out.tokens.size();
    out.tokens.emplace_back(kCtx);
    out.context.begin = out.tokens.size();
    emit(intra);
    out.context.end = out.tokens.size();
    out.tokens.emplace_back(kBol);
    out.buggy.begin = out.tokens.size();
    out.tokens.insert(out.tokens.end(), buggy.begin(), buggy.end());
    out.buggy.end = out.tokens.size();
    out.tokens.emplace_back(kEol);
    return out;
}

DecodedParts decode_parts(const std::vector<std::string>& tokens) {
    auto bad = [](std::size_t pos, const std::string& what) -> MalformedInput {
        return MalformedInput(what, pos);
    };
    auto expect = [&](std::size_t pos, std::string_view marker) {
        if (pos >= tokens.size()) throw bad(pos, "expected " + std::string(marker) + ", found end of input");
        if (tokens[pos] != marker) {
            throw bad(pos, "expected " + std::string(marker) + ", found '" + tokens[pos] + "'");
        }
    };

    // Reads SEP-delimited items up to `stop`; returns the position of `stop`.
    auto items = [&](std::size_t pos, std::string_view stop, std::vector<std::string>& out) {
        std::size_t start = pos;
        while (true) {
            if (pos >= tokens.size()) {
                throw bad(pos, "expected " + std::string(stop) + ", found end of input");
            }
            const auto& t = tokens[pos];
            if (t == stop || t == kSep) {
                if (pos > start) out.push_back(decode_segment(tokens, start, pos));
                if (t == stop) return pos;
                start = pos + 1;
            } else if (is_marker(t) || (!t.empty() && t[0] == '<')) {
                throw bad(pos, "unexpected marker '" + t + "'");
            }
            ++pos;
        }
    };

    DecodedParts parts;
    expect(0, kGlb);
    std::size_t pos = items(1, kCtx, parts.global);
    pos = items(pos + 1, kBol, parts.context);
    const std::size_t begin = ++pos;
    while (pos < tokens.size() && tokens[pos] != kEol) {
        if (is_marker(tokens[pos]) || tokens[pos].starts_with('<')) {
            throw bad(pos, "unexpected marker '" + tokens[pos] + "'");
        }
        ++pos;
    }
    if (pos >= tokens.size()) throw bad(pos, "expected <EOL>, found end of input");
    if (pos == begin) throw bad(pos, "empty buggy segment");
    if (pos + 1 != tokens.size()) throw bad(pos + 1, "trailing tokens after <EOL>");
    parts.buggy = decode_segment(tokens, begin, pos);
    return parts;
}

nlohmann::ordered_json to_json(const ModelInput& in) {
    nlohmann::ordered_json j;
    j["input_tokens"] = in.tokens;
    j["parts"] = {{"global", {in.global.begin, in.global.end}},
                  {"context", {in.context.begin, in.context.end}},
                  {"buggy", {in.buggy.begin, in.buggy.end}}};
    j["truncated"] = in.truncated;
    j["budget"] = in.budget;
    return j;
}

ModelInput model_input_from_json(const nlohmann::json& j) {
    ModelInput in;
    in.tokens = j.at("input_tokens").get<std::vector<std::string>>();
    auto span = [&](const char* key) {
        const auto& p = j.at("parts").at(key);
        return TokenSpan{p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>()};
    };
    in.global = span("global");
    in.context = span("context");
    in.buggy = span("buggy");
    in.truncated = j.value("truncated", false);
    in.budget = j.value("budget", kDefaultBudget);
    return in;
}

}  // namespace slicefix
