// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicefix/slicer.hpp"

namespace slicefix {

inline constexpr std::string_view kGlb = "<GLB>";
inline constexpr std::string_view kCtx = "<CTX>";
inline constexpr std::string_view kBol = "<BOL>";
inline constexpr std::string_view kEol = "<EOL>";
inline constexpr std::string_view kSep = "<SEP>";
inline constexpr std::size_t kDefaultBudget = 512;

bool is_marker(std::string_view token);

// Content tokens that could be read as a marker get one extra leading
// backslash: `<` -> `\<`, `\<` -> `\\<`.
std::string escape_token(std::string_view token);
std::string unescape_token(std::string_view token);

struct TokenSpan {
    std::size_t begin = 0;  // token offsets into ModelInput::tokens, end exclusive
    std::size_t end = 0;

    friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

/// Sequence layout: <GLB> (g+ <SEP>)* <CTX> (c+ <SEP>)* <BOL> b+ <EOL>
struct ModelInput {
    std::vector<std::string> tokens;
    TokenSpan global;   // between <GLB> and <CTX>
    TokenSpan context;  // between <CTX> and <BOL>
    TokenSpan buggy;    // between <BOL> and <EOL>
    bool truncated = false;
    std::size_t budget = kDefaultBudget;

    std::string text() const;  // tokens joined by single spaces
};

struct DecodedParts {
    std::vector<std::string> global;
    std::vector<std::string> context;
    std::string buggy;

    friend bool operator==(const DecodedParts&, const DecodedParts&) = default;
};

/// Throws std::invalid_argument when the budget cannot hold the buggy line
/// plus the four mandatory markers.
ModelInput encode_input(const SliceContext& sc, std::size_t budget = kDefaultBudget);

/// Throws MalformedInput at the first position violating the grammar.
DecodedParts decode_parts(const std::vector<std::string>& tokens);

nlohmann::ordered_json to_json(const ModelInput& in);
ModelInput model_input_from_json(const nlohmann::json& j);

}  // namespace slicefix
