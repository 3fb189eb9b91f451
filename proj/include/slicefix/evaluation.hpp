// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace slicefix {

struct EnsembleResult;

inline constexpr int kDefaultReportK = 10;

std::vector<std::string> normalize(std::string_view line);

enum class MatchMode { Tokens, RawText };

std::string_view to_string(MatchMode m);
MatchMode match_mode_from_string(std::string_view s);  // throws ConfigError

bool exact_match(std::string_view candidate, std::string_view ground_truth, MatchMode mode = MatchMode::Tokens);

/// Ids of bugs with an exact match among their top-k final candidates.
std::set<std::string> correct_ids(const EnsembleResult& r, const std::map<std::string, std::string>& truth, int k,
                                  MatchMode mode = MatchMode::Tokens);

/// Fraction of bugs in `r` fixed within the top k; 0 for an empty result.
double fix_at_k(const EnsembleResult& r, const std::map<std::string, std::string>& truth, int k,
                MatchMode mode = MatchMode::Tokens);

enum class BugType { SimpleDelete, SimpleInsert, SimpleReplace, Mixed };

std::string_view to_string(BugType t);

struct EditOp {
    enum class Kind { Keep, Replace, Insert, Delete };
    Kind kind = Kind::Keep;
    std::size_t from = 0;  // index into the old sequence (Insert: insertion point)
    std::size_t to = 0;    // index into the new sequence (Delete: position reached)

    friend bool operator==(const EditOp&, const EditOp&) = default;
};

/// Minimal unit-cost script; among equal costs the one with the most
/// replacements, then the one whose first differing op comes leftmost in
/// the order Keep, Replace, Delete, Insert.
std::vector<EditOp> edit_script(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Throws std::invalid_argument when both lines normalize equally.
BugType classify_bug_type(std::string_view buggy, std::string_view fixed);

struct Overlap {
    std::vector<std::string> models;
    std::vector<std::vector<double>> ratio;  // ratio[i][j] = |CPi ∩ CPj| / |CPi|
    std::vector<std::size_t> unique;

    double at(const std::string& a, const std::string& b) const;
};

Overlap overlap_matrix(const std::vector<std::pair<std::string, std::set<std::string>>>& correct_sets);

struct ModelEval {
    std::string name;
    std::size_t bugs = 0;
    std::size_t unprocessed = 0;
    std::vector<double> fix_at;      // index k-1
    std::vector<std::size_t> fixed;  // index k-1
    std::set<std::string> correct;   // at K
    std::map<BugType, std::size_t> bug_types;
};

struct EvalReport {
    int K = kDefaultReportK;
    MatchMode mode = MatchMode::Tokens;
    std::vector<ModelEval> models;
    Overlap overlap;
};

struct GroundTruth {
    std::string buggy;
    std::string fixed;
};

EvalReport build_report(const std::vector<std::pair<std::string, const EnsembleResult*>>& results,
                        const std::map<std::string, GroundTruth>& truth, int K = kDefaultReportK,
                        MatchMode mode = MatchMode::Tokens);

nlohmann::ordered_json to_json(const EvalReport& r);
std::string to_markdown(const EvalReport& r);

}  // namespace slicefix
