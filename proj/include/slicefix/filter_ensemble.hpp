// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicefix/generators.hpp"

namespace slicefix {

enum class Verdict { Unaltered, Other, Correct, IncorrectOther };

std::string_view to_string(Verdict v);

/// Other/IncorrectOther depending on whether ground truth is given.
Verdict classify_candidate(const CandidatePatch& candidate, std::string_view buggy,
                           const std::optional<std::string>& ground_truth = std::nullopt);

enum class Policy { Refill, RouteBug };

std::string_view to_string(Policy p);
Policy policy_from_string(std::string_view s);  // throws ConfigError

struct EnsembleInstance {
    std::string id;
    std::string buggy;  // normalized buggy statement
    ModelInput input;
};

struct TraceStep {
    std::string generator;
    int received = 0;
    std::vector<int> unaltered;   // source ranks dropped as unaltered
    std::vector<int> duplicates;  // source ranks dropped as duplicates
    int kept = 0;
    std::optional<std::string> error;

    friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct BugResult {
    std::string id;
    bool processed = true;
    std::optional<std::string> error;
    std::vector<CandidatePatch> candidates;  // re-ranked 1..n; generator keeps provenance
    std::vector<TraceStep> trace;

    friend bool operator==(const BugResult&, const BugResult&) = default;
};

struct EnsembleResult {
    Policy policy = Policy::Refill;
    int k = kDefaultCandidates;
    std::vector<BugResult> bugs;  // sorted by id

    const BugResult* find(const std::string& id) const;
};

/// Queries `generators` in order per bug and filters unaltered and duplicate
/// candidates. Bugs are processed by `workers` threads; the result order is
/// by bug id regardless.
EnsembleResult run_pipeline(const std::vector<Generator*>& generators,
                            const std::vector<EnsembleInstance>& instances, int k, Policy policy,
                            int workers = 1);

nlohmann::ordered_json to_json(const BugResult& r, Policy policy);
BugResult bug_result_from_json(const nlohmann::json& j);

}  // namespace slicefix
