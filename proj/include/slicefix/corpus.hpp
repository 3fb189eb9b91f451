// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace slicefix {

struct BugInstance {
    std::string id;
    std::string repo;
    std::optional<std::string> class_source;
    std::string method_source;
    int buggy_line = 0;  // 0-based over the normalized method lines
    std::string fixed_line;
    std::string benchmark;

    friend bool operator==(const BugInstance&, const BugInstance&) = default;
};

nlohmann::ordered_json to_json(const BugInstance& b);
BugInstance bug_instance_from_json(const nlohmann::json& j);  // throws nlohmann::json::exception

struct Rejection {
    std::size_t record = 0;  // 1-based line number in the input file
    std::string id;          // empty when the record has no readable id
    std::string reason;
};

struct IngestResult {
    std::vector<BugInstance> instances;
    std::vector<Rejection> rejected;
};

/// Normalized buggy statement text; throws ParseFailure / std::out_of_range.
std::string buggy_statement(const BugInstance& b);

/// Empty when valid, else the reason.
std::string validate(const BugInstance& b);

/// Supported format: "jsonl". Throws IoError when the file cannot be read
/// and ConfigError on an unknown format.
IngestResult ingest(const std::string& path, std::string_view format = "jsonl");

void write_jsonl(const std::string& path, const std::vector<BugInstance>& instances);

struct CorpusSplit {
    std::set<std::string> train;
    std::set<std::string> valid;
    std::set<std::string> test;
    std::array<double, 3> ratios{0.8, 0.1, 0.1};
    std::uint64_t seed = 0;
    std::array<double, 3> shares{};  // achieved instance shares
    bool within_tolerance = true;    // every |share - ratio| <= 0.02
};

inline constexpr double kSplitTolerance = 0.02;

/// Repository-disjoint split. Throws std::invalid_argument on bad ratios, an
/// empty corpus, or a single repository facing three nonzero ratios.
CorpusSplit split_by_repo(const std::vector<BugInstance>& corpus, std::array<double, 3> ratios, std::uint64_t seed);

}  // namespace slicefix
