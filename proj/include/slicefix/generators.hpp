// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicefix/encoder.hpp"

namespace slicefix {

inline constexpr int kDefaultCandidates = 10;

struct CandidatePatch {
    int rank = 1;
    std::string text;
    double score = 0.0;
    std::string generator;

    friend bool operator==(const CandidatePatch&, const CandidatePatch&) = default;
};

struct GeneratorOptions {
    std::chrono::milliseconds timeout{30000};
    std::optional<std::uint64_t> seed;  // forwarded to external backends
};

class Generator {
public:
    virtual ~Generator() = default;

    virtual const std::string& name() const = 0;

    /// At most k candidates with ranks 1..n and non-increasing scores.
    /// Throws GeneratorError carrying `id`.
    virtual std::vector<CandidatePatch> generate(const std::string& id, const ModelInput& input, int k) = 0;

    /// False for external backends queried without a decoding seed.
    virtual bool deterministic() const { return true; }
};

/// Backend specs:
///   identity
///   replay:<table.json>        {"<id>": ["text", {"text": ..., "score": ...}, ...]}
///   mutate[:rule,rule...]      rules from mutation_rules()
///   cached:<candidates.jsonl>  output of the generate stage
///   cmd:<shell command>        newline-delimited JSON over the child's stdin/stdout
///   http:<url>                 one JSON POST per request
/// Throws ConfigError on an unknown or malformed spec.
std::unique_ptr<Generator> make_generator(const std::string& spec, const GeneratorOptions& opts = {});

/// Replays a candidates file under the name of the backend that wrote it.
std::unique_ptr<Generator> make_cached_generator(const std::string& path, const std::string& name);

const std::vector<std::string>& mutation_rules();

/// Candidate texts of the mutate generator, in rank order, before the k cut.
std::vector<std::string> mutate_line(const std::string& buggy, const std::vector<std::string>& rules);

nlohmann::ordered_json make_request(const std::string& id, const ModelInput& input, int k,
                                    std::optional<std::uint64_t> seed);

/// Checks a wire response against the contract and converts it. Throws
/// GeneratorError naming `id` on any violation or on an error response.
std::vector<CandidatePatch> parse_response(const nlohmann::json& response, const std::string& id, int k,
                                           const std::string& generator);

/// Contract check on an already converted list; throws GeneratorError.
void validate_candidates(const std::vector<CandidatePatch>& cands, const std::string& id, int k);

/// One line of a candidates file.
struct CandidateRecord {
    std::string id;
    std::vector<CandidatePatch> candidates;
    std::optional<std::string> error;
};

nlohmann::ordered_json to_json(const CandidateRecord& r);
CandidateRecord candidate_record_from_json(const nlohmann::json& j);

}  // namespace slicefix
