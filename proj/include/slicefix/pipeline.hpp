// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicefix/corpus.hpp"
#include "slicefix/depgraph.hpp"
#include "slicefix/encoder.hpp"
#include "slicefix/evaluation.hpp"
#include "slicefix/filter_ensemble.hpp"
#include "slicefix/java_frontend.hpp"
#include "slicefix/slicer.hpp"

namespace slicefix {

struct PipelineConfig {
    std::string corpus;
    std::string work_dir = "slicefix-out";
    // Artifact paths; empty means <work_dir>/<default name>.
    std::string contexts;
    std::string inputs;
    std::string ensemble;
    std::string report;
    std::string tables;
    std::vector<std::string> backends;
    int k = kDefaultCandidates;
    int report_k = kDefaultReportK;
    std::size_t budget = kDefaultBudget;
    Policy policy = Policy::Refill;
    std::uint64_t seed = 0;
    MatchMode match = MatchMode::Tokens;
    int workers = 1;
    int timeout_ms = 30000;

    std::string path(const std::string& explicit_path, const std::string& name) const;
    std::string candidates_path(std::size_t backend) const;  // 1-based
};

/// Reads a JSON config; paths inside it are relative to the config file.
/// Missing backends fall back to $SLICEFIX_BACKEND. Throws ConfigError.
PipelineConfig load_config(const std::string& path);
void validate(const PipelineConfig& cfg);  // throws ConfigError

/// Splits "a,b,mutate:eq,rel" into specs, keeping commas that belong to a
/// spec argument.
std::vector<std::string> split_backend_list(const std::string& list);

struct ParsedInstance {
    BugInstance bug;
    MethodAst method;
    ClassContext cls;
    StatementId buggy;
    Pdg pdg;
};

struct ParseStatus {
    std::string id;
    bool ok = true;
    int line = -1;
    std::string reason;
};

struct ParseStageResult {
    std::vector<ParsedInstance> parsed;  // corpus order
    std::vector<ParseStatus> status;     // one per instance
};

ParseStageResult parse_stage(const std::vector<BugInstance>& corpus, int workers = 1);

nlohmann::ordered_json to_json(const ParseStatus& s);

struct ContextRecord {
    std::string id;
    SliceContext context;
};

std::vector<ContextRecord> extract_stage(const std::vector<ParsedInstance>& parsed, int workers = 1);

nlohmann::ordered_json to_json(const ContextRecord& r);
ContextRecord context_record_from_json(const nlohmann::json& j);

struct InputRecord {
    std::string id;
    std::string buggy;
    ModelInput input;
};

std::vector<InputRecord> encode_stage(const std::vector<ContextRecord>& contexts, std::size_t budget,
                                      int workers = 1);

nlohmann::ordered_json to_json(const InputRecord& r);
InputRecord input_record_from_json(const nlohmann::json& j);

std::vector<CandidateRecord> generate_stage(Generator& g, const std::vector<InputRecord>& inputs, int k,
                                            int workers = 1);

std::vector<EnsembleInstance> to_ensemble_instances(const std::vector<InputRecord>& inputs);

/// Runs `fn(i)` for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// JSON Lines helpers; both throw IoError.
std::vector<nlohmann::json> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const std::vector<nlohmann::ordered_json>& rows);
void write_text(const std::string& path, const std::string& text);

std::vector<InputRecord> read_inputs(const std::string& path);
void write_ensemble(const std::string& path, const EnsembleResult& r);
EnsembleResult read_ensemble(const std::string& path);

struct RunOutcome {
    bool ok = true;
    std::string failed_stage;
    std::string message;
    std::optional<EvalReport> report;
};

/// parse -> graph -> extract -> encode -> generate -> filter -> eval, each
/// stage persisted under the work dir and skipped when its stamp matches.
/// A failing stage writes failure.json and stops the run. Throws
/// ConfigError for an invalid config.
RunOutcome run_all(const PipelineConfig& cfg);

}  // namespace slicefix
