// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include "slicefix/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "slicefix/errors.hpp"
#include "slicefix/lexer.hpp"

namespace slicefix {

namespace fs = std::filesystem;

namespace {

constexpr std::array kSpecKinds{"identity", "replay:", "mutate", "cached:", "cmd:", "http:"};

bool starts_spec(const std::string& s) {
    return std::any_of(kSpecKinds.begin(), kSpecKinds.end(), [&](const char* kind) {
        const std::string_view k(kind);
        if (k.back() == ':') return s.starts_with(k);
        return s == k || s.starts_with(std::string(k) + ":");
    });
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
    }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;
    ~Sha256() { EVP_MD_CTX_free(ctx_); }

    // Length-prefixed so that ("ab","c") and ("a","bc") differ.
    Sha256& add(std::string_view s) {
        const std::string len = std::to_string(s.size()) + ":";
        EVP_DigestUpdate(ctx_, len.data(), len.size());
        EVP_DigestUpdate(ctx_, s.data(), s.size());
        return *this;
    }

    std::string hex() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int n = 0;
        EVP_DigestFinal_ex(ctx_, md, &n);
        std::ostringstream out;
        for (unsigned int i = 0; i < n; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
        return out.str();
    }

private:
    EVP_MD_CTX* ctx_;
};

std::string file_digest(const std::string& path) { return Sha256().add(read_file(path)).hex(); }

nlohmann::ordered_json to_json(const SlicedStatement& s) { return {{"line", s.line}, {"text", s.text}}; }

SlicedStatement sliced_from_json(const nlohmann::json& j) {
    return SlicedStatement{j.at("line").get<int>(), j.at("text").get<std::string>()};
}

}  // namespace

// ---- config ---------------------------------------------------------------

std::string PipelineConfig::path(const std::string& explicit_path, const std::string& name) const {
    return explicit_path.empty() ? (fs::path(work_dir) / name).string() : explicit_path;
}

std::string PipelineConfig::candidates_path(std::size_t backend) const {
    return (fs::path(work_dir) / ("candidates_" + std::to_string(backend) + ".jsonl")).string();
}

std::vector<std::string> split_backend_list(const std::string& list) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto comma = list.find(',', start);
        std::string piece = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!out.empty() && !starts_spec(piece)) {
            out.back() += "," + piece;
        } else if (!piece.empty()) {
            out.push_back(std::move(piece));
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

void validate(const PipelineConfig& cfg) {
    if (cfg.corpus.empty()) throw ConfigError("config: corpus path is required");
    if (cfg.backends.empty()) throw ConfigError("config: no backends (set backends or SLICEFIX_BACKEND)");
    if (cfg.k < 1) throw ConfigError("config: k must be at least 1");
    if (cfg.report_k < 1) throw ConfigError("config: report_k must be at least 1");
    if (cfg.budget < 16) throw ConfigError("config: budget must be at least 16");
    if (cfg.workers < 1) throw ConfigError("config: workers must be at least 1");
    if (cfg.timeout_ms < 1) throw ConfigError("config: timeout_ms must be positive");
}

PipelineConfig load_config(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config " + path + " must be a JSON object");
    const fs::path base = fs::path(path).parent_path();
    auto rel = [&](const std::string& p) { return p.empty() || fs::path(p).is_absolute() ? p : (base / p).string(); };

    static const std::set<std::string> known{"corpus", "work_dir", "paths", "backends", "k", "report_k", "budget",
                                             "policy", "seed", "match", "workers", "timeout_ms"};
    PipelineConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (!known.contains(key)) throw ConfigError("config: unknown key '" + key + "'");
        }
        cfg.corpus = rel(j.at("corpus").get<std::string>());
        cfg.work_dir = rel(j.value("work_dir", cfg.work_dir));
        if (j.contains("paths")) {
            const auto& p = j["paths"];
            cfg.contexts = rel(p.value("contexts", ""));
            cfg.inputs = rel(p.value("inputs", ""));
            cfg.ensemble = rel(p.value("ensemble", ""));
            cfg.report = rel(p.value("report", ""));
            cfg.tables = rel(p.value("tables", ""));
        }
        if (j.contains("backends")) {
            for (const auto& b : j["backends"]) {
                auto spec = b.get<std::string>();
                // file arguments of replay/cached specs are config-relative too
                for (const char* kind : {"replay:", "cached:"}) {
                    if (spec.starts_with(kind)) spec = kind + rel(spec.substr(std::strlen(kind)));
                }
                cfg.backends.push_back(std::move(spec));
            }
        }
        cfg.k = j.value("k", cfg.k);
        cfg.report_k = j.value("report_k", cfg.report_k);
        cfg.budget = j.value("budget", cfg.budget);
        cfg.policy = policy_from_string(j.value("policy", std::string(to_string(cfg.policy))));
        cfg.seed = j.value("seed", cfg.seed);
        cfg.match = match_mode_from_string(j.value("match", std::string(to_string(cfg.match))));
        cfg.workers = j.value("workers", cfg.workers);
        cfg.timeout_ms = j.value("timeout_ms", cfg.timeout_ms);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    if (cfg.backends.empty()) {
        if (const char* env = std::getenv("SLICEFIX_BACKEND"); env && *env) cfg.backends = split_backend_list(env);
    }
    validate(cfg);
    return cfg;
}

// ---- helpers --------------------------------------------------------------

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(mu);
                        if (!failure) failure = std::current_exception();
                        next = n;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::vector<nlohmann::json> rows;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            rows.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw IoError(path + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return rows;
}

void write_text(const std::string& path, const std::string& text) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("error writing " + path);
}

void write_jsonl(const std::string& path, const std::vector<nlohmann::ordered_json>& rows) {
    std::string text;
    for (const auto& r : rows) text += r.dump() + "\n";
    write_text(path, text);
}

// ---- stages ---------------------------------------------------------------

nlohmann::ordered_json to_json(const ParseStatus& s) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["status"] = s.ok ? "ok" : "failed";
    if (!s.ok) {
        if (s.line >= 0) j["line"] = s.line;
        j["reason"] = s.reason;
    }
    return j;
}

ParseStageResult parse_stage(const std::vector<BugInstance>& corpus, int workers) {
    std::vector<std::optional<ParsedInstance>> slots(corpus.size());
    ParseStageResult out;
    out.status.resize(corpus.size());
    parallel_for(corpus.size(), workers, [&](std::size_t i) {
        const auto& bug = corpus[i];
        ParseStatus& st = out.status[i];
        st.id = bug.id;
        try {
            ParsedInstance p{bug, parse_method(bug.method_source), {}, StatementId{bug.buggy_line}, {}};
            p.cls = extract_class_context(bug.class_source, p.method.name);
            const Statement* s = p.method.find(p.buggy);
            if (!s || !s->is_node()) {
                throw ParseFailure("buggy line is not a statement", bug.buggy_line);
            }
            p.pdg = build_pdg(p.method);
            slots[i] = std::move(p);
        } catch (const ParseFailure& e) {
            st.ok = false;
            st.line = e.line();
            st.reason = e.reason();
        } catch (const StructuralError& e) {
            st.ok = false;
            st.reason = e.what();
        }
    });
    for (auto& s : slots) {
        if (s) out.parsed.push_back(std::move(*s));
    }
    return out;
}

std::vector<ContextRecord> extract_stage(const std::vector<ParsedInstance>& parsed, int workers) {
    std::vector<ContextRecord> out(parsed.size());
    parallel_for(parsed.size(), workers, [&](std::size_t i) {
        const auto& p = parsed[i];
        out[i] = ContextRecord{p.bug.id, extract_dependency_context(p.pdg, p.method, p.cls, p.buggy)};
    });
    return out;
}

nlohmann::ordered_json to_json(const ContextRecord& r) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["buggy"] = to_json(r.context.buggy);
    j["intra"] = nlohmann::ordered_json::array();
    for (const auto& s : r.context.intra) j["intra"].push_back(to_json(s));
    j["global"] = nlohmann::ordered_json::array();
    for (const auto& g : r.context.global) {
        j["global"].push_back({{"kind", g.kind == GlobalItem::Kind::Field ? "field" : "method"},
                               {"name", g.name},
                               {"text", g.text}});
    }
    return j;
}

ContextRecord context_record_from_json(const nlohmann::json& j) {
    ContextRecord r;
    r.id = j.at("id").get<std::string>();
    r.context.buggy = sliced_from_json(j.at("buggy"));
    for (const auto& s : j.at("intra")) r.context.intra.push_back(sliced_from_json(s));
    for (const auto& g : j.at("global")) {
        const auto kind = g.at("kind").get<std::string>();
        if (kind != "field" && kind != "method") throw MalformedInput("unknown global kind '" + kind + "'", 0);
        r.context.global.push_back(GlobalItem{kind == "field" ? GlobalItem::Kind::Field : GlobalItem::Kind::Method,
                                              g.at("name").get<std::string>(), g.at("text").get<std::string>()});
    }
    return r;
}

std::vector<InputRecord> encode_stage(const std::vector<ContextRecord>& contexts, std::size_t budget, int workers) {
    std::vector<InputRecord> out(contexts.size());
    parallel_for(contexts.size(), workers, [&](std::size_t i) {
        const auto& c = contexts[i];
        out[i] = InputRecord{c.id, c.context.buggy.text, encode_input(c.context, budget)};
    });
    return out;
}

nlohmann::ordered_json to_json(const InputRecord& r) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["buggy"] = r.buggy;
    const auto input = to_json(r.input);
    for (const auto& [key, value] : input.items()) j[key] = value;
    return j;
}

InputRecord input_record_from_json(const nlohmann::json& j) {
    return InputRecord{j.at("id").get<std::string>(), j.at("buggy").get<std::string>(), model_input_from_json(j)};
}

std::vector<CandidateRecord> generate_stage(Generator& g, const std::vector<InputRecord>& inputs, int k,
                                            int workers) {
    std::vector<CandidateRecord> out(inputs.size());
    parallel_for(inputs.size(), workers, [&](std::size_t i) {
        const auto& in = inputs[i];
        out[i].id = in.id;
        try {
            out[i].candidates = g.generate(in.id, in.input, k);
            validate_candidates(out[i].candidates, in.id, k);
        } catch (const GeneratorError& e) {
            out[i].candidates.clear();
            out[i].error = e.what();
        }
    });
    return out;
}

std::vector<EnsembleInstance> to_ensemble_instances(const std::vector<InputRecord>& inputs) {
    std::vector<EnsembleInstance> out;
    out.reserve(inputs.size());
    for (const auto& r : inputs) out.push_back(EnsembleInstance{r.id, r.buggy, r.input});
    return out;
}

std::vector<InputRecord> read_inputs(const std::string& path) {
    std::vector<InputRecord> out;
    for (const auto& j : read_jsonl(path)) out.push_back(input_record_from_json(j));
    return out;
}

void write_ensemble(const std::string& path, const EnsembleResult& r) {
    std::vector<nlohmann::ordered_json> rows;
    for (const auto& b : r.bugs) {
        auto j = to_json(b, r.policy);
        j["k"] = r.k;
        rows.push_back(std::move(j));
    }
    write_jsonl(path, rows);
}

EnsembleResult read_ensemble(const std::string& path) {
    EnsembleResult r;
    bool first = true;
    for (const auto& j : read_jsonl(path)) {
        if (first) {
            r.policy = policy_from_string(j.value("policy", "refill"));
            r.k = j.value("k", kDefaultCandidates);
            first = false;
        }
        r.bugs.push_back(bug_result_from_json(j));
    }
    std::stable_sort(r.bugs.begin(), r.bugs.end(), [](const BugResult& a, const BugResult& b) { return a.id < b.id; });
    return r;
}

// ---- run_all ----------------------------------------------------------------

namespace {

class Runner {
public:
    explicit Runner(const PipelineConfig& cfg) : cfg_(cfg) {}

    RunOutcome run() {
        validate(cfg_);
        for (const auto& spec : cfg_.backends) {
            GeneratorOptions opts;
            opts.timeout = std::chrono::milliseconds(cfg_.timeout_ms);
            opts.seed = cfg_.seed;
            generators_.push_back(make_generator(spec, opts));
        }
        fs::create_directories(cfg_.work_dir);
        fs::create_directories(stamp_dir());
        write_text(events_path(), "");
        fs::remove(failure_path());

        RunOutcome out;
        std::string stage = "ingest";
        try {
            corpus_stamp_ = file_digest(cfg_.corpus);
            const auto ingested = ingest(cfg_.corpus);
            corpus_ = ingested.instances;
            rejected_ = ingested.rejected;
            stage = "parse";
            stage_parse();
            stage = "graph";
            stage_graph();
            stage = "extract";
            stage_extract();
            stage = "encode";
            stage_encode();
            for (std::size_t i = 0; i < generators_.size(); ++i) {
                stage = "generate_" + std::to_string(i + 1);
                stage_generate(i);
            }
            stage = "filter";
            stage_filter();
            stage = "eval";
            out.report = stage_eval();
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            out.ok = false;
            out.failed_stage = stage;
            out.message = e.what();
            event(stage, "failed", {{"message", e.what()}});
            nlohmann::ordered_json f;
            f["stage"] = stage;
            f["message"] = e.what();
            f["completed"] = completed_;
            write_text(failure_path(), f.dump(2) + "\n");
        }
        return out;
    }

private:
    std::string stamp_dir() const { return (fs::path(cfg_.work_dir) / "stamps").string(); }
    std::string events_path() const { return (fs::path(cfg_.work_dir) / "events.jsonl").string(); }
    std::string failure_path() const { return (fs::path(cfg_.work_dir) / "failure.json").string(); }
    std::string work(const std::string& name) const { return (fs::path(cfg_.work_dir) / name).string(); }
    std::string single_ensemble_path(std::size_t i) const { return work("ensemble_" + std::to_string(i + 1) + ".jsonl"); }

    void event(const std::string& stage, const std::string& what, nlohmann::ordered_json detail = {}) {
        nlohmann::ordered_json j;
        j["seq"] = seq_++;
        j["stage"] = stage;
        j["event"] = what;
        if (!detail.is_null()) j["detail"] = std::move(detail);
        std::ofstream(events_path(), std::ios::app) << j.dump() << '\n';
    }

    // Runs `body` unless the stamp on disk matches and every output exists.
    std::string staged(const std::string& stage, const std::string& stamp_input, const std::vector<std::string>& outputs,
                       const std::function<nlohmann::ordered_json()>& body) {
        Sha256 h;
        h.add(stage).add(stamp_input);
        for (const auto& o : outputs) h.add(o);
        const std::string stamp = h.hex();
        const auto stamp_file = (fs::path(stamp_dir()) / (stage + ".sha256")).string();
        const bool fresh = fs::exists(stamp_file) &&
                           std::all_of(outputs.begin(), outputs.end(), [](const std::string& p) { return fs::exists(p); }) &&
                           read_file(stamp_file) == stamp + "\n";
        if (fresh) {
            event(stage, "skipped", {{"stamp", stamp}});
        } else {
            fs::remove(stamp_file);
            event(stage, "start");
            const auto t0 = std::chrono::steady_clock::now();
            auto detail = body();
            detail["elapsed_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                       std::chrono::steady_clock::now() - t0).count();
            write_text(stamp_file, stamp + "\n");
            event(stage, "done", std::move(detail));
        }
        completed_.push_back(stage);
        return stamp;
    }

    const ParseStageResult& parsed() {
        if (!parsed_) parsed_ = parse_stage(corpus_, cfg_.workers);
        return *parsed_;
    }

    void stage_parse() {
        parse_stamp_ = staged("parse", corpus_stamp_, {work("parse_status.jsonl")}, [&] {
            std::vector<nlohmann::ordered_json> rows;
            for (const auto& r : rejected_) {
                nlohmann::ordered_json j;
                j["id"] = r.id;
                j["status"] = "rejected";
                j["record"] = r.record;
                j["reason"] = r.reason;
                rows.push_back(std::move(j));
            }
            std::size_t failed = 0;
            for (const auto& s : parsed().status) {
                failed += !s.ok;
                rows.push_back(to_json(s));
            }
            write_jsonl(work("parse_status.jsonl"), rows);
            return nlohmann::ordered_json{{"instances", corpus_.size()},
                                          {"rejected", rejected_.size()},
                                          {"parse_failures", failed}};
        });
    }

    void stage_graph() {
        staged("graph", parse_stamp_, {work("graphs.jsonl")}, [&] {
            std::vector<nlohmann::ordered_json> rows;
            for (const auto& p : parsed().parsed) {
                nlohmann::ordered_json j;
                j["id"] = p.bug.id;
                j["pdg"] = pdg_to_json(p.pdg, p.method);
                rows.push_back(std::move(j));
            }
            write_jsonl(work("graphs.jsonl"), rows);
            return nlohmann::ordered_json{{"graphs", rows.size()}};
        });
    }

    void stage_extract() {
        const auto out = cfg_.path(cfg_.contexts, "contexts.jsonl");
        extract_stamp_ = staged("extract", parse_stamp_, {out}, [&] {
            std::vector<nlohmann::ordered_json> rows;
            for (const auto& r : extract_stage(parsed().parsed, cfg_.workers)) rows.push_back(to_json(r));
            write_jsonl(out, rows);
            return nlohmann::ordered_json{{"contexts", rows.size()}};
        });
    }

    void stage_encode() {
        const auto in = cfg_.path(cfg_.contexts, "contexts.jsonl");
        const auto out = cfg_.path(cfg_.inputs, "inputs.jsonl");
        encode_stamp_ = staged("encode", extract_stamp_ + std::to_string(cfg_.budget), {out}, [&] {
            std::vector<ContextRecord> contexts;
            for (const auto& j : read_jsonl(in)) contexts.push_back(context_record_from_json(j));
            std::vector<ContextRecord> fits;
            std::vector<nlohmann::ordered_json> dropped;
            for (auto& c : contexts) {
                if (lex_texts(c.context.buggy.text).size() + 4 > cfg_.budget) {
                    dropped.push_back(c.id);
                } else {
                    fits.push_back(std::move(c));
                }
            }
            std::vector<nlohmann::ordered_json> rows;
            std::size_t truncated = 0;
            for (const auto& r : encode_stage(fits, cfg_.budget, cfg_.workers)) {
                truncated += r.input.truncated;
                rows.push_back(to_json(r));
            }
            write_jsonl(out, rows);
            return nlohmann::ordered_json{{"inputs", rows.size()}, {"truncated", truncated}, {"over_budget", dropped}};
        });
    }

    void stage_generate(std::size_t i) {
        const auto in = cfg_.path(cfg_.inputs, "inputs.jsonl");
        const auto out = cfg_.candidates_path(i + 1);
        const auto& spec = cfg_.backends[i];
        std::string key = encode_stamp_ + spec + "|" + std::to_string(cfg_.k) + "|" + std::to_string(cfg_.seed);
        for (const char* kind : {"replay:", "cached:"}) {
            if (spec.starts_with(kind)) key += file_digest(spec.substr(std::strlen(kind)));
        }
        generate_stamps_ += staged("generate_" + std::to_string(i + 1), key, {out}, [&] {
            const auto inputs = read_inputs(in);
            std::vector<nlohmann::ordered_json> rows;
            std::size_t errors = 0;
            for (const auto& r : generate_stage(*generators_[i], inputs, cfg_.k, cfg_.workers)) {
                errors += r.error.has_value();
                rows.push_back(to_json(r));
            }
            write_jsonl(out, rows);
            return nlohmann::ordered_json{{"backend", spec},
                                          {"deterministic", generators_[i]->deterministic()},
                                          {"requests", rows.size()},
                                          {"errors", errors}};
        });
    }

    void stage_filter() {
        const auto out = cfg_.path(cfg_.ensemble, "ensemble.jsonl");
        std::vector<std::string> outputs{out};
        if (generators_.size() > 1) {
            for (std::size_t i = 0; i < generators_.size(); ++i) outputs.push_back(single_ensemble_path(i));
        }
        filter_stamp_ = staged("filter", generate_stamps_ + std::string(to_string(cfg_.policy)) + std::to_string(cfg_.k),
                               outputs, [&] {
            const auto instances = to_ensemble_instances(read_inputs(cfg_.path(cfg_.inputs, "inputs.jsonl")));
            std::vector<std::unique_ptr<Generator>> cached;
            std::vector<Generator*> gens;
            for (std::size_t i = 0; i < generators_.size(); ++i) {
                cached.push_back(make_cached_generator(cfg_.candidates_path(i + 1), cfg_.backends[i]));
                gens.push_back(cached.back().get());
            }
            const auto result = run_pipeline(gens, instances, cfg_.k, cfg_.policy, cfg_.workers);
            write_ensemble(out, result);
            if (gens.size() > 1) {
                for (std::size_t i = 0; i < gens.size(); ++i) {
                    write_ensemble(single_ensemble_path(i),
                                   run_pipeline({gens[i]}, instances, cfg_.k, cfg_.policy, cfg_.workers));
                }
            }
            const auto unprocessed = std::count_if(result.bugs.begin(), result.bugs.end(),
                                                   [](const BugResult& b) { return !b.processed; });
            return nlohmann::ordered_json{{"policy", to_string(cfg_.policy)},
                                          {"bugs", result.bugs.size()},
                                          {"unprocessed", unprocessed}};
        });
    }

    EvalReport stage_eval() {
        const auto report = cfg_.path(cfg_.report, "report.json");
        const auto tables = cfg_.path(cfg_.tables, "report.md");
        std::map<std::string, GroundTruth> truth;
        for (const auto& b : corpus_) truth.emplace(b.id, GroundTruth{buggy_statement(b), b.fixed_line});

        std::vector<std::pair<std::string, EnsembleResult>> loaded;
        if (generators_.size() > 1) {
            for (std::size_t i = 0; i < generators_.size(); ++i) {
                loaded.emplace_back(cfg_.backends[i], read_ensemble(single_ensemble_path(i)));
            }
            loaded.emplace_back("ensemble", read_ensemble(cfg_.path(cfg_.ensemble, "ensemble.jsonl")));
        } else {
            loaded.emplace_back(cfg_.backends[0], read_ensemble(cfg_.path(cfg_.ensemble, "ensemble.jsonl")));
        }
        std::vector<std::pair<std::string, const EnsembleResult*>> views;
        for (const auto& [name, r] : loaded) views.emplace_back(name, &r);
        EvalReport rep = build_report(views, truth, cfg_.report_k, cfg_.match);

        staged("eval", filter_stamp_ + corpus_stamp_ + std::to_string(cfg_.report_k) + std::string(to_string(cfg_.match)),
               {report, tables}, [&] {
                   write_text(report, to_json(rep).dump(2) + "\n");
                   write_text(tables, to_markdown(rep));
                   return nlohmann::ordered_json{{"models", rep.models.size()}};
               });
        return rep;
    }

    const PipelineConfig& cfg_;
    std::vector<std::unique_ptr<Generator>> generators_;
    std::vector<BugInstance> corpus_;
    std::vector<Rejection> rejected_;
    std::optional<ParseStageResult> parsed_;
    std::string corpus_stamp_, parse_stamp_, extract_stamp_, encode_stamp_, generate_stamps_, filter_stamp_;
    std::vector<std::string> completed_;
    std::size_t seq_ = 0;
};

}  // namespace

RunOutcome run_all(const PipelineConfig& cfg) { return Runner(cfg).run(); }

}  // namespace slicefix
