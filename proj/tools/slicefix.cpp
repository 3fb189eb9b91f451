// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "slicefix/errors.hpp"
#include "slicefix/pipeline.hpp"

namespace fs = std::filesystem;
using namespace slicefix;

namespace {

constexpr int kExitFatal = 1;
constexpr int kExitConfig = 2;

std::vector<BugInstance> load_corpus(const std::string& path) {
    auto res = ingest(path);
    for (const auto& r : res.rejected) {
        std::cerr << "rejected record " << r.record << (r.id.empty() ? "" : " (" + r.id + ")") << ": " << r.reason
                  << "\n";
    }
    return res.instances;
}

std::string default_backend() {
    const char* env = std::getenv("SLICEFIX_BACKEND");
    return env ? env : "";
}

GeneratorOptions generator_options(int timeout_ms, const std::optional<std::uint64_t>& seed) {
    GeneratorOptions o;
    o.timeout = std::chrono::milliseconds(timeout_ms);
    o.seed = seed;
    return o;
}

int cmd_split(const std::string& in, const std::string& out_dir, const std::string& ratios_text, std::uint64_t seed) {
    std::array<double, 3> ratios{};
    std::stringstream ss(ratios_text);
    std::string part;
    std::size_t n = 0;
    while (std::getline(ss, part, ',')) {
        if (n == 3) throw ConfigError("--ratios needs exactly three values");
        try {
            ratios[n++] = std::stod(part);
        } catch (const std::exception&) {
            throw ConfigError("bad ratio '" + part + "'");
        }
    }
    if (n != 3) throw ConfigError("--ratios needs exactly three values");
    const auto corpus = load_corpus(in);
    CorpusSplit split;
    try {
        split = split_by_repo(corpus, ratios, seed);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    fs::create_directories(out_dir);
    const std::array<std::pair<const char*, const std::set<std::string>*>, 3> parts{
        {{"train", &split.train}, {"valid", &split.valid}, {"test", &split.test}}};
    nlohmann::ordered_json summary;
    summary["seed"] = seed;
    summary["ratios"] = split.ratios;
    summary["shares"] = split.shares;
    summary["within_tolerance"] = split.within_tolerance;
    for (std::size_t s = 0; s < 3; ++s) {
        std::vector<BugInstance> rows;
        for (const auto& b : corpus) {
            if (parts[s].second->contains(b.id)) rows.push_back(b);
        }
        write_jsonl((fs::path(out_dir) / (std::string(parts[s].first) + ".jsonl")).string(), rows);
        summary["counts"][parts[s].first] = rows.size();
    }
    write_text((fs::path(out_dir) / "split.json").string(), summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    if (!split.within_tolerance) std::cerr << "warning: split shares exceed the 2 percentage point tolerance\n";
    return 0;
}

int cmd_parse(const std::string& in, const std::string& report, int workers) {
    const auto res = parse_stage(load_corpus(in), workers);
    std::vector<nlohmann::ordered_json> rows;
    std::size_t failed = 0;
    for (const auto& s : res.status) {
        failed += !s.ok;
        rows.push_back(to_json(s));
    }
    if (report.empty()) {
        for (const auto& r : rows) std::cout << r.dump() << "\n";
    } else {
        write_jsonl(report, rows);
    }
    std::cerr << res.parsed.size() << " parsed, " << failed << " failed\n";
    return 0;
}

int cmd_graph(const std::string& in, const std::string& id, const std::string& format, const std::string& which) {
    for (const auto& b : load_corpus(in)) {
        if (b.id != id) continue;
        const auto m = parse_method(b.method_source);
        if (which == "cfg") {
            const auto g = build_cfg(m);
            std::cout << (format == "dot" ? cfg_to_dot(g, m) : cfg_to_json(g).dump(2) + "\n");
        } else {
            const auto g = build_pdg(m);
            std::cout << (format == "dot" ? pdg_to_dot(g, m) : pdg_to_json(g, m).dump(2) + "\n");
        }
        return 0;
    }
    throw ConfigError("no instance with id '" + id + "'");
}

int cmd_extract(const std::string& in, const std::string& out, int workers) {
    const auto parsed = parse_stage(load_corpus(in), workers);
    for (const auto& s : parsed.status) {
        if (!s.ok) std::cerr << "skipping " << s.id << ": " << s.reason << "\n";
    }
    std::vector<nlohmann::ordered_json> rows;
    for (const auto& r : extract_stage(parsed.parsed, workers)) rows.push_back(to_json(r));
    write_jsonl(out, rows);
    return 0;
}

int cmd_encode(const std::string& in, const std::string& out, std::size_t budget, int workers) {
    if (budget < 16) throw ConfigError("--budget must be at least 16");
    std::vector<ContextRecord> contexts;
    for (const auto& j : read_jsonl(in)) contexts.push_back(context_record_from_json(j));
    std::vector<nlohmann::ordered_json> rows;
    for (const auto& r : encode_stage(contexts, budget, workers)) rows.push_back(to_json(r));
    write_jsonl(out, rows);
    return 0;
}

int cmd_generate(const std::string& backend, int k, const std::string& in, const std::string& out,
                 const GeneratorOptions& opts, int workers) {
    if (backend.empty()) throw ConfigError("no backend (use --backend or SLICEFIX_BACKEND)");
    if (k < 1) throw ConfigError("--k must be at least 1");
    auto gen = make_generator(backend, opts);
    std::vector<nlohmann::ordered_json> rows;
    std::size_t errors = 0;
    for (const auto& r : generate_stage(*gen, read_inputs(in), k, workers)) {
        if (r.error) {
            ++errors;
            std::cerr << *r.error << "\n";
        }
        rows.push_back(to_json(r));
    }
    write_jsonl(out, rows);
    return 0;
}

int cmd_run(const std::vector<std::string>& backend_args, const std::string& policy, int k, const std::string& in,
            const std::string& out, const GeneratorOptions& opts, int workers) {
    std::vector<std::string> specs;
    for (const auto& a : backend_args) {
        for (auto& s : split_backend_list(a)) specs.push_back(std::move(s));
    }
    if (specs.empty() && !default_backend().empty()) specs = split_backend_list(default_backend());
    if (specs.empty()) throw ConfigError("no backends (use --backends or SLICEFIX_BACKEND)");
    if (k < 1) throw ConfigError("--k must be at least 1");
    std::vector<std::unique_ptr<Generator>> owned;
    std::vector<Generator*> gens;
    for (const auto& s : specs) {
        owned.push_back(make_generator(s, opts));
        gens.push_back(owned.back().get());
    }
    const auto result =
        run_pipeline(gens, to_ensemble_instances(read_inputs(in)), k, policy_from_string(policy), workers);
    for (const auto& b : result.bugs) {
        if (!b.processed) std::cerr << "unprocessed " << b.id << ": " << b.error.value_or("") << "\n";
    }
    write_ensemble(out, result);
    return 0;
}

int cmd_eval(const std::vector<std::string>& ensembles, const std::string& truth_path, const std::string& report,
             const std::string& tables, int K, const std::string& match) {
    std::map<std::string, GroundTruth> truth;
    for (const auto& b : load_corpus(truth_path)) truth.emplace(b.id, GroundTruth{buggy_statement(b), b.fixed_line});
    std::vector<std::pair<std::string, EnsembleResult>> loaded;
    for (const auto& e : ensembles) {
        const auto eq = e.find('=');
        const std::string path = eq == std::string::npos ? e : e.substr(eq + 1);
        const std::string name = eq == std::string::npos ? fs::path(e).stem().string() : e.substr(0, eq);
        loaded.emplace_back(name, read_ensemble(path));
    }
    std::vector<std::pair<std::string, const EnsembleResult*>> views;
    for (const auto& [name, r] : loaded) views.emplace_back(name, &r);
    if (K < 1) throw ConfigError("--k must be at least 1");
    const auto rep = build_report(views, truth, K, match_mode_from_string(match));
    const auto json = to_json(rep).dump(2) + "\n";
    if (report.empty()) {
        std::cout << json;
    } else {
        write_text(report, json);
    }
    if (!tables.empty()) write_text(tables, to_markdown(rep));
    return 0;
}

int cmd_report(const std::string& config, const std::string& work_dir, int workers) {
    auto cfg = load_config(config);
    if (!work_dir.empty()) cfg.work_dir = work_dir;
    if (workers > 0) cfg.workers = workers;
    const auto outcome = run_all(cfg);
    if (!outcome.ok) {
        std::cerr << "stage " << outcome.failed_stage << " failed: " << outcome.message << "\n";
        return kExitFatal;
    }
    std::cout << to_markdown(*outcome.report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slicefix: dependency-context slicing and patch-ensemble harness for single-line bugs"};
    app.require_subcommand(1);
    app.fallthrough();
    int workers = 1;
    app.add_option("--workers", workers, "Worker threads for per-bug stages")->check(CLI::PositiveNumber);

    std::string in, out, report, tables, id, format = "dot", which = "pdg", ratios = "0.8,0.1,0.1";
    std::string out_dir, backend = default_backend(), policy = "refill", truth, config, work_dir, match = "tokens";
    std::vector<std::string> backends, ensembles;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> decode_seed;
    int k = kDefaultCandidates, report_k = kDefaultReportK, timeout_ms = 30000;
    std::size_t budget = kDefaultBudget;

    auto* split = app.add_subcommand("split", "Repository-disjoint train/valid/test split");
    split->add_option("--in", in, "Corpus (JSON Lines)")->required();
    split->add_option("--out-dir", out_dir, "Directory for train/valid/test.jsonl")->required();
    split->add_option("--ratios", ratios, "Three comma-separated fractions");
    split->add_option("--seed", seed, "Shuffle seed");

    auto* parse = app.add_subcommand("parse", "Parse every instance and report its status");
    parse->add_option("--in", in, "Corpus (JSON Lines)")->required();
    parse->add_option("--report", report, "Status file (default: stdout)");

    auto* graph = app.add_subcommand("graph", "Dump the CFG or PDG of one instance");
    graph->add_option("--in", in, "Corpus (JSON Lines)")->required();
    graph->add_option("--id", id, "Instance id")->required();
    graph->add_option("--format", format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
    graph->add_option("--graph", which, "pdg or cfg")->check(CLI::IsMember({"pdg", "cfg"}));

    auto* extract = app.add_subcommand("extract", "Slice dependency contexts");
    extract->add_option("--in", in, "Corpus (JSON Lines)")->required();
    extract->add_option("--out", out, "Contexts file")->required();

    auto* encode = app.add_subcommand("encode", "Encode contexts into model inputs");
    encode->add_option("--in", in, "Contexts file")->required();
    encode->add_option("--out", out, "Inputs file")->required();
    encode->add_option("--budget", budget, "Token budget including markers");

    auto add_backend_opts = [&](CLI::App* sub) {
        sub->add_option("--k", k, "Candidates per bug");
        sub->add_option("--timeout-ms", timeout_ms, "Per-request timeout for external backends")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", decode_seed, "Decoding seed forwarded to external backends");
    };
    auto* generate = app.add_subcommand("generate", "Query one backend for every input");
    generate->add_option("--backend", backend, "Generator spec (default: $SLICEFIX_BACKEND)");
    generate->add_option("--in", in, "Inputs file")->required();
    generate->add_option("--out", out, "Candidates file")->required();
    add_backend_opts(generate);

    auto* run = app.add_subcommand("run", "Run the filtered generator ensemble");
    run->add_option("--backends", backends, "Ordered generator specs");
    run->add_option("--policy", policy, "refill or route-bug")->check(CLI::IsMember({"refill", "route-bug"}));
    run->add_option("--in", in, "Inputs file")->required();
    run->add_option("--out", out, "Ensemble file")->required();
    add_backend_opts(run);

    auto* eval = app.add_subcommand("eval", "Exact match, Fix@k, bug types and overlap");
    eval->add_option("--ensemble", ensembles, "Ensemble file, optionally NAME=PATH; repeatable")->required();
    eval->add_option("--truth", truth, "Corpus with fixed lines")->required();
    eval->add_option("--report", report, "report.json (default: stdout)");
    eval->add_option("--tables", tables, "report.md");
    eval->add_option("--k", report_k, "Largest k in the Fix@k table");
    eval->add_option("--match", match, "tokens or raw")->check(CLI::IsMember({"tokens", "raw"}));

    auto* rep = app.add_subcommand("report", "Run every stage from a config file");
    rep->add_option("--config", config, "Pipeline config (JSON)")->required();
    rep->add_option("--work-dir", work_dir, "Override the config's work_dir");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        const auto opts = generator_options(timeout_ms, decode_seed);
        if (*split) return cmd_split(in, out_dir, ratios, seed);
        if (*parse) return cmd_parse(in, report, workers);
        if (*graph) return cmd_graph(in, id, format, which);
        if (*extract) return cmd_extract(in, out, workers);
        if (*encode) return cmd_encode(in, out, budget, workers);
        if (*generate) return cmd_generate(backend, k, in, out, opts, workers);
        if (*run) return cmd_run(backends, policy, k, in, out, opts, workers);
        if (*eval) return cmd_eval(ensembles, truth, report, tables, report_k, match);
        if (*rep) return cmd_report(config, work_dir, *app.get_option("--workers") ? workers : 0);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFatal;
    }
    return kExitFatal;
}
