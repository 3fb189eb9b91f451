// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include "slicefix/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>

#include "slicefix/errors.hpp"
#include "slicefix/evaluation.hpp"
#include "slicefix/java_frontend.hpp"

namespace slicefix {

namespace {

// Uniform draw in [0, n) by rejection; std::uniform_int_distribution is
// implementation-defined and would make splits differ across toolchains.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = 0;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

}  // namespace

nlohmann::ordered_json to_json(const BugInstance& b) {
    nlohmann::ordered_json j;
    j["id"] = b.id;
    j["repo"] = b.repo;
    j["class_source"] = b.class_source ? nlohmann::ordered_json(*b.class_source) : nlohmann::ordered_json(nullptr);
    j["method_source"] = b.method_source;
    j["buggy_line"] = b.buggy_line;
    j["fixed_line"] = b.fixed_line;
    j["benchmark"] = b.benchmark;
    return j;
}

BugInstance bug_instance_from_json(const nlohmann::json& j) {
    BugInstance b;
    b.id = j.at("id").get<std::string>();
    b.repo = j.at("repo").get<std::string>();
    if (j.contains("class_source") && !j["class_source"].is_null()) b.class_source = j["class_source"].get<std::string>();
    b.method_source = j.at("method_source").get<std::string>();
    b.buggy_line = j.at("buggy_line").get<int>();
    b.fixed_line = j.at("fixed_line").get<std::string>();
    b.benchmark = j.at("benchmark").get<std::string>();
    return b;
}

std::string buggy_statement(const BugInstance& b) {
    const auto lines = normalize_method_lines(b.method_source);
    if (b.buggy_line < 0 || static_cast<std::size_t>(b.buggy_line) >= lines.size()) {
        throw std::out_of_range("buggy_line " + std::to_string(b.buggy_line) + " outside a method of " +
                                std::to_string(lines.size()) + " lines");
    }
    if (b.buggy_line == 0 || static_cast<std::size_t>(b.buggy_line) + 1 == lines.size()) {
        throw std::out_of_range("buggy_line " + std::to_string(b.buggy_line) + " is the method header or closing brace");
    }
    return lines[static_cast<std::size_t>(b.buggy_line)];
}

std::string validate(const BugInstance& b) {
    if (b.id.empty()) return "empty id";
    if (b.repo.empty()) return "empty repo";
    std::string buggy;
    try {
        buggy = buggy_statement(b);
    } catch (const std::out_of_range& e) {
        return e.what();
    } catch (const ParseFailure& e) {
        return std::string("method layout failed: ") + e.what();
    }
    if (normalize(buggy) == normalize(b.fixed_line)) return "fixed line equals buggy line";
    return {};
}

IngestResult ingest(const std::string& path, std::string_view format) {
    if (format != "jsonl") throw ConfigError("unsupported corpus format '" + std::string(format) + "'");
    std::ifstream in(path);
    if (!in) throw IoError("cannot read corpus " + path);
    IngestResult out;
    std::set<std::string> ids;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        BugInstance b;
        try {
            b = bug_instance_from_json(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            out.rejected.push_back({n, "", std::string("malformed record: ") + e.what()});
            continue;
        }
        if (auto why = validate(b); !why.empty()) {
            out.rejected.push_back({n, b.id, why});
            continue;
        }
        if (!ids.insert(b.id).second) {
            out.rejected.push_back({n, b.id, "duplicate id"});
            continue;
        }
        out.instances.push_back(std::move(b));
    }
    if (in.bad()) throw IoError("error reading corpus " + path);
    return out;
}

void write_jsonl(const std::string& path, const std::vector<BugInstance>& instances) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& b : instances) out << to_json(b).dump() << '\n';
    if (!out) throw IoError("error writing " + path);
}

CorpusSplit split_by_repo(const std::vector<BugInstance>& corpus, std::array<double, 3> ratios, std::uint64_t seed) {
    if (corpus.empty()) throw std::invalid_argument("cannot split an empty corpus");
    double sum = 0;
    for (double r : ratios) {
        if (!(r >= 0)) throw std::invalid_argument("split ratios must be non-negative");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("split ratios must sum to 1");

    std::map<std::string, std::vector<std::string>> by_repo;
    for (const auto& b : corpus) by_repo[b.repo].push_back(b.id);
    const auto nonzero = std::count_if(ratios.begin(), ratios.end(), [](double r) { return r > 0; });
    if (by_repo.size() == 1 && nonzero == 3) {
        throw std::invalid_argument("a single repository cannot be split three ways without leakage");
    }

    std::vector<const std::pair<const std::string, std::vector<std::string>>*> repos;
    for (const auto& kv : by_repo) repos.push_back(&kv);
    std::mt19937_64 rng(seed);
    for (std::size_t i = repos.size(); i > 1; --i) {
        std::swap(repos[i - 1], repos[static_cast<std::size_t>(bounded(rng, i))]);
    }

    CorpusSplit out;
    out.ratios = ratios;
    out.seed = seed;
    std::array<std::set<std::string>*, 3> bins{&out.train, &out.valid, &out.test};
    std::array<std::size_t, 3> count{};
    const auto total = static_cast<double>(corpus.size());
    for (const auto* repo : repos) {
        std::size_t pick = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < 3; ++s) {
            if (ratios[s] <= 0) continue;
            const double deficit = ratios[s] * total - static_cast<double>(count[s]);
            if (deficit > best) {
                best = deficit;
                pick = s;
            }
        }
        bins[pick]->insert(repo->second.begin(), repo->second.end());
        count[pick] += repo->second.size();
    }
    for (std::size_t s = 0; s < 3; ++s) {
        out.shares[s] = static_cast<double>(count[s]) / total;
        if (std::abs(out.shares[s] - ratios[s]) > kSplitTolerance + 1e-12) out.within_tolerance = false;
    }
    return out;
}

}  // namespace slicefix
