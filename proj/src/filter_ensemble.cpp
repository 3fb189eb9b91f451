// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include "slicefix/filter_ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include "slicefix/errors.hpp"
#include "slicefix/evaluation.hpp"

namespace slicefix {

namespace {

using TokenSeq = std::vector<std::string>;

// Drops unaltered candidates and those already in `seen`; fills `step`.
std::vector<CandidatePatch> filter(const std::vector<CandidatePatch>& in, const TokenSeq& buggy,
                                   std::vector<TokenSeq>& seen, TraceStep& step) {
    std::vector<CandidatePatch> out;
    step.received = static_cast<int>(in.size());
    for (const auto& c : in) {
        auto toks = normalize(c.text);
        if (toks == buggy) {
            step.unaltered.push_back(c.rank);
        } else if (std::find(seen.begin(), seen.end(), toks) != seen.end()) {
            step.duplicates.push_back(c.rank);
        } else {
            seen.push_back(std::move(toks));
            out.push_back(c);
        }
    }
    step.kept = static_cast<int>(out.size());
    return out;
}

std::vector<CandidatePatch> query(Generator& g, const EnsembleInstance& inst, int k, TraceStep& step) {
    step.generator = g.name();
    auto cands = g.generate(inst.id, inst.input, k);
    validate_candidates(cands, inst.id, k);
    return cands;
}

BugResult process(const std::vector<Generator*>& gens, const EnsembleInstance& inst, int k, Policy policy) {
    BugResult r;
    r.id = inst.id;
    const TokenSeq buggy = normalize(inst.buggy);
    std::vector<CandidatePatch> list;
    try {
        if (policy == Policy::Refill) {
            std::vector<TokenSeq> seen;
            bool dropped = false;
            for (std::size_t g = 0; g < gens.size(); ++g) {
                if (g > 0 && (!dropped || static_cast<int>(list.size()) >= k)) break;
                r.trace.emplace_back();
                auto kept = filter(query(*gens[g], inst, k, r.trace.back()), buggy, seen, r.trace.back());
                dropped = dropped || !r.trace.back().unaltered.empty() || !r.trace.back().duplicates.empty();
                const auto room = static_cast<std::size_t>(k) - list.size();
                if (kept.size() > room) {
                    r.trace.back().kept = static_cast<int>(room);
                    kept.resize(room);
                }
                list.insert(list.end(), kept.begin(), kept.end());
            }
        } else {
            for (std::size_t g = 0; g < gens.size(); ++g) {
                r.trace.emplace_back();
                auto cands = query(*gens[g], inst, k, r.trace.back());
                std::vector<TokenSeq> seen;
                list = filter(cands, buggy, seen, r.trace.back());
                const bool rank1_unaltered = !cands.empty() && normalize(cands.front().text) == buggy;
                if (!rank1_unaltered) break;
            }
        }
    } catch (const Error& e) {
        r.processed = false;
        r.error = e.what();
        if (!r.trace.empty()) r.trace.back().error = e.what();
        list.clear();
    }
    for (std::size_t i = 0; i < list.size(); ++i) list[i].rank = static_cast<int>(i) + 1;
    r.candidates = std::move(list);
    return r;
}

}  // namespace

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Unaltered: return "UNALTERED";
        case Verdict::Other: return "OTHER";
        case Verdict::Correct: return "CORRECT";
        case Verdict::IncorrectOther: return "INCORRECT_OTHER";
    }
    return "?";
}

Verdict classify_candidate(const CandidatePatch& candidate, std::string_view buggy,
                           const std::optional<std::string>& ground_truth) {
    const auto toks = normalize(candidate.text);
    if (toks == normalize(buggy)) return Verdict::Unaltered;
    if (!ground_truth) return Verdict::Other;
    return toks == normalize(*ground_truth) ? Verdict::Correct : Verdict::IncorrectOther;
}

std::string_view to_string(Policy p) { return p == Policy::Refill ? "refill" : "route-bug"; }

Policy policy_from_string(std::string_view s) {
    if (s == "refill") return Policy::Refill;
    if (s == "route-bug") return Policy::RouteBug;
    throw ConfigError("unknown policy '" + std::string(s) + "' (expected refill or route-bug)");
}

const BugResult* EnsembleResult::find(const std::string& id) const {
    auto it = std::lower_bound(bugs.begin(), bugs.end(), id,
                               [](const BugResult& b, const std::string& key) { return b.id < key; });
    return it != bugs.end() && it->id == id ? &*it : nullptr;
}

EnsembleResult run_pipeline(const std::vector<Generator*>& generators,
                            const std::vector<EnsembleInstance>& instances, int k, Policy policy, int workers) {
    if (generators.empty()) throw std::invalid_argument("run_pipeline needs at least one generator");
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    EnsembleResult out;
    out.policy = policy;
    out.k = k;
    out.bugs.resize(instances.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < instances.size(); i = next++) {
            out.bugs[i] = process(generators, instances[i], k, policy);
        }
    };
    const auto n = static_cast<std::size_t>(std::max(1, workers));
    if (n == 1 || instances.size() < 2) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(n, instances.size()); ++t) pool.emplace_back(work);
    }
    std::stable_sort(out.bugs.begin(), out.bugs.end(),
                     [](const BugResult& a, const BugResult& b) { return a.id < b.id; });
    return out;
}

nlohmann::ordered_json to_json(const BugResult& r, Policy policy) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["policy"] = to_string(policy);
    j["processed"] = r.processed;
    if (r.error) j["error"] = *r.error;
    j["candidates"] = nlohmann::ordered_json::array();
    for (const auto& c : r.candidates) {
        j["candidates"].push_back({{"rank", c.rank}, {"text", c.text}, {"score", c.score}, {"generator", c.generator}});
    }
    j["trace"] = nlohmann::ordered_json::array();
    for (const auto& s : r.trace) {
        nlohmann::ordered_json t;
        t["generator"] = s.generator;
        t["received"] = s.received;
        t["unaltered"] = s.unaltered;
        t["duplicates"] = s.duplicates;
        t["kept"] = s.kept;
        if (s.error) t["error"] = *s.error;
        j["trace"].push_back(std::move(t));
    }
    return j;
}

BugResult bug_result_from_json(const nlohmann::json& j) {
    BugResult r;
    r.id = j.at("id").get<std::string>();
    r.processed = j.value("processed", true);
    if (j.contains("error")) r.error = j["error"].get<std::string>();
    for (const auto& c : j.at("candidates")) {
        r.candidates.push_back(CandidatePatch{c.at("rank").get<int>(), c.at("text").get<std::string>(),
                                              c.at("score").get<double>(), c.value("generator", "")});
    }
    if (j.contains("trace")) {
        for (const auto& t : j["trace"]) {
            TraceStep s;
            s.generator = t.at("generator").get<std::string>();
            s.received = t.at("received").get<int>();
            s.unaltered = t.at("unaltered").get<std::vector<int>>();
            s.duplicates = t.at("duplicates").get<std::vector<int>>();
            s.kept = t.at("kept").get<int>();
            if (t.contains("error")) s.error = t["error"].get<std::string>();
            r.trace.push_back(std::move(s));
        }
    }
    return r;
}

}  // namespace slicefix
