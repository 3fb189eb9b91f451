// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include "scenarios.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "slicefix/evaluation.hpp"

namespace slicefix::testkit {

namespace {

// Tokens joined with random spacing; none of the pools contain token pairs
// that would fuse when written without a space.
std::string spell(const std::vector<std::string>& toks, std::mt19937_64& rng) {
    static const char* gaps[] = {" ", "", "  "};
    std::string out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i > 0) out += gaps[rng() % 3];
        out += toks[i];
    }
    return out;
}

bool first_is(const Table& t, const std::string& id, Label l) {
    auto it = t.find(id);
    return it != t.end() && !it->second.empty() && it->second.front().label == l;
}

std::set<std::string> with_first(const Scenario& s, std::size_t g, Label l) {
    std::set<std::string> out;
    for (const auto& inst : s.instances) {
        if (first_is(s.tables[g], inst.id, l)) out.insert(inst.id);
    }
    return out;
}

std::set<std::string> fixed_within(const Table& t, int k) {
    std::set<std::string> out;
    for (const auto& [id, list] : t) {
        for (std::size_t i = 0; i < list.size() && static_cast<int>(i) < k; ++i) {
            if (list[i].label == Label::Fixed) out.insert(id);
        }
    }
    return out;
}

std::string show(const std::set<std::string>& s) {
    std::string out = "{";
    for (const auto& x : s) out += (out.size() > 1 ? "," : "") + x;
    return out + "}";
}

}  // namespace

Scenario random_scenario(std::mt19937_64& rng, int bugs, int generators) {
    Scenario s;
    s.tables.resize(static_cast<std::size_t>(generators));
    for (int b = 0; b < bugs; ++b) {
        const std::string id = "b" + std::to_string(b);
        const std::string n = std::to_string(b);
        const std::vector<std::string> buggy{"x", "=", n, ";"};
        const std::vector<std::string> fixed{"x", "=", n, "+", "1", ";"};
        EnsembleInstance inst;
        inst.id = id;
        inst.buggy = spell(buggy, rng);
        SliceContext sc;
        sc.buggy = {1, inst.buggy};
        inst.input = encode_input(sc);
        s.instances.push_back(std::move(inst));
        s.truth[id] = spell(fixed, rng);
        for (auto& table : s.tables) {
            // a gap here means the generator has nothing for this bug
            if (rng() % 10 == 0) continue;
            auto& list = table[id];
            const int len = std::uniform_int_distribution<int>(0, 10)(rng);
            for (int i = 0; i < len; ++i) {
                const auto r = rng() % 10;
                if (r < 3) {
                    list.push_back({Label::Buggy, spell(buggy, rng)});
                } else if (r < 5) {
                    list.push_back({Label::Fixed, spell(fixed, rng)});
                } else {
                    const std::string j = std::to_string(rng() % 4);
                    list.push_back({Label::Other, spell({"y", "=", n, "*", j, ";"}, rng)});
                }
            }
        }
    }
    return s;
}

std::vector<CandidatePatch> TableGenerator::generate(const std::string& id, const ModelInput&, int k) {
    std::vector<CandidatePatch> out;
    auto it = table_.find(id);
    if (it == table_.end()) return out;
    for (const auto& e : it->second) {
        if (static_cast<int>(out.size()) >= k) break;
        const int rank = static_cast<int>(out.size()) + 1;
        out.push_back(CandidatePatch{rank, e.text, 1.0 / rank, name_});
    }
    return out;
}

void write_replay(const Table& t, const std::string& path) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [id, list] : t) {
        j[id] = nlohmann::json::array();
        for (const auto& e : list) j[id].push_back(e.text);
    }
    std::ofstream(path) << j.dump();
}

namespace {

std::set<std::string> all_empty(const Scenario& s, std::size_t g) {
    std::set<std::string> out;
    for (const auto& inst : s.instances) {
        auto it = s.tables[g].find(inst.id);
        if (it == s.tables[g].end() || it->second.empty()) out.insert(inst.id);
    }
    return out;
}

// CP1 + UP1 & CP2 + UP1 & UP2 & CP3 + ... When `empty_routes` is set a
// later generator that returns nothing passes the bug on as well.
std::set<std::string> formula(const Scenario& s, bool empty_routes) {
    std::set<std::string> expected;
    std::set<std::string> routed;
    for (const auto& inst : s.instances) routed.insert(inst.id);
    for (std::size_t g = 0; g < s.tables.size(); ++g) {
        for (const auto& id : with_first(s, g, Label::Fixed)) {
            if (routed.contains(id)) expected.insert(id);
        }
        auto pass = with_first(s, g, Label::Buggy);
        if (empty_routes && g > 0) pass.merge(all_empty(s, g));
        std::set<std::string> next;
        std::set_intersection(routed.begin(), routed.end(), pass.begin(), pass.end(), std::inserter(next, next.end()));
        routed = std::move(next);
    }
    return expected;
}

}  // namespace

std::string check_filter_algebra(const Scenario& s, const std::vector<Generator*>& gens) {
    for (const Policy p : {Policy::RouteBug, Policy::Refill}) {
        const auto expected = formula(s, p == Policy::Refill);
        const auto r = run_pipeline(gens, s.instances, 1, p);
        const auto got = correct_ids(r, s.truth, 1);
        if (got != expected) {
            return std::string(to_string(p)) + " k=1: got " + show(got) + ", formula gives " + show(expected);
        }
    }

    const auto refill = run_pipeline(gens, s.instances, 10, Policy::Refill);
    for (const auto& b : refill.bugs) {
        const auto& inst = *std::find_if(s.instances.begin(), s.instances.end(),
                                         [&](const EnsembleInstance& i) { return i.id == b.id; });
        if (b.candidates.size() > 10) return b.id + ": more than k candidates";
        std::set<std::vector<std::string>> seen;
        for (const auto& c : b.candidates) {
            if (classify_candidate(c, inst.buggy) == Verdict::Unaltered) return b.id + ": unaltered candidate kept";
            if (!seen.insert(normalize(c.text)).second) return b.id + ": duplicate candidate kept";
        }
    }
    for (int k = 1; k <= 10; ++k) {
        const auto ens = correct_ids(refill, s.truth, k);
        const auto first = fixed_within(s.tables.front(), k);
        if (!std::includes(ens.begin(), ens.end(), first.begin(), first.end())) {
            return "refill Fix@" + std::to_string(k) + " below generator 1: " + show(ens) + " vs " + show(first);
        }
    }
    return {};
}

}  // namespace slicefix::testkit
