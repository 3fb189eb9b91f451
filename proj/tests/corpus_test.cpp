// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "slicefix/corpus.hpp"
#include "slicefix/errors.hpp"

using namespace slicefix;
using namespace slicefix::testkit;

namespace {

BugInstance record(const std::string& id, const std::string& repo, int line, const std::string& fixed) {
    return BugInstance{id, repo, std::nullopt, "int f ( int a ) {\nint b = a ;\nreturn a ;\n}", line, fixed, "BFP"};
}

std::string write_lines(const std::string& tag, const std::vector<std::string>& lines) {
    const auto path = std::filesystem::path(temp_dir(tag)) / "corpus.jsonl";
    std::ofstream out(path);
    for (const auto& l : lines) out << l << "\n";
    return path.string();
}

std::vector<BugInstance> repos(const std::vector<int>& sizes) {
    std::vector<BugInstance> out;
    for (std::size_t r = 0; r < sizes.size(); ++r) {
        for (int i = 0; i < sizes[r]; ++i) {
            out.push_back(record("r" + std::to_string(r) + "-" + std::to_string(i), "repo" + std::to_string(r), 1,
                                 "int b = a + 1 ;"));
        }
    }
    return out;
}

// Smallest achievable worst deviation from the ratios over all 3^r
// repository assignments.
double best_deviation(const std::vector<int>& sizes, std::array<double, 3> ratios) {
    const double total = std::accumulate(sizes.begin(), sizes.end(), 0.0);
    std::size_t combos = 1;
    for (std::size_t i = 0; i < sizes.size(); ++i) combos *= 3;
    double best = 1e9;
    for (std::size_t c = 0; c < combos; ++c) {
        std::array<double, 3> count{};
        std::size_t x = c;
        for (int s : sizes) {
            count[x % 3] += s;
            x /= 3;
        }
        double worst = 0;
        for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(count[static_cast<std::size_t>(k)] / total - ratios[static_cast<std::size_t>(k)]));
        best = std::min(best, worst);
    }
    return best;
}

void expect_disjoint_by_repo(const CorpusSplit& s, const std::vector<BugInstance>& corpus) {
    std::map<std::string, std::set<int>> where;
    for (const auto& b : corpus) {
        const int k = s.train.contains(b.id) ? 0 : s.valid.contains(b.id) ? 1 : s.test.contains(b.id) ? 2 : -1;
        ASSERT_NE(k, -1) << b.id;
        where[b.repo].insert(k);
    }
    for (const auto& [repo, splits] : where) EXPECT_EQ(splits.size(), 1u) << repo;
    EXPECT_EQ(s.train.size() + s.valid.size() + s.test.size(), corpus.size());
}

}  // namespace

TEST(Validate, Examples) {
    EXPECT_EQ(validate(record("a", "r", 2, "return a;")), "fixed line equals buggy line");
    EXPECT_EQ(validate(record("a", "r", 2, "return b ;")), "");
    EXPECT_NE(validate(record("a", "r", 99, "x ;")), "");
    EXPECT_NE(validate(record("a", "r", 0, "x ;")), "");  // header
    EXPECT_NE(validate(record("a", "r", 3, "x ;")), "");  // closing brace
    EXPECT_NE(validate(record("", "r", 1, "x ;")), "");
    auto broken = record("a", "r", 1, "x ;");
    broken.method_source = "int f ( {";
    EXPECT_NE(validate(broken), "");
}

TEST(Validate, EditParserLineTwo) {
    BugInstance b{"edit-parser", "addressbook", edit_parser_class(SLICEFIX_FIXTURES), edit_parser_method(SLICEFIX_FIXTURES), 2,
                  "ArgumentMultimap argMultimap = ArgumentTokenizer . tokenize ( args , PREFIX_DEADLINE ) ;", "BFP"};
    EXPECT_EQ(validate(b), "");
    EXPECT_NE(buggy_statement(b).find("argsTokenizer"), std::string::npos);
}

TEST(Ingest, AcceptsAndReports) {
    const auto good = to_json(record("g", "r", 1, "int b = a + 1 ;")).dump();
    const auto same = to_json(record("s", "r", 2, "return a;")).dump();
    const auto far = to_json(record("f", "r", 99, "x ;")).dump();
    const auto path = write_lines("ingest", {good, "", same, "{not json", far, good, R"({"id": "x"})"});
    auto r = ingest(path);
    ASSERT_EQ(r.instances.size(), 1u);
    EXPECT_EQ(r.instances[0].id, "g");
    ASSERT_EQ(r.rejected.size(), 5u);
    EXPECT_EQ(r.rejected[0].record, 3u);
    EXPECT_EQ(r.rejected[0].id, "s");
    EXPECT_EQ(r.rejected[1].record, 4u);
    EXPECT_EQ(r.rejected[3].reason, "duplicate id");
    EXPECT_EQ(r.rejected[4].record, 7u);
}

TEST(Ingest, Errors) {
    EXPECT_THROW(ingest("/nonexistent/corpus.jsonl"), IoError);
    const auto path = write_lines("fmt", {});
    EXPECT_THROW(ingest(path, "csv"), ConfigError);
    EXPECT_TRUE(ingest(path).instances.empty());
}

TEST(Ingest, Idempotent) {
    auto first = ingest(std::string(SLICEFIX_FIXTURES) + "/../../data/example/corpus.jsonl");
    ASSERT_FALSE(first.instances.empty());
    const auto out = std::filesystem::path(temp_dir("idem")) / "c.jsonl";
    write_jsonl(out.string(), first.instances);
    auto second = ingest(out.string());
    EXPECT_EQ(second.instances, first.instances);
    EXPECT_TRUE(second.rejected.empty());
    EXPECT_EQ(bug_instance_from_json(nlohmann::json::parse(to_json(first.instances[0]).dump())), first.instances[0]);
}

TEST(SplitByRepo, UniformRepos) {
    auto corpus = repos(std::vector<int>(10, 10));
    auto s = split_by_repo(corpus, {0.8, 0.1, 0.1}, 7);
    EXPECT_EQ(s.train.size(), 80u);
    EXPECT_EQ(s.valid.size(), 10u);
    EXPECT_EQ(s.test.size(), 10u);
    EXPECT_TRUE(s.within_tolerance);
    expect_disjoint_by_repo(s, corpus);
    auto again = split_by_repo(corpus, {0.8, 0.1, 0.1}, 7);
    EXPECT_EQ(again.train, s.train);
    EXPECT_EQ(again.valid, s.valid);
    auto other = split_by_repo(corpus, {0.8, 0.1, 0.1}, 8);
    EXPECT_EQ(other.train.size(), 80u);
}

TEST(SplitByRepo, SkewedFeasible) {
    const std::vector<int> sizes{50, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5};
    auto corpus = repos(sizes);
    EXPECT_LE(best_deviation(sizes, {0.8, 0.1, 0.1}), 1e-12);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto s = split_by_repo(corpus, {0.8, 0.1, 0.1}, seed);
        expect_disjoint_by_repo(s, corpus);
        EXPECT_TRUE(s.train.contains("r0-0"));
        const double share = static_cast<double>(s.train.size()) / 100;
        EXPECT_DOUBLE_EQ(s.shares[0], share);
        const bool within = std::abs(s.shares[0] - 0.8) <= 0.02 + 1e-12 && std::abs(s.shares[1] - 0.1) <= 0.02 + 1e-12 &&
                            std::abs(s.shares[2] - 0.1) <= 0.02 + 1e-12;
        EXPECT_EQ(s.within_tolerance, within);
    }
}

TEST(SplitByRepo, SkewedInfeasibleIsReported) {
    const std::vector<int> sizes{85, 5, 5, 5};
    auto corpus = repos(sizes);
    EXPECT_GT(best_deviation(sizes, {0.8, 0.1, 0.1}), 0.02);
    auto s = split_by_repo(corpus, {0.8, 0.1, 0.1}, 3);
    expect_disjoint_by_repo(s, corpus);
    EXPECT_FALSE(s.within_tolerance);
}

TEST(SplitByRepo, RandomSizesNeverClaimBetterThanPossible) {
    std::mt19937_64 rng(97);
    for (int i = 0; i < 40; ++i) {
        std::vector<int> sizes;
        const int r = 3 + static_cast<int>(rng() % 7);
        for (int j = 0; j < r; ++j) sizes.push_back(1 + static_cast<int>(rng() % 20));
        auto corpus = repos(sizes);
        auto s = split_by_repo(corpus, {0.8, 0.1, 0.1}, rng());
        expect_disjoint_by_repo(s, corpus);
        if (best_deviation(sizes, {0.8, 0.1, 0.1}) > 0.02 + 1e-12) {
            EXPECT_FALSE(s.within_tolerance);
        }
    }
}

TEST(SplitByRepo, Errors) {
    EXPECT_THROW(split_by_repo({}, {0.8, 0.1, 0.1}, 1), std::invalid_argument);
    EXPECT_THROW(split_by_repo(repos({3}), {0.8, 0.1, 0.1}, 1), std::invalid_argument);
    EXPECT_THROW(split_by_repo(repos({3, 3}), {0.8, 0.1, 0.2}, 1), std::invalid_argument);
    EXPECT_THROW(split_by_repo(repos({3, 3}), {1.1, -0.1, 0.0}, 1), std::invalid_argument);
    auto s = split_by_repo(repos({3}), {1.0, 0.0, 0.0}, 1);
    EXPECT_EQ(s.train.size(), 3u);
}
