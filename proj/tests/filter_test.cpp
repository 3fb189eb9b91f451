// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include <gtest/gtest.h>

#include "scenarios.hpp"
#include "slicefix/errors.hpp"
#include "slicefix/evaluation.hpp"
#include "slicefix/filter_ensemble.hpp"

using namespace slicefix;
using namespace slicefix::testkit;

namespace {

EnsembleInstance instance(const std::string& id, const std::string& buggy) {
    SliceContext sc;
    sc.buggy = {1, buggy};
    return EnsembleInstance{id, buggy, encode_input(sc)};
}

Table table(std::map<std::string, std::vector<std::string>> m) {
    Table t;
    for (auto& [id, texts] : m) {
        for (auto& x : texts) t[id].push_back({Label::Other, x});
    }
    return t;
}

std::vector<std::string> texts(const BugResult& b) {
    std::vector<std::string> out;
    for (const auto& c : b.candidates) out.push_back(c.text);
    return out;
}

class FailingGenerator final : public Generator {
public:
    const std::string& name() const override { return name_; }
    std::vector<CandidatePatch> generate(const std::string& id, const ModelInput&, int) override {
        if (id == "bad") throw GeneratorError(id, "backend down");
        return {{1, "z = 0 ;", 1.0, name_}};
    }

private:
    std::string name_ = "flaky";
};

class BadRanks final : public Generator {
public:
    const std::string& name() const override { return name_; }
    std::vector<CandidatePatch> generate(const std::string&, const ModelInput&, int) override {
        return {{2, "z = 0 ;", 1.0, name_}};
    }

private:
    std::string name_ = "bad-ranks";
};

}  // namespace

TEST(ClassifyCandidate, Verdicts) {
    const std::string buggy = "if ( a == b ) {";
    EXPECT_EQ(classify_candidate({1, "if(a==b){", 1, "g"}, buggy), Verdict::Unaltered);
    EXPECT_EQ(classify_candidate({1, "if ( a != b ) {", 1, "g"}, buggy, "if ( a != b ) {"), Verdict::Correct);
    EXPECT_EQ(classify_candidate({1, "if ( a < b ) {", 1, "g"}, buggy, "if ( a != b ) {"), Verdict::IncorrectOther);
    EXPECT_EQ(classify_candidate({1, "if ( a < b ) {", 1, "g"}, buggy), Verdict::Other);
    EXPECT_EQ(classify_candidate({1, buggy, 1, "g"}, buggy, "x"), Verdict::Unaltered);
}

TEST(RunPipeline, ThreeBugFormula) {
    std::vector<EnsembleInstance> bugs{instance("b1", "a = 1 ;"), instance("b2", "a = 2 ;"), instance("b3", "a = 3 ;")};
    const std::map<std::string, std::string> truth{{"b1", "a = 10 ;"}, {"b2", "a = 20 ;"}, {"b3", "a = 30 ;"}};
    TableGenerator g1("g1", table({{"b1", {"a = 10 ;"}}, {"b2", {"a = 2 ;"}}, {"b3", {"a = 99 ;"}}}));
    TableGenerator g2("g2", table({{"b1", {"a = 11 ;"}}, {"b2", {"a = 20 ;"}}, {"b3", {"a = 30 ;"}}}));
    for (const Policy p : {Policy::Refill, Policy::RouteBug}) {
        auto r = run_pipeline({&g1, &g2}, bugs, 1, p);
        EXPECT_EQ(correct_ids(r, truth, 1), (std::set<std::string>{"b1", "b2"})) << to_string(p);
        EXPECT_EQ(r.find("b2")->candidates.front().generator, "g2");
        EXPECT_EQ(r.find("b1")->trace.size(), 1u);
        EXPECT_EQ(r.find("b3")->trace.size(), 1u);
        EXPECT_EQ(r.find("b2")->trace.front().unaltered, std::vector<int>{1});
    }
}

TEST(RunPipeline, VacuousFilterIsIdentity) {
    std::vector<EnsembleInstance> bugs{instance("a", "x = 1 ;"), instance("b", "x = 2 ;")};
    TableGenerator g1("g1", table({{"a", {"x = 3 ;", "x = 4 ;"}}, {"b", {"y = 1 ;"}}}));
    TableGenerator g2("g2", table({{"a", {"x = 5 ;"}}, {"b", {"x = 6 ;"}}}));
    for (const Policy p : {Policy::Refill, Policy::RouteBug}) {
        auto r = run_pipeline({&g1, &g2}, bugs, 10, p);
        EXPECT_EQ(texts(*r.find("a")), (std::vector<std::string>{"x = 3 ;", "x = 4 ;"}));
        EXPECT_EQ(texts(*r.find("b")), std::vector<std::string>{"y = 1 ;"});
        for (const auto& b : r.bugs) {
            ASSERT_EQ(b.trace.size(), 1u);
            EXPECT_EQ(b.trace[0].generator, "g1");
        }
        auto single = run_pipeline({&g1}, bugs, 10, p);
        EXPECT_EQ(single.find("a")->candidates, g1.generate("a", {}, 10));
    }
}

TEST(RunPipeline, RefillAppendsAfterDrop) {
    std::vector<EnsembleInstance> bugs{instance("a", "x = 1 ;")};
    TableGenerator g1("g1", table({{"a", {"x = 2 ;", "x=1;", "x = 2 ;", "x = 3 ;"}}}));
    TableGenerator g2("g2", table({{"a", {"x = 3 ;", "x = 1 ;", "x = 4 ;", "x = 5 ;"}}}));
    TableGenerator g3("g3", table({{"a", {"x = 6 ;"}}}));
    auto r = run_pipeline({&g1, &g2, &g3}, bugs, 4, Policy::Refill);
    const auto& b = *r.find("a");
    EXPECT_EQ(texts(b), (std::vector<std::string>{"x = 2 ;", "x = 3 ;", "x = 4 ;", "x = 5 ;"}));
    EXPECT_EQ(b.candidates[2].generator, "g2");
    EXPECT_EQ(b.candidates[3].rank, 4);
    ASSERT_EQ(b.trace.size(), 2u);  // list full before g3
    EXPECT_EQ(b.trace[0].unaltered, std::vector<int>{2});
    EXPECT_EQ(b.trace[0].duplicates, std::vector<int>{3});
    EXPECT_EQ(b.trace[1].duplicates, std::vector<int>{1});
    EXPECT_EQ(b.trace[1].unaltered, std::vector<int>{2});
    EXPECT_EQ(b.trace[1].kept, 2);
}

TEST(RunPipeline, RouteBugReplacesWholeList) {
    std::vector<EnsembleInstance> bugs{instance("a", "x = 1 ;"), instance("b", "x = 1 ;")};
    TableGenerator g1("g1", table({{"a", {"x = 1 ;", "x = 2 ;"}}, {"b", {"x = 2 ;", "x = 1 ;"}}}));
    TableGenerator g2("g2", table({{"a", {"x = 1 ;", "x = 7 ;"}}, {"b", {"x = 9 ;"}}}));
    TableGenerator g3("g3", table({{"a", {"x = 8 ;", "x = 8 ;"}}}));
    auto r = run_pipeline({&g1, &g2, &g3}, bugs, 10, Policy::RouteBug);
    EXPECT_EQ(texts(*r.find("a")), std::vector<std::string>{"x = 8 ;"});
    EXPECT_EQ(r.find("a")->trace.size(), 3u);
    // rank 1 is fine: the unaltered rank 2 is filtered but the bug stays
    EXPECT_EQ(texts(*r.find("b")), std::vector<std::string>{"x = 2 ;"});
    EXPECT_EQ(r.find("b")->trace.size(), 1u);
}

TEST(RunPipeline, GeneratorErrorMarksBugUnprocessed) {
    std::vector<EnsembleInstance> bugs{instance("bad", "x = 1 ;"), instance("good", "x = 1 ;")};
    FailingGenerator g;
    auto r = run_pipeline({&g}, bugs, 10, Policy::Refill);
    const auto* bad = r.find("bad");
    EXPECT_FALSE(bad->processed);
    EXPECT_TRUE(bad->candidates.empty());
    EXPECT_NE(bad->error->find("backend down"), std::string::npos);
    EXPECT_TRUE(bad->trace.back().error.has_value());
    EXPECT_TRUE(r.find("good")->processed);
    EXPECT_EQ(fix_at_k(r, {{"bad", "z = 0 ;"}, {"good", "z = 0 ;"}}, 1), 0.5);

    BadRanks br;
    auto r2 = run_pipeline({&br}, bugs, 10, Policy::RouteBug);
    EXPECT_FALSE(r2.bugs[0].processed);
}

TEST(RunPipeline, BothOrdersAreTraced) {
    std::vector<EnsembleInstance> bugs{instance("a", "x = 1 ;")};
    TableGenerator g1("g1", table({{"a", {"x = 1 ;"}}}));
    TableGenerator g2("g2", table({{"a", {"x = 2 ;"}}}));
    auto fwd = run_pipeline({&g1, &g2}, bugs, 1, Policy::Refill);
    auto rev = run_pipeline({&g2, &g1}, bugs, 1, Policy::Refill);
    EXPECT_EQ(fwd.bugs[0].trace.size(), 2u);
    EXPECT_EQ(fwd.bugs[0].trace[0].generator, "g1");
    EXPECT_EQ(fwd.bugs[0].candidates[0].generator, "g2");
    ASSERT_EQ(rev.bugs[0].trace.size(), 1u);
    EXPECT_EQ(rev.bugs[0].trace[0].generator, "g2");
}

TEST(RunPipeline, Preconditions) {
    TableGenerator g("g", {});
    EXPECT_THROW(run_pipeline({}, {}, 1, Policy::Refill), std::invalid_argument);
    EXPECT_THROW(run_pipeline({&g}, {}, 0, Policy::Refill), std::invalid_argument);
    EXPECT_THROW(policy_from_string("greedy"), ConfigError);
    EXPECT_EQ(policy_from_string("route-bug"), Policy::RouteBug);
}

TEST(RunPipeline, RandomScenariosMatchSetAlgebra) {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 200; ++i) {
        auto s = random_scenario(rng, 15, 3);
        TableGenerator a("g1", s.tables[0]), b("g2", s.tables[1]), c("g3", s.tables[2]);
        ASSERT_EQ(check_filter_algebra(s, {&a, &b, &c}), "") << "scenario " << i;
    }
}

TEST(RunPipeline, WorkersDoNotChangeResult) {
    std::mt19937_64 rng(67);
    auto s = random_scenario(rng, 60, 3);
    TableGenerator a("g1", s.tables[0]), b("g2", s.tables[1]), c("g3", s.tables[2]);
    auto one = run_pipeline({&a, &b, &c}, s.instances, 10, Policy::Refill, 1);
    auto four = run_pipeline({&a, &b, &c}, s.instances, 10, Policy::Refill, 4);
    EXPECT_EQ(one.bugs, four.bugs);
    EXPECT_TRUE(std::is_sorted(one.bugs.begin(), one.bugs.end(),
                               [](const BugResult& x, const BugResult& y) { return x.id < y.id; }));
}

TEST(BugResultJson, RoundTrip) {
    std::mt19937_64 rng(71);
    auto s = random_scenario(rng, 10, 2);
    TableGenerator a("g1", s.tables[0]), b("g2", s.tables[1]);
    auto r = run_pipeline({&a, &b}, s.instances, 10, Policy::Refill);
    for (const auto& bug : r.bugs) {
        EXPECT_EQ(bug_result_from_json(nlohmann::json::parse(to_json(bug, r.policy).dump())), bug);
    }
}
