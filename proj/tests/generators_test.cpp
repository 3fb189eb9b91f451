// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "fixtures.hpp"
#include "slicefix/errors.hpp"
#include "slicefix/generators.hpp"

using namespace slicefix;
using namespace slicefix::testkit;

namespace {

ModelInput input_for(const std::string& buggy) {
    SliceContext sc;
    sc.buggy = {1, buggy};
    return encode_input(sc);
}

std::vector<std::string> texts(const std::vector<CandidatePatch>& c) {
    std::vector<std::string> out;
    for (const auto& p : c) out.push_back(p.text);
    return out;
}

std::string backend(const std::string& mode) {
    return "cmd:python3 " + std::string(SLICEFIX_FIXTURES) + "/fake_backend.py " + mode + " 2>/dev/null";
}

GeneratorOptions fast(std::optional<std::uint64_t> seed = std::nullopt) {
    GeneratorOptions o;
    o.timeout = std::chrono::milliseconds(3000);
    o.seed = seed;
    return o;
}

}  // namespace

TEST(IdentityGenerator, ReturnsBuggyLine) {
    auto g = make_generator("identity");
    auto c = g->generate("x", input_for("a = b ;"), 3);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0], (CandidatePatch{1, "a = b ;", 1.0, "identity"}));
}

TEST(IdentityGenerator, UnescapesAngleTokens) {
    auto c = make_generator("identity")->generate("x", input_for("if ( a < b ) {"), 1);
    EXPECT_EQ(c[0].text, "if ( a < b ) {");
}

TEST(ReplayGenerator, TableEntries) {
    const std::filesystem::path dir = temp_dir("replay");
    const auto path = dir / "t.json";
    std::ofstream(path) << R"({"b1": ["x = 1 ;", {"text": "x = 2 ;", "score": 0.4}, "x = 3 ;"]})";
    auto g = make_generator("replay:" + path.string());
    auto c = g->generate("b1", input_for("x = 0 ;"), 10);
    EXPECT_EQ(texts(c), (std::vector<std::string>{"x = 1 ;", "x = 2 ;", "x = 3 ;"}));
    EXPECT_DOUBLE_EQ(c[0].score, 1.0);
    EXPECT_DOUBLE_EQ(c[1].score, 0.4);
    EXPECT_DOUBLE_EQ(c[2].score, 1.0 / 3);
    EXPECT_EQ(c[2].rank, 3);
    EXPECT_EQ(g->generate("b1", input_for("x = 0 ;"), 2).size(), 2u);
    EXPECT_TRUE(g->generate("missing", input_for("x = 0 ;"), 10).empty());
}

TEST(ReplayGenerator, InvalidTables) {
    const std::filesystem::path dir = temp_dir("replay-bad");
    std::ofstream(dir / "a.json") << "[1, 2]";
    std::ofstream(dir / "b.json") << R"({"b": [{"text": "a", "score": 0.1}, {"text": "b", "score": 0.9}]})";
    std::ofstream(dir / "c.json") << "{";
    EXPECT_THROW(make_generator("replay:" + (dir / "a.json").string()), ConfigError);
    EXPECT_THROW(make_generator("replay:" + (dir / "b.json").string()), GeneratorError);
    EXPECT_THROW(make_generator("replay:" + (dir / "c.json").string()), ConfigError);
    EXPECT_THROW(make_generator("replay:" + (dir / "none.json").string()), ConfigError);
}

TEST(MutateGenerator, FlipsEquality) {
    auto c = make_generator("mutate:eq")->generate("x", input_for("if ( a == b ) {"), 10);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].text, "if ( a != b ) {");
    EXPECT_EQ(c[0].rank, 1);
}

TEST(MutateGenerator, RuleOrderAndDedup) {
    // hand-applied: rel first over each token, then delete over each
    // deletable token; duplicates and the unchanged line are dropped
    auto got = mutate_line("x = a < b ;", {"rel", "delete"});
    EXPECT_EQ(got, (std::vector<std::string>{"x = a <= b ;", "= a < b ;", "x a < b ;", "x = < b ;", "x = a b ;",
                                             "x = a < ;"}));
    EXPECT_EQ(mutate_line("a = b ;", {"eq", "rel", "arith", "logic", "bool"}), std::vector<std::string>{});
    EXPECT_EQ(mutate_line("f ( a , a ) ;", {"delete"}), (std::vector<std::string>{"( a , a ) ;", "f ( , a ) ;", "f ( a , ) ;"}));
    EXPECT_EQ(mutate_line("ok = true && x - 1 > 0 ;", {"bool", "logic", "arith"}),
              (std::vector<std::string>{"ok = false && x - 1 > 0 ;", "ok = true || x - 1 > 0 ;",
                                        "ok = true && x + 1 > 0 ;"}));
}

TEST(MutateGenerator, CutsAtKWithScoresByRank) {
    auto c = make_generator("mutate")->generate("x", input_for("x = a + b - c ;"), 3);
    ASSERT_EQ(c.size(), 3u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(c[static_cast<std::size_t>(i)].rank, i + 1);
        EXPECT_DOUBLE_EQ(c[static_cast<std::size_t>(i)].score, 1.0 / (i + 1));
    }
    EXPECT_NO_THROW(validate_candidates(c, "x", 3));
}

TEST(MakeGenerator, RejectsBadSpecs) {
    EXPECT_THROW(make_generator("bogus"), ConfigError);
    EXPECT_THROW(make_generator("mutate:nope"), ConfigError);
    EXPECT_THROW(make_generator("mutate:"), ConfigError);
    EXPECT_THROW(make_generator("replay:"), ConfigError);
    EXPECT_THROW(make_generator("http:ftp://x"), ConfigError);
    EXPECT_EQ(make_generator("mutate:eq,rel")->name(), "mutate:eq,rel");
}

TEST(Contract, ValidateCandidates) {
    std::vector<CandidatePatch> ok{{1, "a", 0.9, "g"}, {2, "b", 0.9, "g"}, {3, "c", 0.1, "g"}};
    EXPECT_NO_THROW(validate_candidates(ok, "i", 3));
    EXPECT_THROW(validate_candidates(ok, "i", 2), GeneratorError);
    auto gap = ok;
    gap[1].rank = 3;
    EXPECT_THROW(validate_candidates(gap, "i", 3), GeneratorError);
    auto up = ok;
    up[2].score = 2.0;
    try {
        validate_candidates(up, "bug-7", 3);
        FAIL();
    } catch (const GeneratorError& e) {
        EXPECT_EQ(e.instance_id(), "bug-7");
    }
}

TEST(Contract, ParseResponse) {
    auto r = nlohmann::json::parse(R"({"id": "i", "candidates": [{"rank": 1, "text": "a", "score": 0.5}]})");
    auto c = parse_response(r, "i", 10, "g");
    EXPECT_EQ(c[0], (CandidatePatch{1, "a", 0.5, "g"}));
    EXPECT_THROW(parse_response(r, "j", 10, "g"), GeneratorError);
    EXPECT_THROW(parse_response(nlohmann::json::parse(R"({"id": "i", "error": "x"})"), "i", 10, "g"),
                 GeneratorError);
    EXPECT_THROW(parse_response(nlohmann::json::parse(R"({"id": "i"})"), "i", 10, "g"), GeneratorError);
    EXPECT_THROW(parse_response(nlohmann::json::parse(R"({"id": "i", "candidates": [{"rank": 1, "text": 3,
                                                          "score": 0.5}]})"),
                                "i", 10, "g"),
                 GeneratorError);
    EXPECT_THROW(parse_response(nlohmann::json::array(), "i", 10, "g"), GeneratorError);
}

TEST(Contract, RequestShape) {
    auto in = input_for("a = b ;");
    auto j = make_request("i", in, 5, 42u);
    EXPECT_EQ(j.dump(), R"({"id":"i","input_tokens":["<GLB>","<CTX>","<BOL>","a","=","b",";","<EOL>"],"k":5,"seed":42})");
    EXPECT_FALSE(make_request("i", in, 5, std::nullopt).contains("seed"));
}

TEST(CommandBackend, ServesRequests) {
    auto g = make_generator(backend("ok"), fast(1));
    for (int i = 0; i < 10; ++i) {
        auto c = g->generate("id" + std::to_string(i), input_for("if ( a < b ) {"), 10);
        ASSERT_EQ(c.size(), 10u);
        EXPECT_EQ(c[0].text, "if ( a < b ) {");
        EXPECT_EQ(c[0].generator, g->name());
    }
    EXPECT_TRUE(g->deterministic());
}

TEST(CommandBackend, SeedMakesOutputRepeatable) {
    auto a = make_generator(backend("ok"), fast(5));
    auto b = make_generator(backend("ok"), fast(5));
    auto c = make_generator(backend("ok"), fast(6));
    const auto in = input_for("x = 1 ;");
    const auto ra = a->generate("i", in, 4);
    EXPECT_EQ(ra, b->generate("i", in, 4));
    EXPECT_NE(texts(ra), texts(c->generate("i", in, 4)));
    EXPECT_FALSE(make_generator(backend("ok"), fast())->deterministic());
}

TEST(CommandBackend, ContractViolations) {
    const auto in = input_for("x = 1 ;");
    for (const char* mode : {"badrank", "toomany", "error", "garbage", "wrongid"}) {
        auto g = make_generator(backend(mode), fast());
        try {
            g->generate("bug-3", in, 3);
            ADD_FAILURE() << mode;
        } catch (const GeneratorError& e) {
            EXPECT_EQ(e.instance_id(), "bug-3") << mode;
        }
    }
}

TEST(CommandBackend, TimeoutThenRecovers) {
    GeneratorOptions o = fast();
    o.timeout = std::chrono::milliseconds(500);
    auto g = make_generator(backend("slow"), o);
    const auto in = input_for("x = 1 ;");
    const auto t0 = std::chrono::steady_clock::now();
    EXPECT_THROW(g->generate("slow-1", in, 2), GeneratorError);
    EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(3));
    EXPECT_EQ(g->generate("fast-1", in, 2).size(), 2u);
}

TEST(CommandBackend, RestartsAfterChildExit) {
    auto g = make_generator(backend("die"), fast());
    const auto in = input_for("x = 1 ;");
    EXPECT_THROW(g->generate("a", in, 2), GeneratorError);
    EXPECT_THROW(g->generate("b", in, 2), GeneratorError);  // fresh child dies on its first request too
    auto missing = make_generator("cmd:/nonexistent/backend", fast());
    EXPECT_THROW(missing->generate("c", in, 2), GeneratorError);
}

TEST(CommandBackend, ConcurrentCallersAreSerialised) {
    auto g = make_generator(backend("ok"), fast(3));
    const auto in = input_for("x = 1 ;");
    std::vector<std::thread> threads;
    std::vector<std::size_t> sizes(4);
    for (std::size_t t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 5; ++i) sizes[t] += g->generate("t" + std::to_string(t), in, 3).size();
        });
    }
    for (auto& t : threads) t.join();
    for (auto s : sizes) EXPECT_EQ(s, 15u);
}

TEST(HttpBackend, PostsRequests) {
    httplib::Server svr;
    svr.Post("/gen", [](const httplib::Request& req, httplib::Response& res) {
        auto j = nlohmann::json::parse(req.body);
        nlohmann::json out{{"id", j["id"]}, {"candidates", nlohmann::json::array()}};
        if (j["id"] == "bad") {
            res.status = 500;
            return;
        }
        for (int i = 1; i <= j["k"].get<int>(); ++i) {
            out["candidates"].push_back({{"rank", i}, {"text", "t" + std::to_string(i)}, {"score", 1.0 / i}});
        }
        res.set_content(out.dump(), "application/json");
    });
    const int port = svr.bind_to_any_port("127.0.0.1");
    std::thread th([&] { svr.listen_after_bind(); });
    svr.wait_until_ready();
    auto g = make_generator("http:http://127.0.0.1:" + std::to_string(port) + "/gen", fast(1));
    auto c = g->generate("i", input_for("x = 1 ;"), 3);
    EXPECT_EQ(texts(c), (std::vector<std::string>{"t1", "t2", "t3"}));
    EXPECT_THROW(g->generate("bad", input_for("x = 1 ;"), 3), GeneratorError);
    svr.stop();
    th.join();
    EXPECT_THROW(g->generate("i", input_for("x = 1 ;"), 3), GeneratorError);
}

TEST(CachedBackend, ReplaysRecords) {
    const std::filesystem::path dir = temp_dir("cached");
    const auto path = dir / "c.jsonl";
    {
        std::ofstream out(path);
        out << to_json(CandidateRecord{"a", {{1, "x", 1.0, "mutate"}, {2, "y", 0.5, "mutate"}}, std::nullopt}).dump()
            << "\n";
        out << to_json(CandidateRecord{"b", {}, std::string("timed out")}).dump() << "\n";
    }
    auto g = make_cached_generator(path.string(), "mutate");
    EXPECT_EQ(g->name(), "mutate");
    EXPECT_EQ(texts(g->generate("a", {}, 1)), std::vector<std::string>{"x"});
    EXPECT_THROW(g->generate("b", {}, 1), GeneratorError);
    EXPECT_THROW(g->generate("c", {}, 1), GeneratorError);
    auto rec = candidate_record_from_json(nlohmann::json::parse(
        to_json(CandidateRecord{"a", {{1, "x", 1.0, "m"}}, std::nullopt}).dump()));
    EXPECT_EQ(rec.candidates[0].generator, "m");
}
