// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include "fixtures.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <random>
#include <stdexcept>

#include "method_gen.hpp"
#include "slicefix/corpus.hpp"

namespace slicefix::testkit {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string edit_parser_class(const std::string& fixtures_dir) {
    return read_file(fixtures_dir + "/EditCommandParser.java");
}

std::string edit_parser_method(const std::string& fixtures_dir) {
    const std::string cls = edit_parser_class(fixtures_dir);
    const auto begin = cls.find("public EditCommand parse(");
    const auto end = cls.find("public void parseTagsForEdit");
    if (begin == std::string::npos || end == std::string::npos) throw std::runtime_error("fixture layout changed");
    return cls.substr(begin, end - begin);
}

std::string temp_dir(const std::string& tag) {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / ("slicefix-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

SyntheticCorpus write_synthetic_corpus(const std::string& dir, int bugs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<BugInstance> out;
    SyntheticCorpus c;
    c.path = (std::filesystem::path(dir) / "corpus.jsonl").string();
    for (int i = 0; i < bugs; ++i) {
        const auto g = generate_method(rng);
        const int line = g.statements[rng() % g.statements.size()];
        BugInstance b;
        b.id = "syn-" + std::to_string(i);
        b.repo = "repo" + std::to_string(i % 5);
        b.method_source = g.source;
        b.buggy_line = line;
        b.fixed_line = "fix_" + std::to_string(i) + " ( ) ;";
        b.benchmark = "synthetic";
        c.fixed[b.id] = b.fixed_line;
        out.push_back(std::move(b));
    }
    write_jsonl(c.path, out);
    return c;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace slicefix::testkit
