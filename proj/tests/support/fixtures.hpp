// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace slicefix::testkit {

std::string read_file(const std::string& path);

// The edit-command parser fixture: the whole class, and the text of its
// `parse` method cut out of it.
std::string edit_parser_class(const std::string& fixtures_dir);
std::string edit_parser_method(const std::string& fixtures_dir);

// Fresh empty directory under the system temp dir.
std::string temp_dir(const std::string& tag);

// A JSON Lines corpus of generated methods, one bug per method, spread over
// five repositories. The fixed line of each bug is returned by id.
struct SyntheticCorpus {
    std::string path;
    std::map<std::string, std::string> fixed;
};

SyntheticCorpus write_synthetic_corpus(const std::string& dir, int bugs, std::uint64_t seed);

void write_file(const std::string& path, const std::string& text);

}  // namespace slicefix::testkit
