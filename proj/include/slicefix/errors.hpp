// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace slicefix {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Source outside the supported Java subset. `line` is 0-based in the
/// normalized method text, or -1 when no single line is to blame.
class ParseFailure : public Error {
public:
    ParseFailure(std::string message, int line)
        : Error(line >= 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line),
          reason_(std::move(message)) {}

    int line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    int line_;
    std::string reason_;
};

/// A graph violating a structural precondition (e.g. EXIT unreachable).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A token sequence that does not follow the model-input grammar.
class MalformedInput : public Error {
public:
    MalformedInput(const std::string& message, std::size_t position)
        : Error("position " + std::to_string(position) + ": " + message), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class GeneratorError : public Error {
public:
    GeneratorError(std::string instance_id, const std::string& message)
        : Error("instance " + instance_id + ": " + message), instance_id_(std::move(instance_id)) {}

    const std::string& instance_id() const noexcept { return instance_id_; }

private:
    std::string instance_id_;
};

}  // namespace slicefix
