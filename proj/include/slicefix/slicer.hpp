// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#pragma once

#include <set>
#include <string>
#include <vector>

#include "slicefix/depgraph.hpp"
#include "slicefix/java_frontend.hpp"

namespace slicefix {

struct SlicedStatement {
    int line = 0;
    std::string text;

    friend bool operator==(const SlicedStatement&, const SlicedStatement&) = default;
};

struct GlobalItem {
    enum class Kind { Field, Method };

    Kind kind = Kind::Field;
    std::string name;
    std::string text;  // declaration or signature

    friend bool operator==(const GlobalItem&, const GlobalItem&) = default;
};

/// Dependency context of one buggy statement: the statement itself, the
/// sliced statements of its method in source order, and the public class
/// members its ingredients refer to.
struct SliceContext {
    SlicedStatement buggy;
    std::vector<SlicedStatement> intra;
    std::vector<GlobalItem> global;

    friend bool operator==(const SliceContext&, const SliceContext&) = default;
};

/// Backward closure ∪ forward closure of `n` over all dependence edges,
/// without `n` and without synthetic nodes. Forward-reached nodes are not
/// expanded backwards. Throws std::out_of_range for an unknown node.
std::set<StatementId> bidirectional_slice(const Pdg& pdg, StatementId n);

SliceContext extract_dependency_context(const Pdg& pdg, const MethodAst& m, const ClassContext& cc,
                                        StatementId buggy);

}  // namespace slicefix
