// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicefix/java_frontend.hpp"

namespace slicefix {

enum class Branch { None, True, False, Exception };

std::string_view to_string(Branch b);

struct CfgEdge {
    StatementId from;
    StatementId to;
    Branch label = Branch::None;

    friend auto operator<=>(const CfgEdge&, const CfgEdge&) = default;
};

/// Statement-level control-flow graph with synthetic ENTRY and EXIT.
struct Cfg {
    std::vector<StatementId> nodes;  // ENTRY, EXIT, then statements in source order
    std::vector<CfgEdge> edges;      // sorted, unique

    std::size_t index_of(StatementId id) const;  // throws std::out_of_range
    bool contains(StatementId id) const;
    std::vector<CfgEdge> successors(StatementId id) const;
};

enum class DepKind { Control, Data };

struct PdgEdge {
    StatementId src;
    StatementId dst;
    DepKind kind = DepKind::Data;
    std::string label;  // variable for data edges, branch polarity for control edges

    friend auto operator<=>(const PdgEdge&, const PdgEdge&) = default;
};

/// Program dependence graph over the statements of one method. ENTRY is a
/// node so that top-level statements and parameter definitions have a source.
struct Pdg {
    std::vector<StatementId> nodes;
    std::vector<PdgEdge> edges;  // sorted, unique

    bool contains(StatementId id) const;
    std::vector<PdgEdge> control_edges() const;
    std::vector<PdgEdge> data_edges() const;
};

Cfg build_cfg(const MethodAst& m);

/// Immediate post-dominator of every node that has one (EXIT has none).
/// Throws StructuralError when EXIT is unreachable from some node.
std::map<StatementId, StatementId> postdominators(const Cfg& g);

std::vector<PdgEdge> build_cdg(const Cfg& g);

/// Def-use edges by reaching definitions; parameters are defined at ENTRY.
std::vector<PdgEdge> build_ddg(const MethodAst& m, const Cfg& g);

Pdg build_pdg(const MethodAst& m);

std::string cfg_to_dot(const Cfg& g, const MethodAst& m);
std::string pdg_to_dot(const Pdg& g, const MethodAst& m);
nlohmann::ordered_json cfg_to_json(const Cfg& g);
nlohmann::ordered_json pdg_to_json(const Pdg& g, const MethodAst& m);

}  // namespace slicefix
