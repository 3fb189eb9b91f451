// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

// Brute-force reference implementations used by the unit and acceptance
// tests. Nodes are plain ints: statement lines, ENTRY = -1, EXIT = -2.

#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "slicefix/depgraph.hpp"

namespace slicefix::testkit {

inline constexpr int kEntry = -1;
inline constexpr int kExit = -2;

struct FlowEdge {
    int from;
    int to;
    std::string label;  // none / true / false / exc

    friend auto operator<=>(const FlowEdge&, const FlowEdge&) = default;
};

struct FlowGraph {
    std::vector<int> nodes;  // includes ENTRY and EXIT
    std::set<FlowEdge> edges;
};

struct DefUse {
    std::map<int, std::set<std::string>> defs;
    std::map<int, std::set<std::string>> uses;
};

using DepEdge = std::tuple<int, int, std::string>;  // src, dst, label

FlowGraph from_cfg(const Cfg& g);
std::set<DepEdge> control_of(const Pdg& g);
std::set<DepEdge> data_of(const Pdg& g);

/// y strictly post-dominates x iff y != x and removing y disconnects x from EXIT.
bool strictly_postdominates(const FlowGraph& g, int y, int x);

/// Closest strict post-dominator of every node except EXIT.
std::map<int, int> brute_ipdom(const FlowGraph& g);

/// Control dependences straight from the post-dominance definition, with the
/// ENTRY fallback for statements that depend on nothing.
std::set<DepEdge> brute_cdg(const FlowGraph& g);

/// (d, u, v) iff d defines v, u uses v, and some CFG path d -> u has no
/// intermediate definition of v.
std::set<DepEdge> brute_ddg(const FlowGraph& g, const DefUse& du);

/// Nodes reachable from n over edges (forward) plus nodes reaching n
/// (backward), computed by repeated relaxation; n and synthetic nodes removed.
std::set<int> brute_slice(const std::set<DepEdge>& edges, int n);

}  // namespace slicefix::testkit
