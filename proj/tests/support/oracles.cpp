// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include "oracles.hpp"

#include <algorithm>

namespace slicefix::testkit {

namespace {

// Nodes reachable from `start` without passing through `blocked`.
std::set<int> reach(const FlowGraph& g, int start, int blocked) {
    std::set<int> seen;
    if (start == blocked) return seen;
    std::vector<int> stack{start};
    seen.insert(start);
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (const auto& e : g.edges) {
            if (e.from != v || e.to == blocked || seen.contains(e.to)) continue;
            seen.insert(e.to);
            stack.push_back(e.to);
        }
    }
    return seen;
}

}  // namespace

FlowGraph from_cfg(const Cfg& g) {
    FlowGraph out;
    for (auto n : g.nodes) out.nodes.push_back(n.value);
    for (const auto& e : g.edges) out.edges.insert({e.from.value, e.to.value, std::string(to_string(e.label))});
    return out;
}

std::set<DepEdge> control_of(const Pdg& g) {
    std::set<DepEdge> out;
    for (const auto& e : g.control_edges()) out.emplace(e.src.value, e.dst.value, e.label);
    return out;
}

std::set<DepEdge> data_of(const Pdg& g) {
    std::set<DepEdge> out;
    for (const auto& e : g.data_edges()) out.emplace(e.src.value, e.dst.value, e.label);
    return out;
}

bool strictly_postdominates(const FlowGraph& g, int y, int x) {
    if (x == y || x == kExit) return false;
    return !reach(g, x, y).contains(kExit);
}

std::map<int, int> brute_ipdom(const FlowGraph& g) {
    std::map<int, int> out;
    for (int x : g.nodes) {
        if (x == kExit) continue;
        std::vector<int> strict;
        for (int y : g.nodes) {
            if (strictly_postdominates(g, y, x)) strict.push_back(y);
        }
        for (int y : strict) {
            const bool closest = std::all_of(strict.begin(), strict.end(),
                                             [&](int z) { return z == y || strictly_postdominates(g, z, y); });
            if (closest) out[x] = y;
        }
    }
    return out;
}

std::set<DepEdge> brute_cdg(const FlowGraph& g) {
    std::set<DepEdge> out;
    for (int y : g.nodes) {
        if (y == kEntry || y == kExit) continue;
        bool any = false;
        for (const auto& e : g.edges) {
            const bool pdom_z = y == e.to || strictly_postdominates(g, y, e.to);
            if (pdom_z && !strictly_postdominates(g, y, e.from)) {
                out.emplace(e.from, y, e.label);
                any = true;
            }
        }
        if (!any) out.emplace(kEntry, y, "none");
    }
    return out;
}

std::set<DepEdge> brute_ddg(const FlowGraph& g, const DefUse& du) {
    std::set<DepEdge> out;
    for (const auto& [d, vars] : du.defs) {
        for (const auto& v : vars) {
            // walk from d's successors, stopping at other definitions of v
            std::set<int> seen;
            std::vector<int> stack;
            for (const auto& e : g.edges) {
                if (e.from == d) stack.push_back(e.to);
            }
            while (!stack.empty()) {
                const int n = stack.back();
                stack.pop_back();
                if (!seen.insert(n).second) continue;
                auto u = du.uses.find(n);
                if (u != du.uses.end() && u->second.contains(v)) out.emplace(d, n, v);
                auto redef = du.defs.find(n);
                if (redef != du.defs.end() && redef->second.contains(v)) continue;
                for (const auto& e : g.edges) {
                    if (e.from == n) stack.push_back(e.to);
                }
            }
        }
    }
    return out;
}

std::set<int> brute_slice(const std::set<DepEdge>& edges, int n) {
    std::set<int> fwd{n};
    std::set<int> bwd{n};
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& [s, d, label] : edges) {
            if (fwd.contains(s) && fwd.insert(d).second) changed = true;
            if (bwd.contains(d) && bwd.insert(s).second) changed = true;
        }
    }
    std::set<int> out;
    for (int x : fwd) out.insert(x);
    for (int x : bwd) out.insert(x);
    out.erase(n);
    out.erase(kEntry);
    out.erase(kExit);
    return out;
}

}  // namespace slicefix::testkit
