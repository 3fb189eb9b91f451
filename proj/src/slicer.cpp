// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include "slicefix/slicer.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace slicefix {

namespace {

std::set<StatementId> closure(const std::multimap<StatementId, StatementId>& adj, StatementId from) {
    std::set<StatementId> seen{from};
    std::deque<StatementId> work{from};
    while (!work.empty()) {
        StatementId v = work.front();
        work.pop_front();
        auto [lo, hi] = adj.equal_range(v);
        for (auto it = lo; it != hi; ++it) {
            if (seen.insert(it->second).second) work.push_back(it->second);
        }
    }
    return seen;
}

}  // namespace

std::set<StatementId> bidirectional_slice(const Pdg& pdg, StatementId n) {
    if (!pdg.contains(n)) throw std::out_of_range("slice criterion " + to_string(n) + " not in PDG");
    std::multimap<StatementId, StatementId> forward;
    std::multimap<StatementId, StatementId> backward;
    for (const auto& e : pdg.edges) {
        forward.emplace(e.src, e.dst);
        backward.emplace(e.dst, e.src);
    }
    std::set<StatementId> out = closure(backward, n);
    out.merge(closure(forward, n));
    out.erase(n);
    std::erase_if(out, [](StatementId id) { return id.is_synthetic(); });
    return out;
}

SliceContext extract_dependency_context(const Pdg& pdg, const MethodAst& m, const ClassContext& cc,
                                        StatementId buggy) {
    const Statement* target = m.find(buggy);
    if (!target || !target->is_node()) {
        throw std::out_of_range("buggy statement " + to_string(buggy) + " is not a method statement");
    }
    SliceContext ctx;
    ctx.buggy = SlicedStatement{target->line(), target->text};

    std::set<std::string> used = target->ingredients.vars_used;
    std::set<Invocation> calls = target->ingredients.invocations;
    for (StatementId id : bidirectional_slice(pdg, buggy)) {  // ordered by line
        const Statement* s = m.find(id);
        if (!s) continue;
        ctx.intra.push_back(SlicedStatement{s->line(), s->text});
        used.insert(s->ingredients.vars_used.begin(), s->ingredients.vars_used.end());
        calls.insert(s->ingredients.invocations.begin(), s->ingredients.invocations.end());
    }

    struct Ranked {
        int position;
        GlobalItem item;
    };
    std::vector<Ranked> matched;
    for (const auto& f : cc.public_fields) {
        if (used.contains(f.name)) {
            matched.push_back({f.first_token, GlobalItem{GlobalItem::Kind::Field, f.name, f.declaration}});
        }
    }
    for (const auto& sig : cc.public_method_signatures) {
        const bool hit = std::any_of(calls.begin(), calls.end(), [&](const Invocation& c) {
            return c.callee == sig.name && sig.accepts(c.arity);
        });
        if (hit) {
            matched.push_back(
                {sig.first_token, GlobalItem{GlobalItem::Kind::Method, sig.name, sig.signature}});
        }
    }
    std::stable_sort(matched.begin(), matched.end(),
                     [](const Ranked& a, const Ranked& b) { return a.position < b.position; });
    for (auto& r : matched) ctx.global.push_back(std::move(r.item));
    return ctx;
}

}  // namespace slicefix
