// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include "slicefix/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "slicefix/errors.hpp"
#include "slicefix/filter_ensemble.hpp"
#include "slicefix/lexer.hpp"

namespace slicefix {

namespace {

std::string percent(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * x);
    return buf;
}

// Cost and replacement count of the best suffix script from (i, j).
struct Cell {
    std::size_t cost = 0;
    std::size_t replaces = 0;
};

bool better(const Cell& x, const Cell& y) {
    return x.cost != y.cost ? x.cost < y.cost : x.replaces > y.replaces;
}

}  // namespace

std::vector<std::string> normalize(std::string_view line) { return lex_texts(line); }

std::string_view to_string(MatchMode m) { return m == MatchMode::Tokens ? "tokens" : "raw"; }

MatchMode match_mode_from_string(std::string_view s) {
    if (s == "tokens") return MatchMode::Tokens;
    if (s == "raw") return MatchMode::RawText;
    throw ConfigError("unknown match mode '" + std::string(s) + "' (expected tokens or raw)");
}

bool exact_match(std::string_view candidate, std::string_view ground_truth, MatchMode mode) {
    if (mode == MatchMode::RawText) return candidate == ground_truth;
    return normalize(candidate) == normalize(ground_truth);
}

std::set<std::string> correct_ids(const EnsembleResult& r, const std::map<std::string, std::string>& truth, int k,
                                  MatchMode mode) {
    std::set<std::string> out;
    for (const auto& bug : r.bugs) {
        auto t = truth.find(bug.id);
        if (t == truth.end() || !bug.processed) continue;
        const auto n = std::min<std::size_t>(bug.candidates.size(), static_cast<std::size_t>(std::max(k, 0)));
        for (std::size_t i = 0; i < n; ++i) {
            if (exact_match(bug.candidates[i].text, t->second, mode)) {
                out.insert(bug.id);
                break;
            }
        }
    }
    return out;
}

double fix_at_k(const EnsembleResult& r, const std::map<std::string, std::string>& truth, int k, MatchMode mode) {
    if (r.bugs.empty()) return 0.0;
    return static_cast<double>(correct_ids(r, truth, k, mode).size()) / static_cast<double>(r.bugs.size());
}

std::string_view to_string(BugType t) {
    switch (t) {
        case BugType::SimpleDelete: return "Simple Delete";
        case BugType::SimpleInsert: return "Simple Insert";
        case BugType::SimpleReplace: return "Simple Replace";
        case BugType::Mixed: return "Mixed";
    }
    return "?";
}

std::vector<EditOp> edit_script(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::vector<std::vector<Cell>> best(n + 1, std::vector<Cell>(m + 1));
    for (std::size_t i = n + 1; i-- > 0;) {
        for (std::size_t j = m + 1; j-- > 0;) {
            if (i == n && j == m) continue;
            Cell c{std::size_t(-1), 0};
            if (i < n && j < m) {
                Cell d = best[i + 1][j + 1];
                if (a[i] != b[j]) {
                    ++d.cost;
                    ++d.replaces;
                }
                if (better(d, c)) c = d;
            }
            if (i < n) {
                Cell d = best[i + 1][j];
                ++d.cost;
                if (better(d, c)) c = d;
            }
            if (j < m) {
                Cell d = best[i][j + 1];
                ++d.cost;
                if (better(d, c)) c = d;
            }
            best[i][j] = c;
        }
    }
    // Walk forward taking the first optimal move in Keep/Replace, Delete, Insert order.
    std::vector<EditOp> ops;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < n || j < m) {
        const Cell here = best[i][j];
        auto same = [&](Cell next, bool replace, bool step) {
            next.cost += step;
            next.replaces += replace;
            return next.cost == here.cost && next.replaces == here.replaces;
        };
        if (i < n && j < m && same(best[i + 1][j + 1], a[i] != b[j], a[i] != b[j])) {
            ops.push_back({a[i] == b[j] ? EditOp::Kind::Keep : EditOp::Kind::Replace, i, j});
            ++i;
            ++j;
        } else if (i < n && same(best[i + 1][j], false, true)) {
            ops.push_back({EditOp::Kind::Delete, i, j});
            ++i;
        } else {
            ops.push_back({EditOp::Kind::Insert, i, j});
            ++j;
        }
    }
    return ops;
}

BugType classify_bug_type(std::string_view buggy, std::string_view fixed) {
    const auto a = normalize(buggy);
    const auto b = normalize(fixed);
    if (a == b) throw std::invalid_argument("buggy and fixed lines are identical after normalization");
    if (b.empty()) return BugType::SimpleDelete;
    bool rep = false;
    bool ins = false;
    bool del = false;
    for (const auto& op : edit_script(a, b)) {
        rep = rep || op.kind == EditOp::Kind::Replace;
        ins = ins || op.kind == EditOp::Kind::Insert;
        del = del || op.kind == EditOp::Kind::Delete;
    }
    if (rep + ins + del > 1) return BugType::Mixed;
    if (del) return BugType::SimpleDelete;
    if (ins) return BugType::SimpleInsert;
    return BugType::SimpleReplace;
}

double Overlap::at(const std::string& a, const std::string& b) const {
    const auto ia = std::find(models.begin(), models.end(), a);
    const auto ib = std::find(models.begin(), models.end(), b);
    if (ia == models.end() || ib == models.end()) throw std::out_of_range("unknown model in overlap lookup");
    return ratio[static_cast<std::size_t>(ia - models.begin())][static_cast<std::size_t>(ib - models.begin())];
}

Overlap overlap_matrix(const std::vector<std::pair<std::string, std::set<std::string>>>& correct_sets) {
    if (correct_sets.empty()) throw std::invalid_argument("overlap_matrix needs at least one model");
    Overlap o;
    const std::size_t n = correct_sets.size();
    o.ratio.assign(n, std::vector<double>(n, 0.0));
    o.unique.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ci = correct_sets[i].second;
        o.models.push_back(correct_sets[i].first);
        for (std::size_t j = 0; j < n; ++j) {
            if (ci.empty()) continue;
            const auto& cj = correct_sets[j].second;
            const auto common = static_cast<double>(
                std::count_if(ci.begin(), ci.end(), [&](const std::string& id) { return cj.contains(id); }));
            o.ratio[i][j] = common / static_cast<double>(ci.size());
        }
        o.unique[i] = static_cast<std::size_t>(std::count_if(ci.begin(), ci.end(), [&](const std::string& id) {
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i && correct_sets[j].second.contains(id)) return false;
            }
            return true;
        }));
    }
    return o;
}

EvalReport build_report(const std::vector<std::pair<std::string, const EnsembleResult*>>& results,
                        const std::map<std::string, GroundTruth>& truth, int K, MatchMode mode) {
    if (K < 1) throw std::invalid_argument("report K must be at least 1");
    std::map<std::string, std::string> fixed;
    for (const auto& [id, t] : truth) fixed.emplace(id, t.fixed);

    EvalReport rep;
    rep.K = K;
    rep.mode = mode;
    std::vector<std::pair<std::string, std::set<std::string>>> sets;
    for (const auto& [name, res] : results) {
        ModelEval me;
        me.name = name;
        me.bugs = res->bugs.size();
        me.unprocessed = static_cast<std::size_t>(
            std::count_if(res->bugs.begin(), res->bugs.end(), [](const BugResult& b) { return !b.processed; }));
        for (int k = 1; k <= K; ++k) {
            const auto ids = correct_ids(*res, fixed, k, mode);
            me.fixed.push_back(ids.size());
            me.fix_at.push_back(me.bugs == 0 ? 0.0 : static_cast<double>(ids.size()) / static_cast<double>(me.bugs));
            if (k == K) me.correct = ids;
        }
        for (auto t : {BugType::SimpleDelete, BugType::SimpleInsert, BugType::SimpleReplace, BugType::Mixed}) {
            me.bug_types[t] = 0;
        }
        for (const auto& id : me.correct) {
            const auto& gt = truth.at(id);
            ++me.bug_types[classify_bug_type(gt.buggy, gt.fixed)];
        }
        sets.emplace_back(name, me.correct);
        rep.models.push_back(std::move(me));
    }
    if (!sets.empty()) rep.overlap = overlap_matrix(sets);
    return rep;
}

nlohmann::ordered_json to_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["K"] = r.K;
    j["match"] = to_string(r.mode);
    j["models"] = nlohmann::ordered_json::array();
    for (const auto& m : r.models) {
        nlohmann::ordered_json mj;
        mj["name"] = m.name;
        mj["bugs"] = m.bugs;
        mj["unprocessed"] = m.unprocessed;
        nlohmann::ordered_json fix = nlohmann::ordered_json::object();
        for (std::size_t k = 0; k < m.fix_at.size(); ++k) {
            fix[std::to_string(k + 1)] = {{"fixed", m.fixed[k]}, {"rate", m.fix_at[k]}};
        }
        mj["fix_at_k"] = std::move(fix);
        mj["correct"] = m.correct;
        nlohmann::ordered_json types = nlohmann::ordered_json::object();
        for (const auto& [t, n] : m.bug_types) types[std::string(to_string(t))] = n;
        mj["bug_types"] = std::move(types);
        j["models"].push_back(std::move(mj));
    }
    nlohmann::ordered_json ov;
    ov["models"] = r.overlap.models;
    ov["ratio"] = r.overlap.ratio;
    ov["unique"] = r.overlap.unique;
    j["overlap"] = std::move(ov);
    return j;
}

std::string to_markdown(const EvalReport& r) {
    std::ostringstream out;
    out << "# Evaluation report\n\n";
    out << "Exact match on " << (r.mode == MatchMode::Tokens ? "normalized tokens" : "raw text") << ".\n\n";

    out << "## Fix@k\n\n| Model | Bugs |";
    for (int k = 1; k <= r.K; ++k) out << " @" << k << " |";
    out << "\n|---|---|";
    for (int k = 1; k <= r.K; ++k) out << "---|";
    out << "\n";
    for (const auto& m : r.models) {
        out << "| " << m.name << " | " << m.bugs << " |";
        for (std::size_t k = 0; k < m.fix_at.size(); ++k) out << " " << m.fixed[k] << " (" << percent(m.fix_at[k]) << ") |";
        out << "\n";
    }

    out << "\n## Bug types of correct patches (k=" << r.K << ")\n\n";
    out << "| Model | Simple Delete | Simple Insert | Simple Replace | Mixed | Total |\n|---|---|---|---|---|---|\n";
    for (const auto& m : r.models) {
        out << "| " << m.name;
        for (const auto& [t, n] : m.bug_types) out << " | " << n;
        out << " | " << m.correct.size() << " |\n";
    }

    out << "\n## Overlap of correct patches\n\nRow i, column j: share of model i's correct patches also produced by model j.\n\n";
    out << "| |";
    for (const auto& name : r.overlap.models) out << " " << name << " |";
    out << " Unique |\n|---|";
    for (std::size_t i = 0; i <= r.overlap.models.size(); ++i) out << "---|";
    out << "\n";
    for (std::size_t i = 0; i < r.overlap.models.size(); ++i) {
        out << "| " << r.overlap.models[i] << " |";
        for (double x : r.overlap.ratio[i]) out << " " << percent(x) << " |";
        out << " " << r.overlap.unique[i] << " |\n";
    }
    return out.str();
}

}  // namespace slicefix
