// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The slicefix Authors

#include "slicefix/depgraph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/dynamic_bitset.hpp>

#include "slicefix/errors.hpp"

namespace slicefix {

std::string_view to_string(Branch b) {
    switch (b) {
        case Branch::None: return "none";
        case Branch::True: return "true";
        case Branch::False: return "false";
        case Branch::Exception: return "exc";
    }
    return "none";
}

std::size_t Cfg::index_of(StatementId id) const {
    auto it = std::find(nodes.begin(), nodes.end(), id);
    if (it == nodes.end()) throw std::out_of_range("no CFG node " + to_string(id));
    return static_cast<std::size_t>(it - nodes.begin());
}

bool Cfg::contains(StatementId id) const {
    return std::find(nodes.begin(), nodes.end(), id) != nodes.end();
}

std::vector<CfgEdge> Cfg::successors(StatementId id) const {
    std::vector<CfgEdge> out;
    for (const auto& e : edges) {
        if (e.from == id) out.push_back(e);
    }
    return out;
}

bool Pdg::contains(StatementId id) const {
    return std::find(nodes.begin(), nodes.end(), id) != nodes.end();
}

std::vector<PdgEdge> Pdg::control_edges() const {
    std::vector<PdgEdge> out;
    std::copy_if(edges.begin(), edges.end(), std::back_inserter(out),
                 [](const PdgEdge& e) { return e.kind == DepKind::Control; });
    return out;
}

std::vector<PdgEdge> Pdg::data_edges() const {
    std::vector<PdgEdge> out;
    std::copy_if(edges.begin(), edges.end(), std::back_inserter(out),
                 [](const PdgEdge& e) { return e.kind == DepKind::Data; });
    return out;
}

// ---- CFG --------------------------------------------------------------------

namespace {

class CfgBuilder {
public:
    explicit CfgBuilder(const MethodAst& m) : m_(m) {}

    Cfg run() {
        Cfg g;
        g.nodes.push_back(StatementId::entry());
        g.nodes.push_back(StatementId::exit());
        for (const auto* s : m_.nodes()) g.nodes.push_back(s->id);
        Pending end = block(m_.body, {{StatementId::entry(), Branch::None}});
        connect(end, StatementId::exit());
        g.edges.assign(edges_.begin(), edges_.end());
        return g;
    }

private:
    using Pending = std::vector<std::pair<StatementId, Branch>>;

    struct LoopFrame {
        StatementId header;
        Pending breaks;
    };

    StatementId id(std::size_t stmt) const { return m_.statements[stmt].id; }

    void connect(const Pending& preds, StatementId to) {
        for (const auto& [from, label] : preds) edges_.insert(CfgEdge{from, to, label});
    }

    void exceptional(StatementId s) {
        if (handlers_.empty()) return;
        for (StatementId head : handlers_.back()) edges_.insert(CfgEdge{s, head, Branch::Exception});
    }

    Pending block(const std::vector<FlowNode>& nodes, Pending preds) {
        for (const auto& n : nodes) preds = node(n, std::move(preds));
        return preds;
    }

    Pending node(const FlowNode& n, Pending preds) {
        switch (n.shape) {
            case FlowNode::Shape::Simple: {
                const Statement& st = m_.statements[n.stmt];
                connect(preds, st.id);
                exceptional(st.id);
                if (st.kind == StatementKind::Return || st.kind == StatementKind::Throw) {
                    edges_.insert(CfgEdge{st.id, StatementId::exit(), Branch::None});
                    return {};
                }
                if (st.kind == StatementKind::Jump) {
                    if (st.tokens.front().is("break")) {
                        loops_.back().breaks.emplace_back(st.id, Branch::None);
                    } else {
                        edges_.insert(CfgEdge{st.id, loops_.back().header, Branch::None});
                    }
                    return {};
                }
                return {{st.id, Branch::None}};
            }
            case FlowNode::Shape::Branch: {
                const StatementId p = id(n.stmt);
                connect(preds, p);
                exceptional(p);
                Pending out = block(n.body, {{p, Branch::True}});
                Pending other = n.has_else ? block(n.orelse, {{p, Branch::False}})
                                           : Pending{{p, Branch::False}};
                out.insert(out.end(), other.begin(), other.end());
                return out;
            }
            case FlowNode::Shape::Loop: {
                const StatementId h = id(n.stmt);
                connect(preds, h);
                exceptional(h);
                loops_.push_back(LoopFrame{h, {}});
                Pending back = block(n.body, {{h, Branch::True}});
                connect(back, h);
                Pending out{{h, Branch::False}};
                out.insert(out.end(), loops_.back().breaks.begin(), loops_.back().breaks.end());
                loops_.pop_back();
                return out;
            }
            case FlowNode::Shape::Scope:
                return block(n.body, std::move(preds));
            case FlowNode::Shape::Guarded: {
                std::vector<StatementId> heads;
                for (const auto& h : n.handlers) heads.push_back(id(h.head));
                if (n.body.empty()) {
                    for (StatementId head : heads) {
                        for (const auto& [from, label] : preds) {
                            edges_.insert(CfgEdge{from, head, Branch::Exception});
                        }
                    }
                }
                handlers_.push_back(heads);
                Pending out = block(n.body, std::move(preds));
                handlers_.pop_back();
                for (const auto& h : n.handlers) {
                    exceptional(id(h.head));
                    Pending hb = block(h.body, {{id(h.head), Branch::None}});
                    out.insert(out.end(), hb.begin(), hb.end());
                }
                if (n.has_finally) out = block(n.finally_body, std::move(out));
                return out;
            }
        }
        return preds;
    }

    const MethodAst& m_;
    std::set<CfgEdge> edges_;
    std::vector<LoopFrame> loops_;
    std::vector<std::vector<StatementId>> handlers_;
};

struct Adjacency {
    std::vector<std::vector<std::pair<std::size_t, Branch>>> succ;
    std::vector<std::vector<std::size_t>> pred;
};

Adjacency adjacency(const Cfg& g) {
    Adjacency a;
    a.succ.resize(g.nodes.size());
    a.pred.resize(g.nodes.size());
    std::map<StatementId, std::size_t> index;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) index[g.nodes[i]] = i;
    for (const auto& e : g.edges) {
        auto f = index.find(e.from);
        auto t = index.find(e.to);
        if (f == index.end() || t == index.end()) {
            throw StructuralError("CFG edge references unknown node");
        }
        a.succ[f->second].emplace_back(t->second, e.label);
        a.pred[t->second].push_back(f->second);
    }
    return a;
}

}  // namespace

Cfg build_cfg(const MethodAst& m) { return CfgBuilder(m).run(); }

// ---- post-dominators ----------------------------------------------------------

namespace {

// Full post-dominator sets by the iterative dataflow formulation on the
// reverse CFG: pdom(n) = {n} ∪ ⋂ pdom(s) over successors s.
std::vector<boost::dynamic_bitset<>> postdominator_sets(const Cfg& g, const Adjacency& a,
                                                        std::size_t exit) {
    const std::size_t n = g.nodes.size();

    // reverse reachability from EXIT, collecting a post-order of the reverse graph
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> order;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{exit, 0}};
    seen[exit] = 1;
    while (!stack.empty()) {
        auto& [v, i] = stack.back();
        if (i < a.pred[v].size()) {
            std::size_t w = a.pred[v][i++];
            if (!seen[w]) {
                seen[w] = 1;
                stack.emplace_back(w, 0);
            }
        } else {
            order.push_back(v);
            stack.pop_back();
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (!seen[v]) {
            throw StructuralError("EXIT is unreachable from " + to_string(g.nodes[v]));
        }
    }
    std::reverse(order.begin(), order.end());

    std::vector<boost::dynamic_bitset<>> pdom(n, boost::dynamic_bitset<>(n));
    for (auto& s : pdom) s.set();
    pdom[exit].reset();
    pdom[exit].set(exit);

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t v : order) {
            if (v == exit) continue;
            boost::dynamic_bitset<> next(n);
            next.set();
            for (const auto& [s, label] : a.succ[v]) next &= pdom[s];
            next.set(v);
            if (next != pdom[v]) {
                pdom[v] = std::move(next);
                changed = true;
            }
        }
    }
    return pdom;
}

std::vector<std::size_t> immediate_postdominators(const std::vector<boost::dynamic_bitset<>>& pdom,
                                                  std::size_t exit) {
    const std::size_t n = pdom.size();
    std::vector<std::size_t> ipdom(n, n);
    for (std::size_t v = 0; v < n; ++v) {
        if (v == exit) continue;
        const std::size_t want = pdom[v].count() - 1;
        for (std::size_t d = pdom[v].find_first(); d != boost::dynamic_bitset<>::npos;
             d = pdom[v].find_next(d)) {
            if (d != v && pdom[d].count() == want) {
                ipdom[v] = d;
                break;
            }
        }
    }
    return ipdom;
}

}  // namespace

std::map<StatementId, StatementId> postdominators(const Cfg& g) {
    const Adjacency a = adjacency(g);
    const std::size_t exit = g.index_of(StatementId::exit());
    const auto ipdom = immediate_postdominators(postdominator_sets(g, a, exit), exit);
    std::map<StatementId, StatementId> out;
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        if (ipdom[v] < g.nodes.size()) out.emplace(g.nodes[v], g.nodes[ipdom[v]]);
    }
    return out;
}

// ---- control dependence ---------------------------------------------------------

std::vector<PdgEdge> build_cdg(const Cfg& g) {
    const Adjacency a = adjacency(g);
    const std::size_t exit = g.index_of(StatementId::exit());
    const std::size_t entry = g.index_of(StatementId::entry());
    const auto ipdom = immediate_postdominators(postdominator_sets(g, a, exit), exit);

    std::set<PdgEdge> out;
    std::vector<char> has_parent(g.nodes.size(), 0);
    for (std::size_t x = 0; x < g.nodes.size(); ++x) {
        for (const auto& [z, label] : a.succ[x]) {
            // every node on the post-dominator tree path from z up to (but
            // excluding) ipdom(x) is control dependent on x
            for (std::size_t y = z; y != ipdom[x] && y < g.nodes.size(); y = ipdom[y]) {
                if (y == exit) break;
                out.insert(PdgEdge{g.nodes[x], g.nodes[y], DepKind::Control,
                                   std::string(to_string(label))});
                has_parent[y] = 1;
            }
        }
    }
    for (std::size_t y = 0; y < g.nodes.size(); ++y) {
        if (y == entry || y == exit || has_parent[y]) continue;
        out.insert(PdgEdge{StatementId::entry(), g.nodes[y], DepKind::Control,
                           std::string(to_string(Branch::None))});
    }
    return {out.begin(), out.end()};
}

// ---- data dependence -----------------------------------------------------------

std::vector<PdgEdge> build_ddg(const MethodAst& m, const Cfg& g) {
    const Adjacency a = adjacency(g);
    const std::size_t n = g.nodes.size();

    struct Def {
        std::size_t site;
        std::string var;
    };
    std::vector<Def> defs;
    std::vector<std::set<std::string>> uses(n);
    std::map<std::string, std::vector<std::size_t>> defs_of_var;
    std::vector<std::vector<std::size_t>> gen(n);

    auto add_def = [&](std::size_t site, const std::string& var) {
        defs_of_var[var].push_back(defs.size());
        gen[site].push_back(defs.size());
        defs.push_back(Def{site, var});
    };

    const std::size_t entry = g.index_of(StatementId::entry());
    for (const auto& p : m.params) add_def(entry, p.name);
    for (std::size_t v = 0; v < n; ++v) {
        const Statement* s = g.nodes[v].is_synthetic() ? nullptr : m.find(g.nodes[v]);
        if (!s) continue;
        for (const auto& var : s->ingredients.vars_defined) add_def(v, var);
        uses[v] = s->ingredients.vars_used;
    }

    const std::size_t d = defs.size();
    std::vector<boost::dynamic_bitset<>> kill(n, boost::dynamic_bitset<>(d));
    std::vector<boost::dynamic_bitset<>> gen_bits(n, boost::dynamic_bitset<>(d));
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t di : gen[v]) {
            gen_bits[v].set(di);
            for (std::size_t other : defs_of_var[defs[di].var]) {
                if (defs[other].site != v) kill[v].set(other);
            }
        }
    }

    std::vector<boost::dynamic_bitset<>> in(n, boost::dynamic_bitset<>(d));
    std::vector<boost::dynamic_bitset<>> out(n, boost::dynamic_bitset<>(d));
    std::deque<std::size_t> work;
    std::vector<char> queued(n, 1);
    for (std::size_t v = 0; v < n; ++v) work.push_back(v);
    while (!work.empty()) {
        std::size_t v = work.front();
        work.pop_front();
        queued[v] = 0;
        boost::dynamic_bitset<> next_in(d);
        for (std::size_t p : a.pred[v]) next_in |= out[p];
        in[v] = next_in;
        boost::dynamic_bitset<> next_out = gen_bits[v] | (next_in - kill[v]);
        if (next_out != out[v]) {
            out[v] = std::move(next_out);
            for (const auto& [s, label] : a.succ[v]) {
                if (!queued[s]) {
                    queued[s] = 1;
                    work.push_back(s);
                }
            }
        }
    }

    std::set<PdgEdge> edges;
    for (std::size_t u = 0; u < n; ++u) {
        for (const auto& var : uses[u]) {
            auto it = defs_of_var.find(var);
            if (it == defs_of_var.end()) continue;
            for (std::size_t di : it->second) {
                if (in[u].test(di)) {
                    edges.insert(PdgEdge{g.nodes[defs[di].site], g.nodes[u], DepKind::Data, var});
                }
            }
        }
    }
    return {edges.begin(), edges.end()};
}

Pdg build_pdg(const MethodAst& m) {
    const Cfg g = build_cfg(m);
    Pdg pdg;
    pdg.nodes.push_back(StatementId::entry());
    for (const auto* s : m.nodes()) pdg.nodes.push_back(s->id);
    std::set<PdgEdge> edges;
    for (auto& e : build_cdg(g)) edges.insert(std::move(e));
    for (auto& e : build_ddg(m, g)) edges.insert(std::move(e));
    pdg.edges.assign(edges.begin(), edges.end());
    return pdg;
}

// ---- dumps -------------------------------------------------------------------------

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

void dot_nodes(std::ostringstream& os, const std::vector<StatementId>& nodes, const MethodAst& m) {
    for (StatementId id : nodes) {
        std::string label = to_string(id);
        if (const Statement* s = id.is_synthetic() ? nullptr : m.find(id)) {
            label += ": " + s->text;
        }
        os << "  \"" << to_string(id) << "\" [label=\"" << dot_escape(label) << "\"];\n";
    }
}

}  // namespace

std::string cfg_to_dot(const Cfg& g, const MethodAst& m) {
    std::ostringstream os;
    os << "digraph cfg {\n  node [shape=box];\n";
    dot_nodes(os, g.nodes, m);
    for (const auto& e : g.edges) {
        os << "  \"" << to_string(e.from) << "\" -> \"" << to_string(e.to) << "\"";
        if (e.label != Branch::None) os << " [label=\"" << to_string(e.label) << "\"]";
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

std::string pdg_to_dot(const Pdg& g, const MethodAst& m) {
    std::ostringstream os;
    os << "digraph pdg {\n  node [shape=box];\n";
    dot_nodes(os, g.nodes, m);
    for (const auto& e : g.edges) {
        os << "  \"" << to_string(e.src) << "\" -> \"" << to_string(e.dst) << "\" [style="
           << (e.kind == DepKind::Control ? "solid" : "dashed") << ", label=\""
           << dot_escape(e.label) << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

nlohmann::ordered_json cfg_to_json(const Cfg& g) {
    nlohmann::ordered_json j;
    j["nodes"] = nlohmann::ordered_json::array();
    for (StatementId id : g.nodes) j["nodes"].push_back(to_string(id));
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : g.edges) {
        j["edges"].push_back({{"from", to_string(e.from)},
                              {"to", to_string(e.to)},
                              {"label", std::string(to_string(e.label))}});
    }
    return j;
}

nlohmann::ordered_json pdg_to_json(const Pdg& g, const MethodAst& m) {
    nlohmann::ordered_json j;
    j["method"] = m.name;
    j["nodes"] = nlohmann::ordered_json::array();
    for (StatementId id : g.nodes) {
        nlohmann::ordered_json node{{"id", to_string(id)}};
        if (const Statement* s = id.is_synthetic() ? nullptr : m.find(id)) {
            node["line"] = s->line();
            node["kind"] = std::string(to_string(s->kind));
            node["text"] = s->text;
        }
        j["nodes"].push_back(std::move(node));
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : g.edges) {
        j["edges"].push_back({{"src", to_string(e.src)},
                              {"dst", to_string(e.dst)},
                              {"kind", e.kind == DepKind::Control ? "control" : "data"},
                              {"label", e.label}});
    }
    return j;
}

}  // namespace slicefix
