#include "odslice/cfgdep.hpp"

#include <algorithm>
#include <sstream>

namespace odslice {

Cfg::Cfg(std::vector<NodeId> nodes, std::set<std::pair<std::size_t, std::size_t>> arcs)
    : nodes_(std::move(nodes)), arcs_(std::move(arcs)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_[nodes_[i]] = i + 2;
    succ_.assign(size(), {});
    pred_.assign(size(), {});
    for (auto [from, to] : arcs_) {
        succ_.at(from).push_back(to);
        pred_.at(to).push_back(from);
    }
}

std::size_t Cfg::vertex_of(NodeId n) const {
    auto it = index_.find(n);
    if (it == index_.end()) throw std::out_of_range("node not in this CFG");
    return it->second;
}

std::string Cfg::vertex_name(std::size_t v, const Program& program) const {
    if (v == kEntry) return "ENTRY";
    if (v == kExit) return "EXIT";
    return program.node_label(node_at(v));
}

const std::set<NodeId>& ControlDeps::of(NodeId n) const {
    static const std::set<NodeId> empty;
    auto it = deps.find(n);
    return it == deps.end() ? empty : it->second;
}

namespace {

class CfgBuilder {
public:
    CfgBuilder(const Program& program, std::uint32_t proc) : program_(program), proc_(proc) {
        for (const auto& n : program.nodes())
            if (n.proc == proc) nodes_.push_back(n.id);
        for (std::size_t i = 0; i < nodes_.size(); ++i) vertex_[nodes_[i]] = i + 2;
    }

    Cfg build() {
        const std::size_t first = block(program_.procedure(proc_).body, Cfg::kExit);
        arcs_.emplace(Cfg::kEntry, first);
        return Cfg(std::move(nodes_), std::move(arcs_));
    }

private:
    // Wires the block so that falling off its end continues at `next`;
    // returns the vertex control enters first.
    std::size_t block(const std::vector<Stmt>& stmts, std::size_t next) {
        for (auto it = stmts.rbegin(); it != stmts.rend(); ++it) next = stmt(*it, next);
        return next;
    }

    std::size_t stmt(const Stmt& s, std::size_t next) {
        const std::size_t v = vertex_.at(s.node);
        switch (s.kind) {
        case StmtKind::Return:
            arcs_.emplace(v, Cfg::kExit);
            break;
        case StmtKind::If:
            arcs_.emplace(v, block(s.then_body, next));
            arcs_.emplace(v, block(s.else_body, next));
            break;
        case StmtKind::While:
            arcs_.emplace(v, block(s.then_body, v));
            arcs_.emplace(v, next);
            break;
        default:
            arcs_.emplace(v, next);
            break;
        }
        return v;
    }

    const Program& program_;
    std::uint32_t proc_;
    std::vector<NodeId> nodes_;
    std::map<NodeId, std::size_t> vertex_;
    std::set<std::pair<std::size_t, std::size_t>> arcs_;
};

}  // namespace

Cfg build_cfg(const Program& program, std::uint32_t proc) { return CfgBuilder(program, proc).build(); }

std::vector<std::size_t> post_dominators(const Cfg& cfg) {
    // Cooper-Harvey-Kennedy dominators on the reversed graph rooted at Exit.
    const std::size_t n = cfg.size();
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> order;  // post-order of the reversed graph
    std::vector<std::size_t> rank(n, kNone);
    std::vector<char> seen(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{Cfg::kExit, 0}};
    seen[Cfg::kExit] = 1;
    while (!stack.empty()) {
        auto& [v, i] = stack.back();
        const auto& preds = cfg.pred()[v];
        if (i < preds.size()) {
            const std::size_t w = preds[i++];
            if (!seen[w]) {
                seen[w] = 1;
                stack.emplace_back(w, 0);
            }
        } else {
            rank[v] = order.size();
            order.push_back(v);
            stack.pop_back();
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (!seen[v]) {
            const std::string what = v == Cfg::kEntry ? std::string("ENTRY") : "node #" + std::to_string(cfg.node_at(v).value);
            throw UnreachableExit(what + " cannot reach EXIT");
        }
    }

    std::vector<std::size_t> ipdom(n, kNone);
    ipdom[Cfg::kExit] = Cfg::kExit;
    auto intersect = [&](std::size_t a, std::size_t b) {
        while (a != b) {
            while (rank[a] < rank[b]) a = ipdom[a];
            while (rank[b] < rank[a]) b = ipdom[b];
        }
        return a;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const std::size_t v = *it;
            if (v == Cfg::kExit) continue;
            std::size_t best = kNone;
            for (std::size_t s : cfg.succ()[v]) {
                if (ipdom[s] == kNone) continue;
                best = best == kNone ? s : intersect(s, best);
            }
            if (best != ipdom[v]) {
                ipdom[v] = best;
                changed = true;
            }
        }
    }
    return ipdom;
}

ControlDeps control_deps(const Cfg& cfg) {
    const auto ipdom = post_dominators(cfg);
    ControlDeps out;
    for (NodeId n : cfg.nodes()) out.deps[n];
    for (auto [a, b] : cfg.arcs()) {
        if (a == Cfg::kEntry) continue;
        for (std::size_t runner = b; runner != ipdom[a] && runner != Cfg::kExit; runner = ipdom[runner]) {
            out.deps[cfg.node_at(runner)].insert(cfg.node_at(a));
        }
    }
    return out;
}

ControlDeps control_deps(const Program& program) {
    ControlDeps out;
    for (std::uint32_t p = 0; p < program.procedures().size(); ++p) {
        auto cd = control_deps(build_cfg(program, p));
        out.deps.merge(cd.deps);
    }
    return out;
}

std::map<std::uint32_t, std::set<std::pair<NodeId, std::uint32_t>>> call_graph(const Program& program) {
    std::map<std::uint32_t, std::set<std::pair<NodeId, std::uint32_t>>> out;
    for (const auto& n : program.nodes()) {
        if (n.kind == StmtKind::Call) out[n.proc].emplace(n.id, n.stmt->callee_id);
    }
    return out;
}

std::string dump_cfg(const Program& program) {
    std::ostringstream os;
    for (std::uint32_t p = 0; p < program.procedures().size(); ++p) {
        const Cfg cfg = build_cfg(program, p);
        const std::string& name = program.procedure(p).name;
        for (auto [a, b] : cfg.arcs()) {
            auto label = [&](std::size_t v) {
                return v < 2 ? name + ":" + cfg.vertex_name(v, program) : cfg.vertex_name(v, program);
            };
            os << label(a) << " -> " << label(b) << '\n';
        }
    }
    return os.str();
}

std::string dump_control_deps(const Program& program, const ControlDeps& deps) {
    std::ostringstream os;
    for (const auto& [n, ctrl] : deps.deps)
        for (NodeId c : ctrl) os << program.node_label(c) << " -> " << program.node_label(n) << '\n';
    return os.str();
}

}  // namespace odslice
