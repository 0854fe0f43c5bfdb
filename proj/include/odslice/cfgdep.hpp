#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "odslice/minilang.hpp"

namespace odslice {

/// Per-procedure control flow graph. Vertices are local indices: 0 is Entry,
/// 1 is Exit, and 2.. are the procedure's nodes in NodeId order.
class Cfg {
public:
    static constexpr std::size_t kEntry = 0;
    static constexpr std::size_t kExit = 1;

    Cfg() = default;
    /// Builds an arbitrary graph over `nodes`; used by build_cfg and by tests
    /// that need shapes the structured language cannot express.
    Cfg(std::vector<NodeId> nodes, std::set<std::pair<std::size_t, std::size_t>> arcs);

    std::size_t size() const { return nodes_.size() + 2; }
    const std::vector<NodeId>& nodes() const { return nodes_; }
    NodeId node_at(std::size_t v) const { return nodes_.at(v - 2); }
    std::size_t vertex_of(NodeId n) const;
    bool contains(NodeId n) const { return index_.contains(n); }

    const std::set<std::pair<std::size_t, std::size_t>>& arcs() const { return arcs_; }
    const std::vector<std::vector<std::size_t>>& succ() const { return succ_; }
    const std::vector<std::vector<std::size_t>>& pred() const { return pred_; }

    /// "proc:line", or ENTRY / EXIT for the pseudo-vertices.
    std::string vertex_name(std::size_t v, const Program& program) const;

private:
    std::vector<NodeId> nodes_;
    std::map<NodeId, std::size_t> index_;
    std::set<std::pair<std::size_t, std::size_t>> arcs_;
    std::vector<std::vector<std::size_t>> succ_;
    std::vector<std::vector<std::size_t>> pred_;
};

class UnreachableExit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Controlling branch nodes per node (empty when entry-controlled).
struct ControlDeps {
    std::map<NodeId, std::set<NodeId>> deps;

    const std::set<NodeId>& of(NodeId n) const;
};

Cfg build_cfg(const Program& program, std::uint32_t proc);

/// Immediate post-dominator of every vertex except Exit, as vertex indices.
/// Throws UnreachableExit if some vertex cannot reach Exit.
std::vector<std::size_t> post_dominators(const Cfg& cfg);

/// Ferrante-style control dependence computed from the post-dominator tree.
ControlDeps control_deps(const Cfg& cfg);

/// Control dependence for every procedure of the program.
ControlDeps control_deps(const Program& program);

/// procedure index -> set of (call-site node, callee index)
std::map<std::uint32_t, std::set<std::pair<NodeId, std::uint32_t>>> call_graph(const Program& program);

std::string dump_cfg(const Program& program);
std::string dump_control_deps(const Program& program, const ControlDeps& deps);

}  // namespace odslice
