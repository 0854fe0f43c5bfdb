#include "odslice/sda.hpp"

#include <algorithm>
#include <sstream>

namespace odslice {

DefsUses defs_uses(const NodeInfo& node) { return {node.defs, node.uses}; }

StaticDeps static_data_deps(const Program& program) {
    StaticDeps deps;
    const std::size_t n = program.node_count();
    deps.writers_by_reader.assign(n, {});
    deps.readers_by_writer.assign(n, {});
    deps.proc_of.resize(n);
    deps.call_sites_by_proc.assign(program.procedures().size(), {});

    std::map<AbstractLocation, std::vector<NodeId>> readers_by_location;
    for (const auto& info : program.nodes()) {
        deps.proc_of[info.id.value] = info.proc;
        for (const auto& loc : info.defs) deps.writers_by_location[loc].push_back(info.id);
        for (const auto& loc : info.uses) readers_by_location[loc].push_back(info.id);
        if (info.kind == StmtKind::Call) deps.call_sites_by_proc[info.stmt->callee_id].push_back(info.id);
    }
    for (const auto& [loc, readers] : readers_by_location) {
        auto w = deps.writers_by_location.find(loc);
        if (w == deps.writers_by_location.end()) continue;
        for (NodeId r : readers)
            for (NodeId wr : w->second) deps.data.emplace(wr, r);
    }
    for (auto [w, r] : deps.data) {
        deps.writers_by_reader[r.value].push_back(w);
        deps.readers_by_writer[w.value].push_back(r);
    }
    deps.control = control_deps(program);
    return deps;
}

NodeSet sd_data_of(const StaticDeps& deps, NodeId reader) {
    const auto& w = deps.writers_of(reader);
    return {w.begin(), w.end()};
}

NodeSet static_slice(const StaticDeps& deps, NodeId criterion) {
    NodeSet slice{criterion};
    std::vector<NodeId> work{criterion};
    std::vector<char> proc_done(deps.call_sites_by_proc.size(), 0);
    auto add = [&](NodeId n) {
        if (slice.insert(n).second) work.push_back(n);
    };
    while (!work.empty()) {
        const NodeId n = work.back();
        work.pop_back();
        for (NodeId w : deps.writers_of(n)) add(w);
        for (NodeId c : deps.control_of(n)) add(c);
        const std::uint32_t p = deps.proc_of[n.value];
        if (!proc_done[p]) {
            proc_done[p] = 1;
            for (NodeId site : deps.call_sites_by_proc[p]) add(site);
        }
    }
    return slice;
}

std::string dump_data_deps(const Program& program, const StaticDeps& deps) {
    std::vector<std::string> lines;
    lines.reserve(deps.data.size());
    for (auto [w, r] : deps.data) lines.push_back(program.node_label(w) + " -> " + program.node_label(r));
    std::sort(lines.begin(), lines.end());
    std::ostringstream os;
    for (const auto& l : lines) os << l << '\n';
    return os.str();
}

}  // namespace odslice
