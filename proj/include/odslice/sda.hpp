#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "odslice/cfgdep.hpp"
#include "odslice/minilang.hpp"

namespace odslice {

/// (writer, reader)
using NodePair = std::pair<NodeId, NodeId>;
using NodeSet = std::set<NodeId>;
using PairSet = std::set<NodePair>;

/// Output of the static dependency analysis: the flow-, context- and
/// object-insensitive SD_data relation plus per-procedure SD_control.
struct StaticDeps {
    PairSet data;
    ControlDeps control;

    std::vector<std::vector<NodeId>> writers_by_reader;  // indexed by NodeId
    std::vector<std::vector<NodeId>> readers_by_writer;
    std::map<AbstractLocation, std::vector<NodeId>> writers_by_location;
    std::vector<std::vector<NodeId>> call_sites_by_proc;
    std::vector<std::uint32_t> proc_of;

    const std::vector<NodeId>& writers_of(NodeId reader) const { return writers_by_reader.at(reader.value); }
    const std::set<NodeId>& control_of(NodeId n) const { return control.of(n); }
    std::size_t node_count() const { return proc_of.size(); }
};

struct DefsUses {
    std::vector<AbstractLocation> defs;
    std::vector<AbstractLocation> uses;
};

DefsUses defs_uses(const NodeInfo& node);

StaticDeps static_data_deps(const Program& program);

NodeSet sd_data_of(const StaticDeps& deps, NodeId reader);

/// Backward closure over SD_data and SD_control, plus every call site of each
/// procedure that contributes a node.
NodeSet static_slice(const StaticDeps& deps, NodeId criterion);

/// Sorted `writer -> reader` lines.
std::string dump_data_deps(const Program& program, const StaticDeps& deps);

}  // namespace odslice
