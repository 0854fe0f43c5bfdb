#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "odslice/baselines.hpp"
#include "odslice/minilang.hpp"
#include "odslice/slicer.hpp"

namespace odslice {

/// Node labels of a set, in node order.
std::vector<std::string> labels(const Program& program, const NodeSet& nodes);

/// {slice, executions, iterations, total_ms, mode}. Wall-clock values live
/// only in `total_ms` and in each iteration's `wall_ms`.
nlohmann::json to_json(const Program& program, const SliceResult& result);

nlohmann::json to_json(const Program& program, const CorroborationReport& report);

/// Removes every wall-clock field, recursively.
nlohmann::json strip_timing(nlohmann::json j);

}  // namespace odslice
