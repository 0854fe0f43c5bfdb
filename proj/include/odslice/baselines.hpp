#pragma once

#include <chrono>
#include <cstdint>
#include <set>
#include <span>
#include <string>

#include "odslice/exec.hpp"
#include "odslice/minilang.hpp"
#include "odslice/sda.hpp"
#include "odslice/slicer.hpp"

namespace odslice {

struct ExecuteOnceOptions {
    /// Also close over the identity relation: every earlier occurrence of a
    /// node already in the slice joins it.
    bool korel_laski_identity = false;
};

struct ExecuteOnceStats {
    std::size_t trace_occurrences = 0;
    std::size_t du_pairs = 0;
    std::size_t trace_bytes = 0;
    std::size_t slice_occurrences = 0;
};

/// Records one complete trace up to I^q and traverses it backward.
SliceResult slice_execute_once(const Program& program, const StaticDeps& deps, std::span<const std::int64_t> input,
                               const Criterion& criterion, const ExecuteOnceOptions& options = {},
                               ExecuteOnceStats* stats = nullptr);

struct CorroborationReport {
    std::string mode;  // "upfront-all" or "upfront-slice"
    PairSet targeted;
    std::set<ContextualizedFrontier> exercised;
    std::uint64_t run_steps = 0;
    std::uint64_t prerun_steps = 0;
    std::chrono::nanoseconds wall{0};  // includes criterion resolution
    ResolvedCriterion criterion;
};

/// One run corroborating the whole static data dependence relation.
CorroborationReport corroborate_upfront_all(const Program& program, const StaticDeps& deps,
                                            std::span<const std::int64_t> input, const Criterion& criterion);

/// One run corroborating the static pairs inside the static slice of the criterion.
CorroborationReport corroborate_upfront_static_slice(const Program& program, const StaticDeps& deps,
                                                     std::span<const std::int64_t> input, const Criterion& criterion);

/// Offline fixed point over a report's exercised pairs, admitting a writer
/// only when the reader context lies inside the slice.
NodeSet slice_from_corroborated(const CorroborationReport& report, const StaticDeps& deps);

/// The report as a single-iteration slice result: targeted pairs as the
/// checked frontiers and the offline closure as the slice.
SliceResult as_slice_result(const CorroborationReport& report, const StaticDeps& deps);

}  // namespace odslice
