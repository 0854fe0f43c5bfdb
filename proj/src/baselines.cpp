#include "odslice/baselines.hpp"

#include <algorithm>

#include "absl/container/flat_hash_map.h"

namespace odslice {

namespace {

using Clock = std::chrono::steady_clock;

struct FrameNode {
    FrameId frame;
    std::uint32_t node;
    bool operator==(const FrameNode&) const = default;
    template <class H>
    friend H AbslHashValue(H h, const FrameNode& k) {
        return H::combine(std::move(h), k.frame, k.node);
    }
};

}  // namespace

SliceResult slice_execute_once(const Program& program, const StaticDeps& deps, std::span<const std::int64_t> input,
                               const Criterion& criterion, const ExecuteOnceOptions& options,
                               ExecuteOnceStats* stats) {
    const auto t0 = Clock::now();
    if (criterion.node.value >= program.node_count()) throw std::out_of_range("criterion node out of range");
    if (criterion.occurrence && *criterion.occurrence == 0)
        throw std::invalid_argument("occurrence numbers start at 1");

    const NodeId target = criterion.node;
    std::optional<Occurrence> stop;
    if (criterion.occurrence) stop = Occurrence{target, *criterion.occurrence};

    Trace trace;
    try {
        trace = record_trace(program, input, stop);
    } catch (const StopNotReached& e) {
        throw CriterionNeverExecuted(target, e.executed(),
                                     program.node_label(target) + "#" + std::to_string(*criterion.occurrence));
    }
    const auto& occ = trace.occurrences;

    std::int64_t seed = -1;
    for (std::size_t i = occ.size(); i-- > 0;) {
        if (occ[i].occ.node == target) {
            seed = static_cast<std::int64_t>(i);
            break;
        }
    }
    if (seed < 0) throw CriterionNeverExecuted(target, 0, program.node_label(target) + "#last");
    const auto seed_idx = static_cast<std::size_t>(seed);

    // Writers of each reader occurrence, in CSR form, restricted to reads
    // made no later than the completion of I^q.
    const std::uint64_t horizon = occ[seed_idx].end;
    std::vector<std::size_t> start(occ.size() + 1, 0);
    for (const auto& du : trace.du_pairs)
        if (du.time <= horizon) ++start[du.reader + 1];
    for (std::size_t i = 0; i < occ.size(); ++i) start[i + 1] += start[i];
    std::vector<std::size_t> writers(start.back());
    {
        std::vector<std::size_t> fill(start.begin(), start.end() - 1);
        for (const auto& du : trace.du_pairs)
            if (du.time <= horizon) writers[fill[du.reader]++] = du.writer;
    }

    // Dynamic control parents: the last prior occurrence of each controlling
    // node within the same activation.
    std::vector<std::vector<std::size_t>> control(occ.size());
    {
        absl::flat_hash_map<FrameNode, std::size_t> last;
        for (std::size_t i = 0; i <= seed_idx && i < occ.size(); ++i) {
            const TraceEntry& e = occ[i];
            for (NodeId c : deps.control_of(e.occ.node))
                if (auto it = last.find(FrameNode{e.frame, c.value}); it != last.end())
                    control[i].push_back(it->second);
            last[FrameNode{e.frame, e.occ.node.value}] = i;
        }
    }

    std::vector<std::vector<std::size_t>> by_node;
    if (options.korel_laski_identity) {
        by_node.resize(program.node_count());
        for (std::size_t i = 0; i <= seed_idx; ++i) by_node[occ[i].occ.node.value].push_back(i);
    }

    std::vector<char> in(occ.size(), 0);
    std::vector<char> node_done(program.node_count(), 0);
    std::vector<std::size_t> work;
    auto add = [&](std::size_t i) {
        if (!in[i]) {
            in[i] = 1;
            work.push_back(i);
        }
    };
    add(seed_idx);
    std::size_t members = 0;
    while (!work.empty()) {
        const std::size_t i = work.back();
        work.pop_back();
        ++members;
        for (std::size_t k = start[i]; k < start[i + 1]; ++k) add(writers[k]);
        for (std::size_t c : control[i]) add(c);
        if (occ[i].caller >= 0) add(static_cast<std::size_t>(occ[i].caller));
        if (options.korel_laski_identity && !node_done[occ[i].occ.node.value]) {
            node_done[occ[i].occ.node.value] = 1;
            for (std::size_t j : by_node[occ[i].occ.node.value]) add(j);
        }
    }

    SliceResult res;
    res.mode = "execute-once";
    for (std::size_t i = 0; i < occ.size(); ++i)
        if (in[i]) res.slice.insert(occ[i].occ.node);
    res.criterion.occ = occ[seed_idx].occ;
    res.criterion.context = trace.context_of(seed_idx);
    res.criterion.validated = true;

    IterationLog log;
    log.iteration = 1;
    log.ran = true;
    log.run_steps = seed_idx + 1;
    log.wall = Clock::now() - t0;
    res.iterations.push_back(std::move(log));
    res.executions = 1;
    res.runs = 1;
    res.total = Clock::now() - t0;

    if (stats) {
        stats->trace_occurrences = occ.size();
        stats->du_pairs = trace.du_pairs.size();
        stats->trace_bytes = occ.size() * sizeof(TraceEntry) + trace.du_pairs.size() * sizeof(DuPair);
        stats->slice_occurrences = members;
    }
    return res;
}

namespace {

CorroborationReport upfront(const Program& program, const StaticDeps& deps, std::span<const std::int64_t> input,
                            const Criterion& criterion, std::string mode, bool restrict_to_static_slice) {
    const auto t0 = Clock::now();
    CorroborationReport report;
    report.mode = std::move(mode);
    report.criterion = resolve_criterion(program, input, criterion);
    report.prerun_steps = report.criterion.prerun_steps;
    if (restrict_to_static_slice) {
        const NodeSet slice = static_slice(deps, criterion.node);
        for (const auto& [w, r] : deps.data)
            if (slice.contains(w) && slice.contains(r)) report.targeted.emplace(w, r);
    } else {
        report.targeted = deps.data;
    }
    CorroborationStats stats;
    try {
        report.exercised =
            corroborate_frontiers_ctx(program, deps, input, report.targeted, report.criterion.occ, &stats);
    } catch (const StopNotReached& e) {
        throw CriterionNeverExecuted(criterion.node, e.executed(), program.node_label(criterion.node));
    }
    report.criterion.validated = true;
    report.run_steps = stats.steps;
    report.wall = Clock::now() - t0;
    return report;
}

}  // namespace

CorroborationReport corroborate_upfront_all(const Program& program, const StaticDeps& deps,
                                            std::span<const std::int64_t> input, const Criterion& criterion) {
    return upfront(program, deps, input, criterion, "upfront-all", false);
}

CorroborationReport corroborate_upfront_static_slice(const Program& program, const StaticDeps& deps,
                                                     std::span<const std::int64_t> input, const Criterion& criterion) {
    return upfront(program, deps, input, criterion, "upfront-slice", true);
}

NodeSet slice_from_corroborated(const CorroborationReport& report, const StaticDeps& deps) {
    NodeSet S{report.criterion.occ.node};
    S.insert(report.criterion.context.begin(), report.criterion.context.end());
    std::map<NodeId, std::vector<const ContextualizedFrontier*>> by_reader;
    for (const auto& cf : report.exercised) by_reader[cf.reader].push_back(&cf);

    for (bool changed = true; changed;) {
        changed = false;
        const NodeSet control = missing_control(S, deps);
        if (!control.empty()) {
            S.insert(control.begin(), control.end());
            changed = true;
        }
        std::vector<NodeId> added;
        for (NodeId r : S) {
            auto it = by_reader.find(r);
            if (it == by_reader.end()) continue;
            for (const auto* cf : it->second) {
                if (!std::all_of(cf->reader_ctx.begin(), cf->reader_ctx.end(),
                                 [&](NodeId c) { return S.contains(c); }))
                    continue;
                if (!S.contains(cf->writer)) added.push_back(cf->writer);
                for (NodeId c : cf->writer_ctx)
                    if (!S.contains(c)) added.push_back(c);
            }
        }
        if (!added.empty()) {
            S.insert(added.begin(), added.end());
            changed = true;
        }
    }
    return S;
}

SliceResult as_slice_result(const CorroborationReport& report, const StaticDeps& deps) {
    SliceResult res;
    res.mode = report.mode;
    res.slice = slice_from_corroborated(report, deps);
    res.criterion = report.criterion;
    res.prerun_steps = report.prerun_steps;
    IterationLog log;
    log.iteration = 1;
    log.frontiers2check = report.targeted;
    for (const auto& cf : report.exercised) log.obs_defs.insert(cf.writer);
    log.ran = true;
    log.run_steps = report.run_steps;
    log.wall = report.wall;
    res.iterations.push_back(std::move(log));
    res.executions = 1;
    res.runs = 1;
    res.total = report.wall;
    return res;
}

}  // namespace odslice
