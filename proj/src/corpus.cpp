#include "odslice/corpus.hpp"

#include <algorithm>

#include "odslice/baselines.hpp"
#include "odslice/bench.hpp"
#include "odslice/report.hpp"
#include "odslice/sda.hpp"
#include "odslice/slicer.hpp"

namespace odslice::corpus {

void SweepStats::merge(const SweepStats& o, std::size_t max_samples) {
    programs += o.programs;
    criteria += o.criteria;
    errors += o.errors;
    mismatches += o.mismatches;
    subset_violations += o.subset_violations;
    upfront_disagreements += o.upfront_disagreements;
    identity_mismatches += o.identity_mismatches;
    bound_violations += o.bound_violations;
    total_executions += o.total_executions;
    total_runs += o.total_runs;
    total_slice_size += o.total_slice_size;
    max_executions = std::max(max_executions, o.max_executions);
    max_steps = std::max(max_steps, o.max_steps);
    samples.insert(samples.end(), o.samples.begin(), o.samples.end());
    std::sort(samples.begin(), samples.end());
    if (samples.size() > max_samples) samples.resize(max_samples);
}

SweepStats check_program(std::uint64_t seed, const SweepOptions& options) {
    SweepStats st;
    const auto gp = bench::gen_program(bench::Family::RandomCorpus, options.size, seed);
    const StaticDeps deps = static_data_deps(gp.program);
    st.programs = 1;
    for (const auto& c : gp.criteria) {
        ++st.criteria;
        try {
            const SliceResult od = slice_inter(gp.program, deps, gp.input, c);
            const SliceResult eo = slice_execute_once(gp.program, deps, gp.input, c);
            st.total_executions += od.executions;
            st.total_runs += od.runs;
            st.total_slice_size += od.slice.size();
            st.max_executions = std::max(st.max_executions, od.executions);
            st.max_steps = std::max(st.max_steps, eo.steps());
            if (od.executions > od.slice.size() + 1) ++st.bound_violations;
            if (!std::includes(od.slice.begin(), od.slice.end(), eo.slice.begin(), eo.slice.end()))
                ++st.subset_violations;
            ExecuteOnceOptions kl;
            kl.korel_laski_identity = true;
            if (slice_execute_once(gp.program, deps, gp.input, c, kl).slice != od.slice) ++st.identity_mismatches;
            if (options.check_upfront) {
                const auto report = corroborate_upfront_all(gp.program, deps, gp.input, c);
                if (slice_from_corroborated(report, deps) != od.slice) ++st.upfront_disagreements;
            }
            if (od.slice != eo.slice) {
                ++st.mismatches;
                Mismatch m;
                m.seed = seed;
                m.criterion = to_string(gp.program, c);
                NodeSet a, b;
                std::set_difference(od.slice.begin(), od.slice.end(), eo.slice.begin(), eo.slice.end(),
                                    std::inserter(a, a.end()));
                std::set_difference(eo.slice.begin(), eo.slice.end(), od.slice.begin(), od.slice.end(),
                                    std::inserter(b, b.end()));
                m.only_ondemand = labels(gp.program, a);
                m.only_execute_once = labels(gp.program, b);
                st.samples.push_back(std::move(m));
            }
        } catch (const std::exception&) {
            ++st.errors;
        }
    }
    std::sort(st.samples.begin(), st.samples.end());
    if (st.samples.size() > options.max_samples) st.samples.resize(options.max_samples);
    return st;
}

SweepStats sweep_serial(std::span<const std::uint64_t> seeds, const SweepOptions& options) {
    SweepStats total;
    for (auto seed : seeds) total.merge(check_program(seed, options), options.max_samples);
    return total;
}

SweepStats sweep_parallel(std::span<const std::uint64_t> seeds, const SweepOptions& options) {
    std::vector<SweepStats> parts(seeds.size());
    const auto n = static_cast<std::int64_t>(seeds.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i)
        parts[static_cast<std::size_t>(i)] = check_program(seeds[static_cast<std::size_t>(i)], options);
    SweepStats total;
    for (const auto& p : parts) total.merge(p, options.max_samples);
    return total;
}

}  // namespace odslice::corpus
