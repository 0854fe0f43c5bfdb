#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "odslice/baselines.hpp"
#include "odslice/bench.hpp"
#include "odslice/corpus.hpp"

namespace {

std::vector<std::uint64_t> seed_range(std::int64_t n) {
    std::vector<std::uint64_t> s(static_cast<std::size_t>(n));
    std::iota(s.begin(), s.end(), 0);
    return s;
}

void BM_SweepSerial(benchmark::State& state) {
    const auto seeds = seed_range(state.range(0));
    odslice::corpus::SweepOptions opt;
    opt.check_upfront = false;
    for (auto _ : state) benchmark::DoNotOptimize(odslice::corpus::sweep_serial(seeds, opt).criteria);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepParallel(benchmark::State& state) {
    const auto seeds = seed_range(state.range(0));
    odslice::corpus::SweepOptions opt;
    opt.check_upfront = false;
    for (auto _ : state) benchmark::DoNotOptimize(odslice::corpus::sweep_parallel(seeds, opt).criteria);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

// Slicing one two-phase criterion; the argument is the irrelevant segment size.
template <class Slice>
void two_phase(benchmark::State& state, Slice slice) {
    const auto gp = odslice::bench::gen_program(odslice::bench::Family::TwoPhase,
                                                static_cast<std::uint32_t>(state.range(0)), 0);
    const auto deps = odslice::static_data_deps(gp.program);
    for (auto _ : state) benchmark::DoNotOptimize(slice(gp, deps).size());
}

void BM_TwoPhaseOnDemand(benchmark::State& state) {
    two_phase(state, [](const auto& gp, const auto& deps) {
        return odslice::slice_inter(gp.program, deps, gp.input, gp.criteria.front()).slice;
    });
}

void BM_TwoPhaseExecuteOnce(benchmark::State& state) {
    two_phase(state, [](const auto& gp, const auto& deps) {
        return odslice::slice_execute_once(gp.program, deps, gp.input, gp.criteria.front()).slice;
    });
}

void BM_TwoPhaseUpfrontAll(benchmark::State& state) {
    two_phase(state, [](const auto& gp, const auto& deps) {
        return odslice::slice_from_corroborated(
            odslice::corroborate_upfront_all(gp.program, deps, gp.input, gp.criteria.front()), deps);
    });
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TwoPhaseOnDemand)->Arg(1000)->Arg(4000)->Arg(16000)->Arg(64000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_TwoPhaseExecuteOnce)->Arg(1000)->Arg(4000)->Arg(16000)->Arg(64000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_TwoPhaseUpfrontAll)->Arg(1000)->Arg(4000)->Arg(16000)->Arg(64000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
