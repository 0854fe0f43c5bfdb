// Acceptance checks. One line per criterion: "criterion N: PASS|FAIL  details".
// Exit status is 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "odslice/baselines.hpp"
#include "odslice/bench.hpp"
#include "odslice/corpus.hpp"
#include "odslice/report.hpp"
#include "support.hpp"

using namespace odslice;
namespace ob = odslice::bench;

namespace {

// Pinned thresholds.
constexpr std::size_t kC1Programs = 500;
constexpr double kC1MaxSeconds = 600.0;
constexpr std::size_t kC2Programs = 100;
constexpr std::size_t kC2Subsets = 20;
constexpr double kC4MaxMeanExecutions = 12.0;
constexpr double kC5MinSpearman = 0.8;
constexpr double kC5MaxOndemandSpread = 2.0;
constexpr double kC5MinExecuteOnceGrowth = 8.0;
constexpr double kC6MaxSpearman = -0.5;
constexpr std::size_t kC6MinDistinctSizes = 10;
constexpr double kC7MatchTolerance = 0.20;
constexpr double kC7HighCoverage = 0.90;
constexpr double kC7LowCoverage = 0.30;
constexpr std::size_t kC9Programs = 60;
constexpr int kTimingTrials = 7;

const std::vector<std::uint32_t> kTwoPhaseSizes{1000, 2000, 4000, 8000, 16000, 32000};

int failures = 0;

void report(int n, bool pass, const std::string& details) {
    std::printf("criterion %d: %s  %s\n", n, pass ? "PASS" : "FAIL", details.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Median wall time of one slicing mode, in milliseconds.
double median_ms(const ob::GeneratedProgram& gp, const StaticDeps& deps, const Criterion& c, const std::string& mode,
                 int trials = kTimingTrials) {
    std::vector<double> xs;
    for (int t = 0; t < trials; ++t) {
        const auto rec = ob::measure(gp, deps, c, mode, 1);
        if (rec.status != "ok") throw std::runtime_error(mode + " failed: " + rec.status);
        xs.push_back(rec.wall_ms);
    }
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    return xs[xs.size() / 2];
}

bool monotone_increasing(const std::vector<double>& xs) {
    return std::adjacent_find(xs.begin(), xs.end(), [](double a, double b) { return b <= a; }) == xs.end();
}

std::vector<std::uint64_t> seeds(std::size_t n) {
    std::vector<std::uint64_t> s(n);
    std::iota(s.begin(), s.end(), 0);
    return s;
}

corpus::SweepStats corpus_stats;

void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto all = seeds(kC1Programs);
    corpus_stats = corpus::sweep_parallel(all, corpus::SweepOptions{});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto& st = corpus_stats;
    std::string details = fmt("programs=%zu criteria=%zu mismatches=%zu errors=%zu subset_violations=%zu "
                              "upfront_disagreements=%zu seconds=%.1f",
                              st.programs, st.criteria, st.mismatches, st.errors, st.subset_violations,
                              st.upfront_disagreements, secs);
    if (!st.samples.empty()) {
        const auto& m = st.samples.front();
        details += fmt(" first_mismatch=seed%llu:%s", static_cast<unsigned long long>(m.seed), m.criterion.c_str());
    }
    report(1, st.programs >= kC1Programs && st.mismatches == 0 && st.errors == 0 && secs < kC1MaxSeconds, details);
}

void criterion2() {
    std::mt19937_64 rng(2024);
    std::size_t checks = 0, diffs = 0, exercised = 0;
    for (std::uint64_t seed = 0; seed < kC2Programs; ++seed) {
        const auto gp = ob::gen_program(ob::Family::RandomCorpus, 4, seed);
        const auto deps = static_data_deps(gp.program);
        const auto census = census_all(gp.program, gp.input);
        const std::vector<NodePair> all(deps.data.begin(), deps.data.end());
        for (std::size_t k = 0; k < kC2Subsets; ++k) {
            const auto keep = 1 + rng() % 4;  // inclusion probability 1/keep
            PairSet f2c;
            for (const auto& pr : all)
                if (rng() % keep == 0) f2c.insert(pr);
            const auto& c = gp.criteria[rng() % gp.criteria.size()];
            const Occurrence stop{c.node, static_cast<std::uint32_t>(1 + rng() % census.counts[c.node.value])};
            const auto got = corroborate_frontiers_ctx(gp.program, deps, gp.input, f2c, stop);
            const auto want = testing::trace_filtered(gp.program, gp.input, f2c, stop);
            ++checks;
            exercised += want.size();
            if (got != want) ++diffs;
        }
    }
    report(2, diffs == 0, fmt("checks=%zu differing=%zu oracle_tuples=%zu", checks, diffs, exercised));
}

void criterion3() {
    std::size_t pairs = 0, violations = 0;
    for (std::uint64_t seed = 0; seed < kC1Programs; ++seed) {
        const auto gp = ob::gen_program(ob::Family::RandomCorpus, 4, seed);
        const auto deps = static_data_deps(gp.program);
        const auto trace = record_trace(gp.program, gp.input, std::nullopt);
        for (const auto& du : trace.du_pairs) {
            ++pairs;
            if (!deps.data.contains({trace.occurrences[du.writer].occ.node, trace.occurrences[du.reader].occ.node}))
                ++violations;
        }
    }
    report(3, violations == 0, fmt("programs=%zu du_pairs=%zu violations=%zu", kC1Programs, pairs, violations));
}

void criterion4() {
    const auto& st = corpus_stats;
    report(4, st.bound_violations == 0 && st.mean_executions() <= kC4MaxMeanExecutions && st.criteria > 0,
           fmt("slices=%zu bound_violations=%zu mean_executions=%.2f max_executions=%zu", st.criteria,
               st.bound_violations, st.mean_executions(), st.max_executions));
}

struct TwoPhasePoint {
    std::uint64_t steps = 0;
    double ondemand_ms = 0, execute_once_ms = 0, upfront_all_ms = 0, upfront_slice_ms = 0;
    double coverage = 0;  // static slice size / node count
};

std::vector<TwoPhasePoint> two_phase_series(bool coupled) {
    std::vector<TwoPhasePoint> out;
    ob::GenOptions opt;
    opt.coupled = coupled;
    for (auto size : kTwoPhaseSizes) {
        const auto gp = ob::gen_program(ob::Family::TwoPhase, size, 0, opt);
        const auto deps = static_data_deps(gp.program);
        const auto& c = gp.criteria.front();
        TwoPhasePoint p;
        p.steps = ob::measure(gp, deps, c, "execute-once", 1).steps;
        p.ondemand_ms = median_ms(gp, deps, c, "ondemand-inter");
        p.execute_once_ms = median_ms(gp, deps, c, "execute-once");
        p.upfront_all_ms = median_ms(gp, deps, c, "upfront-all");
        p.upfront_slice_ms = median_ms(gp, deps, c, "upfront-slice");
        p.coverage = double(static_slice(deps, c.node).size()) / double(gp.program.node_count());
        out.push_back(p);
    }
    return out;
}

std::vector<TwoPhasePoint> uncoupled, coupled;

void criterion5() {
    std::vector<double> steps, gain, od;
    for (const auto& p : uncoupled) {
        steps.push_back(double(p.steps));
        gain.push_back(p.execute_once_ms / p.ondemand_ms);
        od.push_back(p.ondemand_ms);
    }
    const double rho = ob::spearman(steps, gain);
    const double spread = *std::max_element(od.begin(), od.end()) / *std::min_element(od.begin(), od.end());
    const double growth = uncoupled.back().execute_once_ms / uncoupled.front().execute_once_ms;
    std::ostringstream pts;
    for (const auto& p : uncoupled)
        pts << fmt(" [%llu steps: od=%.3fms eo=%.3fms]", static_cast<unsigned long long>(p.steps), p.ondemand_ms,
                   p.execute_once_ms);
    report(5, rho >= kC5MinSpearman && spread < kC5MaxOndemandSpread && growth >= kC5MinExecuteOnceGrowth,
           fmt("spearman(steps,gain)=%.2f ondemand_spread=%.2fx execute_once_growth=%.2fx", rho, spread, growth) +
               pts.str());
}

void criterion6() {
    const auto gp = ob::gen_program(ob::Family::SortLoop, 32, 0);
    const auto deps = static_data_deps(gp.program);
    std::vector<double> sizes, gains;
    for (const auto& c : gp.criteria) {
        const auto rec = ob::measure(gp, deps, c, "ondemand-inter", 1);
        if (rec.status != "ok") continue;
        const double od = median_ms(gp, deps, c, "ondemand-inter", 5);
        const double eo = median_ms(gp, deps, c, "execute-once", 5);
        sizes.push_back(double(rec.slice_size));
        gains.push_back(eo / od);
    }
    const std::set<double> distinct(sizes.begin(), sizes.end());
    const double rho = ob::spearman(sizes, gains);
    report(6, distinct.size() >= kC6MinDistinctSizes && rho <= kC6MaxSpearman,
           fmt("criteria=%zu distinct_slice_sizes=%zu spearman(slice_size,gain)=%.2f", sizes.size(), distinct.size(),
               rho));
}

void criterion7() {
    const auto& big = uncoupled.back();
    const bool faster = big.ondemand_ms < big.upfront_all_ms;
    std::vector<double> ua;
    for (const auto& p : uncoupled) ua.push_back(p.upfront_all_ms);
    const bool grows = monotone_increasing(ua);

    const auto& hi = coupled.back();
    const double rel = std::abs(hi.upfront_slice_ms - hi.upfront_all_ms) / hi.upfront_all_ms;
    const bool high_ok = hi.coverage > kC7HighCoverage && rel <= kC7MatchTolerance;
    const bool low_ok = big.coverage < kC7LowCoverage && big.upfront_slice_ms < big.upfront_all_ms;
    report(7, faster && grows && high_ok && low_ok,
           fmt("largest: ondemand=%.3fms upfront_all=%.3fms; upfront_all_monotone=%s; "
               "coverage %.0f%%: slice=%.3fms all=%.3fms (diff %.0f%%); coverage %.0f%%: slice=%.3fms all=%.3fms",
               big.ondemand_ms, big.upfront_all_ms, grows ? "yes" : "no", hi.coverage * 100, hi.upfront_slice_ms,
               hi.upfront_all_ms, rel * 100, big.coverage * 100, big.upfront_slice_ms, big.upfront_all_ms));
}

void criterion8() {
    bool all_less = true;
    std::ostringstream pts;
    std::size_t paper_inter = 0, paper_intra = 0;
    for (std::uint32_t size : {1u, 2u, 4u, 8u}) {
        const auto gp = ob::gen_program(ob::Family::DoubleCall, size, 0);
        const auto deps = static_data_deps(gp.program);
        const auto& c = gp.criteria.front();
        const auto inter = slice_inter(gp.program, deps, gp.input, c);
        const auto inl = inline_program(gp.program, gp.input, c);
        const auto intra = slice_intra(inl.program, static_data_deps(inl.program), gp.input, inl.criterion);
        all_less &= inter.runs < intra.runs;
        all_less &= inl.map_back(intra.slice) == inter.slice;
        if (size == 1) {
            paper_inter = inter.runs;
            paper_intra = intra.runs;
        }
        pts << fmt(" [size %u: inter %zu runs, inlined intra %zu runs]", size, inter.runs, intra.runs);
    }
    report(8, all_less && paper_inter < paper_intra,
           fmt("template shape: %zu vs %zu runs (reference 2 vs 7)", paper_inter, paper_intra) + pts.str());
}

void criterion9() {
    std::size_t instances = 0, unexpected = 0, nondeterministic = 0;
    for (std::uint64_t seed = 0; seed < kC9Programs; ++seed) {
        const auto gp = ob::gen_program(ob::Family::RandomCorpus, 4, seed);
        const auto deps = static_data_deps(gp.program);
        const std::size_t n = std::min<std::size_t>(gp.criteria.size(), 6);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = gp.criteria[i];
            for (const auto& mode : ob::all_modes()) {
                ++instances;
                const auto rec = ob::measure(gp, deps, c, mode, 1);
                // Inlining rejects some shapes by contract; every other outcome must be a slice.
                if (rec.status != "ok" && rec.status != "InlineUnsupported" && rec.status != "InlineBudgetExceeded")
                    ++unexpected;
            }
            const auto a = strip_timing(to_json(gp.program, slice_inter(gp.program, deps, gp.input, c))).dump();
            const auto b = strip_timing(to_json(gp.program, slice_inter(gp.program, deps, gp.input, c))).dump();
            const auto e1 = strip_timing(to_json(gp.program, slice_execute_once(gp.program, deps, gp.input, c))).dump();
            const auto e2 = strip_timing(to_json(gp.program, slice_execute_once(gp.program, deps, gp.input, c))).dump();
            const auto u1 =
                strip_timing(to_json(gp.program, corroborate_upfront_all(gp.program, deps, gp.input, c))).dump();
            const auto u2 =
                strip_timing(to_json(gp.program, corroborate_upfront_all(gp.program, deps, gp.input, c))).dump();
            if (a != b || e1 != e2 || u1 != u2) ++nondeterministic;
        }
    }
    // Whole-suite reports, serial and parallel, with the timing column blanked.
    ob::BenchConfig cfg;
    cfg.family = ob::Family::RandomCorpus;
    cfg.sizes = {4};
    cfg.seeds = {0, 1, 2, 3};
    cfg.modes = ob::all_modes();
    cfg.max_criteria = 4;
    auto untimed = [](std::vector<ob::MetricRecord> rs) {
        for (auto& r : rs) r.wall_ms = 0;
        return ob::format_report(ob::sorted(std::move(rs)), ob::ReportFormat::Json);
    };
    const auto r1 = untimed(ob::run_suite(cfg));
    const auto r2 = untimed(ob::run_suite(cfg));
    cfg.parallel = true;
    const auto r3 = untimed(ob::run_suite(cfg));
    const bool reports_same = r1 == r2 && r1 == r3;
    report(9, unexpected == 0 && nondeterministic == 0 && reports_same,
           fmt("mode_runs=%zu unexpected_errors=%zu nondeterministic=%zu suite_reports_identical=%s", instances,
               unexpected, nondeterministic, reports_same ? "yes" : "no"));
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    uncoupled = two_phase_series(false);
    coupled = two_phase_series(true);
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
