#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace odslice::corpus {

struct Mismatch {
    std::uint64_t seed = 0;
    std::string criterion;
    std::vector<std::string> only_ondemand;
    std::vector<std::string> only_execute_once;

    auto operator<=>(const Mismatch&) const = default;
};

/// Aggregated oracle comparison over random-corpus programs. Merging two
/// sweeps is order-independent.
struct SweepStats {
    std::size_t programs = 0;
    std::size_t criteria = 0;
    std::size_t errors = 0;
    std::size_t mismatches = 0;             // on-demand slice != execute-once slice
    std::size_t subset_violations = 0;      // execute-once slice not inside the on-demand slice
    std::size_t upfront_disagreements = 0;  // on-demand slice != offline closure of upfront-all
    std::size_t identity_mismatches = 0;    // on-demand slice != execute-once slice with the identity relation
    std::size_t bound_violations = 0;       // executions > |slice| + 1
    std::size_t total_executions = 0;
    std::size_t total_runs = 0;
    std::size_t total_slice_size = 0;
    std::size_t max_executions = 0;
    std::uint64_t max_steps = 0;
    std::vector<Mismatch> samples;  // smallest (seed, criterion) first

    void merge(const SweepStats& other, std::size_t max_samples);
    double mean_executions() const { return criteria ? double(total_executions) / double(criteria) : 0.0; }
};

struct SweepOptions {
    std::uint32_t size = 4;
    std::size_t max_samples = 8;
    bool check_upfront = true;
};

/// Every executed line of one generated program, checked against the oracles.
SweepStats check_program(std::uint64_t seed, const SweepOptions& options);

/// Reference implementation: programs one after another.
SweepStats sweep_serial(std::span<const std::uint64_t> seeds, const SweepOptions& options);

/// Programs spread over OpenMP threads; identical result to sweep_serial.
SweepStats sweep_parallel(std::span<const std::uint64_t> seeds, const SweepOptions& options);

}  // namespace odslice::corpus
