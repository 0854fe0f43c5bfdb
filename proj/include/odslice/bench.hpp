#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "odslice/minilang.hpp"
#include "odslice/slicer.hpp"

namespace odslice::bench {

enum class Family { SortLoop, TwoPhase, DoubleCall, Recursive, RandomCorpus };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

inline const std::vector<std::string>& all_modes() {
    static const std::vector<std::string> modes{"ondemand-inter", "ondemand-intra", "execute-once", "upfront-all",
                                                "upfront-slice"};
    return modes;
}

struct GenOptions {
    /// two-phase only: let the irrelevant segment write the criterion's
    /// variable under a condition that never holds, so the static slice
    /// covers the whole program.
    bool coupled = false;
};

struct GeneratedProgram {
    Family family;
    std::uint32_t size = 0;
    std::uint64_t seed = 0;
    std::string source;
    Program program;
    std::vector<std::int64_t> input;
    std::vector<Criterion> criteria;
    std::size_t attempts = 1;  // random-corpus: candidates drawn before one passed validation
};

/// Deterministic in (family, size, seed, options).
GeneratedProgram gen_program(Family family, std::uint32_t size, std::uint64_t seed, const GenOptions& options = {});

/// Step budget every random-corpus program must finish within.
inline constexpr std::uint64_t kCorpusStepBudget = 10000;

struct BenchConfig {
    Family family = Family::SortLoop;
    std::vector<std::uint32_t> sizes;
    std::vector<std::uint64_t> seeds{0};
    std::vector<std::string> modes{"ondemand-inter"};
    std::uint32_t trials = 1;
    bool coupled = false;
    bool parallel = false;  // spread independent records over threads
    std::size_t max_criteria = 0;  // 0: every default criterion

    static BenchConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
};

struct MetricRecord {
    std::string family;
    std::uint32_t size = 0;
    std::uint64_t seed = 0;
    std::string mode;
    std::string criterion;
    std::size_t slice_size = 0;
    std::size_t executions = 0;
    std::size_t frontiers_checked = 0;
    std::uint64_t steps = 0;
    double wall_ms = 0;
    std::string status = "ok";
};

/// One metric record for (program, criterion, mode), averaged over trials.
MetricRecord measure(const GeneratedProgram& gp, const StaticDeps& deps, const Criterion& criterion,
                     const std::string& mode, std::uint32_t trials);

std::vector<MetricRecord> run_suite(const BenchConfig& config);

class DegenerateInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Spearman rank correlation with mean ranks for ties.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

enum class ReportFormat { Csv, Json };

inline constexpr const char* kCsvHeader =
    "family,size,seed,mode,criterion,slice_size,executions,frontiers_checked,steps,wall_ms,status";

/// Sorted by (family, size, seed, mode, criterion).
std::vector<MetricRecord> sorted(std::vector<MetricRecord> records);
std::string format_report(const std::vector<MetricRecord>& records, ReportFormat format);
void emit_report(const std::vector<MetricRecord>& records, ReportFormat format, const std::filesystem::path& path);

nlohmann::json to_json(const MetricRecord& r);

}  // namespace odslice::bench
