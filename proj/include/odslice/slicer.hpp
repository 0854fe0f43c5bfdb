#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "odslice/exec.hpp"
#include "odslice/minilang.hpp"
#include "odslice/sda.hpp"

namespace odslice {

/// Slicing criterion I^q. An empty occurrence means "last occurrence".
struct Criterion {
    NodeId node;
    std::optional<std::uint32_t> occurrence;

    static Criterion last(NodeId n) { return {n, std::nullopt}; }
    static Criterion at(NodeId n, std::uint32_t q) { return {n, q}; }
};

class CriterionSyntaxError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NoSuchLine : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parses "proc:line", "proc:line#n" or "proc:line#last".
Criterion parse_criterion(const Program& program, std::string_view spec);

/// "proc:line#n" or "proc:line#last".
std::string to_string(const Program& program, const Criterion& criterion);

class CriterionNeverExecuted : public std::runtime_error {
public:
    CriterionNeverExecuted(NodeId node, std::uint64_t executed, const std::string& label)
        : std::runtime_error("criterion " + label + " never reached (node executed " + std::to_string(executed) +
                             " times)"),
          node_(node) {}
    NodeId node() const noexcept { return node_; }

private:
    NodeId node_;
};

/// Criterion after resolution against one input.
struct ResolvedCriterion {
    Occurrence occ;
    Context context;            // ctx(I^q)
    bool validated = false;     // occurrence known to be reached
    std::uint64_t prerun_steps = 0;
};

/// Resolves `#last` with a counting pre-run and obtains ctx(I^q) when the
/// criterion lives outside main. Explicit occurrences in main are left to be
/// validated by the first corroboration run.
ResolvedCriterion resolve_criterion(const Program& program, std::span<const std::int64_t> input,
                                    const Criterion& criterion);

struct IterationLog {
    std::size_t iteration = 0;
    PairSet frontiers2check;
    NodeSet obs_defs;
    NodeSet obs_ctxs;
    NodeSet delta_control;
    PairSet kept_frontiers;
    bool ran = false;  // false: no pairs to instrument, or answered from the corroboration cache
    std::uint64_t run_steps = 0;
    std::chrono::nanoseconds wall{0};
};

struct SliceResult {
    std::string mode;
    NodeSet slice;
    std::vector<IterationLog> iterations;
    std::size_t executions = 0;  // == iterations.size()
    std::size_t runs = 0;        // program executions actually performed, excluding the pre-run
    std::uint64_t prerun_steps = 0;
    std::chrono::nanoseconds total{0};
    ResolvedCriterion criterion;

    std::size_t frontiers_checked() const;
    std::uint64_t steps() const;  // steps of the longest run (execution size up to I^q)
};

/// {(w, r) | w ∈ SD_data(r), r ∈ S, w ∉ S}
PairSet frontiers(const NodeSet& slice, const StaticDeps& deps);

/// {(w, r) | w ∈ SD_data(r), r ∈ S}; the inter-procedural variant keeps
/// writers already in S because their other contexts may add call sites.
PairSet frontiers_all(const NodeSet& slice, const StaticDeps& deps);

/// {n' ∉ S | ∃ n ∈ S: n' ∈ SD_control(n)}
NodeSet missing_control(const NodeSet& slice, const StaticDeps& deps);

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Intra-procedural on-demand re-execution slicing; requires a call-free program.
SliceResult slice_intra(const Program& program, const StaticDeps& deps, std::span<const std::int64_t> input,
                        const Criterion& criterion);

/// Inter-procedural on-demand re-execution slicing with contextualized frontiers.
SliceResult slice_inter(const Program& program, const StaticDeps& deps, std::span<const std::int64_t> input,
                        const Criterion& criterion);

class InlineBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InlineUnsupported : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InlineOptions {
    std::size_t max_depth = 64;
    std::size_t max_nodes = 200000;
};

/// Where an inlined node came from: the original node and the call sites of
/// the expansions enclosing it (outermost first).
struct InlineOrigin {
    NodeId original;
    std::vector<NodeId> call_chain;
};

struct InlinedProgram {
    std::string source;
    Program program;
    std::vector<InlineOrigin> origin;  // indexed by inlined NodeId
    Criterion criterion;               // the criterion re-expressed on the inlined program

    /// Original nodes (plus enclosing call sites) of a set of inlined nodes.
    NodeSet map_back(const NodeSet& inlined) const;
};

/// Call-free program equivalent to `program` on `input` up to the criterion.
InlinedProgram inline_program(const Program& program, std::span<const std::int64_t> input, const Criterion& criterion,
                              const InlineOptions& options = {});

struct BatchEntry {
    std::optional<SliceResult> result;
    std::string error_kind;  // empty on success
    std::string error;
};

/// Slices each criterion independently; one counting pre-run is shared.
std::vector<BatchEntry> batch_slice(const Program& program, const StaticDeps& deps,
                                    std::span<const std::int64_t> input, std::span<const Criterion> criteria);

}  // namespace odslice
