#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "odslice/minilang.hpp"
#include "odslice/sda.hpp"

namespace odslice {

using FrameId = std::uint64_t;
using CtxId = std::uint32_t;

/// Concrete runtime memory cell.
struct Address {
    enum class Kind : std::uint8_t { GlobalScalar, FrameScalar, ArrayElem, Ret };
    Kind kind = Kind::GlobalScalar;
    std::uint64_t base = 0;  // FrameScalar/Ret: frame id, ArrayElem: array id
    std::uint32_t slot = 0;  // GlobalScalar/FrameScalar: slot, ArrayElem: element index

    static Address global(std::uint32_t slot) { return {Kind::GlobalScalar, 0, slot}; }
    static Address frame(FrameId f, std::uint32_t slot) { return {Kind::FrameScalar, f, slot}; }
    static Address element(std::uint32_t array, std::uint32_t index) { return {Kind::ArrayElem, array, index}; }
    static Address ret(FrameId f) { return {Kind::Ret, f, 0}; }

    /// Injective packing used as a hash key.
    std::uint64_t key() const {
        return (static_cast<std::uint64_t>(kind) << 62) | (base << 22) | slot;
    }

    auto operator<=>(const Address&) const = default;
};

/// Abstract location of an address, given the procedure owning each frame.
AbstractLocation abstract_location(const Address& addr, std::uint32_t frame_proc);

/// The q-th execution (1-based) of a node.
struct Occurrence {
    NodeId node;
    std::uint32_t count = 1;
    auto operator<=>(const Occurrence&) const = default;
};

/// Call sites on the activation stack beneath an occurrence's frame, sorted.
using Context = std::vector<NodeId>;

/// Interns call-site sets so that equal sets share one id; id 0 is the empty
/// context. Pushing a call site is O(1) amortized.
class ContextTable {
public:
    ContextTable();
    CtxId push(CtxId parent, NodeId site);
    const Context& get(CtxId id) const { return sets_.at(id); }
    std::size_t size() const { return sets_.size(); }

private:
    std::vector<Context> sets_;
    absl::flat_hash_map<std::uint64_t, CtxId> children_;  // (parent << 32 | site) -> child
    std::map<Context, CtxId> ids_;
};

struct TraceEntry {
    Occurrence occ;
    CtxId ctx = 0;
    FrameId frame = 0;
    std::int64_t caller = -1;  // index of the call occurrence that created `frame`; -1 in main
    std::uint64_t end = 0;     // access-event clock when the occurrence completed
};

/// Indices refer into Trace::occurrences. `time` is the access-event clock
/// of the first read realizing the pair; a call occurrence reads the callee's
/// return value only after the callee's own occurrences.
struct DuPair {
    std::size_t writer = 0;
    std::size_t reader = 0;
    Address addr;
    std::uint64_t time = 0;
    auto operator<=>(const DuPair&) const = default;
};

struct AccessEvent {
    std::size_t occ = 0;
    bool write = false;
    Address addr;
};

struct Trace {
    std::vector<TraceEntry> occurrences;
    ContextTable contexts;
    std::vector<DuPair> du_pairs;     // sorted, one entry per (writer, reader, addr)
    std::vector<AccessEvent> events;  // only when requested
    std::optional<Occurrence> stop;
    std::vector<std::int64_t> printed;

    Context context_of(std::size_t index) const { return contexts.get(occurrences.at(index).ctx); }
};

struct ExecOutcome {
    std::vector<std::int64_t> printed;
    std::uint64_t steps = 0;
    bool halted_at_criterion = false;
    Context stop_context;  // context of the stop occurrence when halted there
};

class RuntimeError : public std::runtime_error {
public:
    enum class Kind { DivByZero, ArrayOutOfBounds, InputExhausted, MissingReturn, Overflow, StepLimit, StackOverflow };

    RuntimeError(Kind kind, Occurrence at, const std::string& detail);
    Kind kind() const noexcept { return kind_; }
    Occurrence at() const noexcept { return at_; }

private:
    Kind kind_;
    Occurrence at_;
};

std::string to_string(RuntimeError::Kind kind);

class StopNotReached : public std::runtime_error {
public:
    explicit StopNotReached(Occurrence stop, std::uint64_t executed)
        : std::runtime_error("stop occurrence #" + std::to_string(stop.count) + " of node " +
                             std::to_string(stop.node.value) + " not reached (executed " + std::to_string(executed) +
                             " times)"),
          stop_(stop), executed_(executed) {}
    Occurrence stop() const noexcept { return stop_; }
    std::uint64_t executed() const noexcept { return executed_; }

private:
    Occurrence stop_;
    std::uint64_t executed_;
};

struct RunOptions {
    std::optional<Occurrence> stop;
    std::uint64_t step_limit = 0;  // 0: unlimited
};

ExecOutcome run(const Program& program, std::span<const std::int64_t> input, const RunOptions& options = {});

std::uint64_t count_occurrences(const Program& program, std::span<const std::int64_t> input, NodeId node);

/// Total occurrences of `node` and the context of its last occurrence, from
/// one complete run.
struct OccurrenceCensus {
    std::uint64_t count = 0;
    Context last_context;
    std::uint64_t steps = 0;
};
OccurrenceCensus census(const Program& program, std::span<const std::int64_t> input, NodeId node);

/// Occurrence counts and last contexts of every node, from one complete run.
struct ProgramCensus {
    std::vector<std::uint64_t> counts;  // indexed by NodeId
    std::vector<Context> last_context;
    std::uint64_t steps = 0;
};
ProgramCensus census_all(const Program& program, std::span<const std::int64_t> input);

Trace record_trace(const Program& program, std::span<const std::int64_t> input, std::optional<Occurrence> stop,
                   bool record_events = false);

/// One exercised static pair with the definition and use contexts.
struct ContextualizedFrontier {
    NodeId writer;
    Context writer_ctx;
    NodeId reader;
    Context reader_ctx;
    auto operator<=>(const ContextualizedFrontier&) const = default;
};

struct CorroborationStats {
    std::uint64_t steps = 0;
    std::size_t watched_readers = 0;
    std::size_t instrumented_writers = 0;
    std::uint64_t shadow_writes = 0;
    std::size_t shadow_entries = 0;
    std::chrono::nanoseconds wall{0};
};

class PreconditionViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Shadow-memory run: which pairs of `f2c` are exercised at or before `stop`.
PairSet corroborate_frontiers(const Program& program, const StaticDeps& deps, std::span<const std::int64_t> input,
                              const PairSet& f2c, Occurrence stop, CorroborationStats* stats = nullptr);

std::set<ContextualizedFrontier> corroborate_frontiers_ctx(const Program& program, const StaticDeps& deps,
                                                           std::span<const std::int64_t> input, const PairSet& f2c,
                                                           Occurrence stop, CorroborationStats* stats = nullptr);

/// `proc:line#count [ctx]` per occurrence.
std::string dump_trace(const Program& program, const Trace& trace);

/// Whitespace-separated decimal integers.
std::vector<std::int64_t> parse_input(std::string_view text);

}  // namespace odslice
