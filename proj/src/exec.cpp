#include "odslice/exec.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "absl/container/flat_hash_set.h"
#include "machine.hpp"

namespace odslice {

using detail::Machine;
using detail::OccState;

AbstractLocation abstract_location(const Address& addr, std::uint32_t frame_proc) {
    switch (addr.kind) {
    case Address::Kind::GlobalScalar: return AbstractLocation::global(addr.slot);
    case Address::Kind::FrameScalar: return AbstractLocation::local(frame_proc, addr.slot);
    case Address::Kind::ArrayElem: return AbstractLocation::array(static_cast<std::uint32_t>(addr.base));
    case Address::Kind::Ret: return AbstractLocation::ret(frame_proc);
    }
    return {};
}

ContextTable::ContextTable() {
    sets_.emplace_back();
    ids_.emplace(Context{}, 0);
}

CtxId ContextTable::push(CtxId parent, NodeId site) {
    const std::uint64_t key = (static_cast<std::uint64_t>(parent) << 32) | site.value;
    if (auto it = children_.find(key); it != children_.end()) return it->second;
    Context set = sets_.at(parent);
    auto pos = std::lower_bound(set.begin(), set.end(), site);
    if (pos == set.end() || *pos != site) set.insert(pos, site);
    auto [it, inserted] = ids_.try_emplace(set, static_cast<CtxId>(sets_.size()));
    if (inserted) sets_.push_back(std::move(set));
    children_.emplace(key, it->second);
    return it->second;
}

RuntimeError::RuntimeError(Kind kind, Occurrence at, const std::string& detail)
    : std::runtime_error(to_string(kind) + " at node " + std::to_string(at.node.value) + "#" +
                         std::to_string(at.count) + ": " + detail),
      kind_(kind), at_(at) {}

std::string to_string(RuntimeError::Kind kind) {
    switch (kind) {
    case RuntimeError::Kind::DivByZero: return "div-by-zero";
    case RuntimeError::Kind::ArrayOutOfBounds: return "array-out-of-bounds";
    case RuntimeError::Kind::InputExhausted: return "input-exhausted";
    case RuntimeError::Kind::MissingReturn: return "missing-return";
    case RuntimeError::Kind::Overflow: return "overflow";
    case RuntimeError::Kind::StepLimit: return "step-limit";
    case RuntimeError::Kind::StackOverflow: return "stack-overflow";
    }
    return "?";
}

ExecOutcome run(const Program& program, std::span<const std::int64_t> input, const RunOptions& options) {
    detail::NoHooks hooks;
    ContextTable contexts;
    Machine<detail::NoHooks> m(program, input, options, hooks, contexts);
    return m.execute();
}

std::uint64_t count_occurrences(const Program& program, std::span<const std::int64_t> input, NodeId node) {
    return census(program, input, node).count;
}

namespace {

struct CensusHooks {
    NodeId target;
    CtxId last_ctx = 0;
    void begin(const OccState& o) {
        if (o.node == target) last_ctx = o.ctx;
    }
    void read(const OccState&, const Address&) {}
    void write(const OccState&, const Address&) {}
};

struct TraceHooks {
    Trace& trace;
    bool record_events;
    absl::flat_hash_map<std::uint64_t, std::size_t> last_writer;

    std::uint64_t clock = 0;

    void begin(const OccState& o) { trace.occurrences.push_back({o.occurrence(), o.ctx, o.frame, o.caller, clock}); }
    void end(const OccState& o) { trace.occurrences[o.index].end = clock; }
    void read(const OccState& o, const Address& a) {
        ++clock;
        if (record_events) trace.events.push_back({o.index, false, a});
        if (auto it = last_writer.find(a.key()); it != last_writer.end())
            trace.du_pairs.push_back({it->second, o.index, a, clock});
    }
    void write(const OccState& o, const Address& a) {
        ++clock;
        if (record_events) trace.events.push_back({o.index, true, a});
        last_writer[a.key()] = o.index;
    }
};

struct ShadowEntry {
    std::uint32_t writer;
    CtxId ctx;
};

inline std::uint64_t pack(std::uint32_t hi, std::uint32_t lo) { return (static_cast<std::uint64_t>(hi) << 32) | lo; }

// Shadow memory M': last definition of each address by an instrumented
// writer. Instrumented writers are all potential writers of the locations
// used by watched readers, so the entry seen by a watched reader is always
// the true last writer.
struct ShadowHooks {
    const std::vector<char>& watched_reader;
    const std::vector<char>& instrumented_writer;
    const absl::flat_hash_set<std::uint64_t>& f2c;
    absl::flat_hash_map<std::uint64_t, ShadowEntry> shadow;
    absl::flat_hash_set<std::pair<std::uint64_t, std::uint64_t>> found;
    std::uint64_t writes = 0;

    void begin(const OccState&) {}
    void read(const OccState& o, const Address& a) {
        if (!watched_reader[o.node.value]) return;
        auto it = shadow.find(a.key());
        if (it == shadow.end()) return;
        if (!f2c.contains(pack(it->second.writer, o.node.value))) return;
        found.emplace(pack(it->second.writer, it->second.ctx), pack(o.node.value, o.ctx));
    }
    void write(const OccState& o, const Address& a) {
        if (!instrumented_writer[o.node.value]) return;
        shadow.insert_or_assign(a.key(), ShadowEntry{o.node.value, o.ctx});
        ++writes;
    }
};

}  // namespace

OccurrenceCensus census(const Program& program, std::span<const std::int64_t> input, NodeId node) {
    CensusHooks hooks{node};
    ContextTable contexts;
    RunOptions options;
    Machine<CensusHooks> m(program, input, options, hooks, contexts);
    const ExecOutcome out = m.execute();
    OccurrenceCensus c;
    c.count = m.count_of(node);
    c.last_context = contexts.get(hooks.last_ctx);
    c.steps = out.steps;
    return c;
}

namespace {

struct CensusAllHooks {
    std::vector<CtxId> last;
    void begin(const OccState& o) { last[o.node.value] = o.ctx; }
    void read(const OccState&, const Address&) {}
    void write(const OccState&, const Address&) {}
};

}  // namespace

ProgramCensus census_all(const Program& program, std::span<const std::int64_t> input) {
    CensusAllHooks hooks{std::vector<CtxId>(program.node_count(), 0)};
    ContextTable contexts;
    RunOptions options;
    Machine<CensusAllHooks> m(program, input, options, hooks, contexts);
    const ExecOutcome out = m.execute();
    ProgramCensus c;
    c.steps = out.steps;
    for (std::size_t i = 0; i < program.node_count(); ++i) {
        const NodeId n{static_cast<std::uint32_t>(i)};
        c.counts.push_back(m.count_of(n));
        c.last_context.push_back(contexts.get(hooks.last[i]));
    }
    return c;
}

Trace record_trace(const Program& program, std::span<const std::int64_t> input, std::optional<Occurrence> stop,
                   bool record_events) {
    Trace trace;
    TraceHooks hooks{trace, record_events, {}, 0};
    RunOptions options;
    options.stop = stop;
    Machine<TraceHooks> m(program, input, options, hooks, trace.contexts);
    ExecOutcome out = m.execute();
    std::sort(trace.du_pairs.begin(), trace.du_pairs.end());
    trace.du_pairs.erase(std::unique(trace.du_pairs.begin(), trace.du_pairs.end(),
                                     [](const DuPair& a, const DuPair& b) {
                                         return a.writer == b.writer && a.reader == b.reader && a.addr == b.addr;
                                     }),
                         trace.du_pairs.end());
    trace.stop = stop;
    trace.printed = std::move(out.printed);
    return trace;
}

namespace {

std::set<ContextualizedFrontier> corroborate(const Program& program, const StaticDeps& deps,
                                             std::span<const std::int64_t> input, const PairSet& f2c, Occurrence stop,
                                             CorroborationStats* stats) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = program.node_count();
    std::vector<char> watched(n, 0), writers(n, 0);
    absl::flat_hash_set<std::uint64_t> keys;
    std::size_t n_watched = 0;
    for (auto [w, r] : f2c) {
        if (!deps.data.contains({w, r}))
            throw PreconditionViolation("frontier " + program.node_label(w) + " -> " + program.node_label(r) +
                                        " is not a static data dependency");
        keys.insert(pack(w.value, r.value));
        if (!watched[r.value]) {
            watched[r.value] = 1;
            ++n_watched;
        }
    }
    std::size_t n_writers = 0;
    for (std::size_t r = 0; r < n; ++r) {
        if (!watched[r]) continue;
        for (const auto& loc : program.nodes()[r].uses) {
            auto it = deps.writers_by_location.find(loc);
            if (it == deps.writers_by_location.end()) continue;
            for (NodeId w : it->second) {
                if (!writers[w.value]) {
                    writers[w.value] = 1;
                    ++n_writers;
                }
            }
        }
    }

    ShadowHooks hooks{watched, writers, keys, {}, {}, 0};
    ContextTable contexts;
    RunOptions options;
    options.stop = stop;
    Machine<ShadowHooks> m(program, input, options, hooks, contexts);
    const ExecOutcome out = m.execute();

    std::set<ContextualizedFrontier> result;
    for (const auto& [w, r] : hooks.found) {
        result.insert({NodeId{static_cast<std::uint32_t>(w >> 32)}, contexts.get(static_cast<CtxId>(w & 0xffffffffu)),
                       NodeId{static_cast<std::uint32_t>(r >> 32)}, contexts.get(static_cast<CtxId>(r & 0xffffffffu))});
    }
    if (stats) {
        stats->steps = out.steps;
        stats->watched_readers = n_watched;
        stats->instrumented_writers = n_writers;
        stats->shadow_writes = hooks.writes;
        stats->shadow_entries = hooks.shadow.size();
        stats->wall = std::chrono::steady_clock::now() - t0;
    }
    return result;
}

}  // namespace

PairSet corroborate_frontiers(const Program& program, const StaticDeps& deps, std::span<const std::int64_t> input,
                              const PairSet& f2c, Occurrence stop, CorroborationStats* stats) {
    PairSet out;
    for (const auto& cf : corroborate(program, deps, input, f2c, stop, stats)) out.emplace(cf.writer, cf.reader);
    return out;
}

std::set<ContextualizedFrontier> corroborate_frontiers_ctx(const Program& program, const StaticDeps& deps,
                                                           std::span<const std::int64_t> input, const PairSet& f2c,
                                                           Occurrence stop, CorroborationStats* stats) {
    return corroborate(program, deps, input, f2c, stop, stats);
}

std::string dump_trace(const Program& program, const Trace& trace) {
    std::ostringstream os;
    for (const auto& e : trace.occurrences) {
        os << program.node_label(e.occ.node) << '#' << e.occ.count << " [";
        const Context& ctx = trace.contexts.get(e.ctx);
        for (std::size_t i = 0; i < ctx.size(); ++i) os << (i ? "," : "") << program.node_label(ctx[i]);
        os << "]\n";
    }
    return os.str();
}

std::vector<std::int64_t> parse_input(std::string_view text) {
    std::vector<std::int64_t> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(text.data() + i, text.data() + j, v);
        if (ec != std::errc{} || p != text.data() + j)
            throw std::invalid_argument("invalid integer in input: '" + std::string(text.substr(i, j - i)) + "'");
        out.push_back(v);
        i = j;
    }
    return out;
}

}  // namespace odslice
