#include "odslice/slicer.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "machine.hpp"

namespace odslice {

namespace {

using Clock = std::chrono::steady_clock;

std::string criterion_label(const Program& program, NodeId node, std::optional<std::uint32_t> q) {
    return program.node_label(node) + (q ? "#" + std::to_string(*q) : std::string("#last"));
}

bool inside(const Context& ctx, const NodeSet& slice) {
    return std::all_of(ctx.begin(), ctx.end(), [&](NodeId c) { return slice.contains(c); });
}

// Any run stopped at I^q doubles as validation that the occurrence exists.
template <class F>
auto validating(const Program& program, ResolvedCriterion& rc, F&& f) {
    try {
        auto r = f();
        rc.validated = true;
        return r;
    } catch (const StopNotReached& e) {
        throw CriterionNeverExecuted(rc.occ.node, e.executed(),
                                     criterion_label(program, rc.occ.node, rc.occ.count));
    }
}

void finish(const Program& program, std::span<const std::int64_t> input, SliceResult& res, Clock::time_point t0) {
    if (!res.criterion.validated) {
        RunOptions options;
        options.stop = res.criterion.occ;
        const auto out = validating(program, res.criterion, [&] { return run(program, input, options); });
        res.criterion.prerun_steps += out.steps;
    }
    res.prerun_steps = res.criterion.prerun_steps;
    res.executions = res.iterations.size();
    res.total = Clock::now() - t0;
}

ResolvedCriterion resolve_with(const Program& program, std::span<const std::int64_t> input,
                               const Criterion& criterion, std::uint64_t count, const Context* last_context) {
    ResolvedCriterion rc;
    const NodeId node = criterion.node;
    if (!criterion.occurrence) {
        if (count == 0) throw CriterionNeverExecuted(node, 0, criterion_label(program, node, std::nullopt));
        rc.occ = {node, static_cast<std::uint32_t>(count)};
        rc.context = *last_context;
        rc.validated = true;
        return rc;
    }
    const std::uint32_t q = *criterion.occurrence;
    if (q == 0) throw std::invalid_argument("occurrence numbers start at 1");
    rc.occ = {node, q};
    if (last_context && q > count) throw CriterionNeverExecuted(node, count, criterion_label(program, node, q));
    if (program.node(node).proc == program.main_proc()) {
        rc.validated = last_context != nullptr;
        return rc;
    }
    RunOptions options;
    options.stop = rc.occ;
    const auto out = validating(program, rc, [&] { return run(program, input, options); });
    rc.context = out.stop_context;
    rc.prerun_steps = out.steps;
    return rc;
}

}  // namespace

Criterion parse_criterion(const Program& program, std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos || colon == 0)
        throw CriterionSyntaxError("criterion must look like proc:line[#n|#last]: '" + std::string(spec) + "'");
    const std::string_view proc = spec.substr(0, colon);
    std::string_view rest = spec.substr(colon + 1);
    std::string_view occ;
    if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
        occ = rest.substr(hash + 1);
        rest = rest.substr(0, hash);
    }
    auto number = [&](std::string_view text) -> std::uint32_t {
        std::uint32_t v = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (text.empty() || ec != std::errc{} || p != text.data() + text.size())
            throw CriterionSyntaxError("bad number '" + std::string(text) + "' in criterion '" + std::string(spec) + "'");
        return v;
    };
    const std::uint32_t line = number(rest);
    const auto node = program.find_node(proc, static_cast<int>(line));
    if (!node) throw NoSuchLine("no statement at " + std::string(proc) + ":" + std::to_string(line));
    if (occ.empty() && spec.find('#') == std::string_view::npos) return Criterion::last(*node);
    if (occ == "last") return Criterion::last(*node);
    const std::uint32_t q = number(occ);
    if (q == 0) throw CriterionSyntaxError("occurrence numbers start at 1");
    return Criterion::at(*node, q);
}

std::string to_string(const Program& program, const Criterion& criterion) {
    return criterion_label(program, criterion.node, criterion.occurrence);
}

ResolvedCriterion resolve_criterion(const Program& program, std::span<const std::int64_t> input,
                                    const Criterion& criterion) {
    if (criterion.node.value >= program.node_count()) throw std::out_of_range("criterion node out of range");
    if (criterion.occurrence) return resolve_with(program, input, criterion, 0, nullptr);
    const auto c = census(program, input, criterion.node);
    auto rc = resolve_with(program, input, criterion, c.count, &c.last_context);
    rc.prerun_steps = c.steps;
    return rc;
}

std::size_t SliceResult::frontiers_checked() const {
    std::size_t n = 0;
    for (const auto& it : iterations) n += it.frontiers2check.size();
    return n;
}

std::uint64_t SliceResult::steps() const {
    std::uint64_t s = 0;
    for (const auto& it : iterations) s = std::max(s, it.run_steps);
    return s;
}

PairSet frontiers(const NodeSet& slice, const StaticDeps& deps) {
    PairSet out;
    for (NodeId r : slice)
        for (NodeId w : deps.writers_of(r))
            if (!slice.contains(w)) out.emplace(w, r);
    return out;
}

PairSet frontiers_all(const NodeSet& slice, const StaticDeps& deps) {
    PairSet out;
    for (NodeId r : slice)
        for (NodeId w : deps.writers_of(r)) out.emplace(w, r);
    return out;
}

NodeSet missing_control(const NodeSet& slice, const StaticDeps& deps) {
    NodeSet out;
    for (NodeId n : slice)
        for (NodeId c : deps.control_of(n))
            if (!slice.contains(c)) out.insert(c);
    return out;
}

SliceResult slice_intra(const Program& program, const StaticDeps& deps, std::span<const std::int64_t> input,
                        const Criterion& criterion) {
    const auto t0 = Clock::now();
    if (program.has_calls()) throw PreconditionError("intra-procedural slicing requires a call-free program");

    SliceResult res;
    res.mode = "ondemand-intra";
    res.criterion = resolve_criterion(program, input, criterion);
    const Occurrence stop = res.criterion.occ;

    NodeSet& S = res.slice;
    S.insert(stop.node);
    for (NodeId c : deps.control_of(stop.node)) S.insert(c);
    PairSet checked;

    for (;;) {
        const auto ti = Clock::now();
        IterationLog log;
        log.iteration = res.iterations.size() + 1;
        for (const auto& p : frontiers(S, deps))
            if (!checked.contains(p)) log.frontiers2check.insert(p);

        if (!log.frontiers2check.empty()) {
            CorroborationStats stats;
            const PairSet exercised = validating(program, res.criterion, [&] {
                return corroborate_frontiers(program, deps, input, log.frontiers2check, stop, &stats);
            });
            log.ran = true;
            log.run_steps = stats.steps;
            ++res.runs;
            for (auto [w, r] : exercised) log.obs_defs.insert(w);
        }
        S.insert(log.obs_defs.begin(), log.obs_defs.end());
        log.delta_control = missing_control(S, deps);
        S.insert(log.delta_control.begin(), log.delta_control.end());
        checked.insert(log.frontiers2check.begin(), log.frontiers2check.end());

        const bool done = log.obs_defs.empty() && log.delta_control.empty();
        log.wall = Clock::now() - ti;
        res.iterations.push_back(std::move(log));
        if (done) break;
    }
    finish(program, input, res, t0);
    return res;
}

namespace {

SliceResult slice_inter_resolved(const Program& program, const StaticDeps& deps, std::span<const std::int64_t> input,
                                 ResolvedCriterion rc, Clock::time_point t0) {
    SliceResult res;
    res.mode = "ondemand-inter";
    res.criterion = std::move(rc);
    const Occurrence stop = res.criterion.occ;

    NodeSet& S = res.slice;
    S.insert(stop.node);
    S.insert(res.criterion.context.begin(), res.criterion.context.end());
    const NodeSet seed_control = missing_control(S, deps);
    S.insert(seed_control.begin(), seed_control.end());

    PairSet checked;
    // Exercised contextualized frontiers per pair, for every pair already
    // submitted to a run. Runs are deterministic, so these are exact.
    std::map<NodePair, std::vector<ContextualizedFrontier>> known;

    for (;;) {
        const auto ti = Clock::now();
        IterationLog log;
        log.iteration = res.iterations.size() + 1;
        for (const auto& p : frontiers_all(S, deps))
            if (!checked.contains(p)) log.frontiers2check.insert(p);

        PairSet to_run;
        for (const auto& p : log.frontiers2check)
            if (!known.contains(p)) to_run.insert(p);
        if (!to_run.empty()) {
            CorroborationStats stats;
            const auto exercised = validating(program, res.criterion, [&] {
                return corroborate_frontiers_ctx(program, deps, input, to_run, stop, &stats);
            });
            log.ran = true;
            log.run_steps = stats.steps;
            ++res.runs;
            for (const auto& p : to_run) known[p];
            for (const auto& cf : exercised) known[{cf.writer, cf.reader}].push_back(cf);
        }

        for (const auto& p : log.frontiers2check) {
            for (const auto& cf : known.at(p)) {
                if (!inside(cf.reader_ctx, S)) {
                    log.kept_frontiers.insert(p);
                    continue;
                }
                if (!S.contains(cf.writer)) log.obs_defs.insert(cf.writer);
                for (NodeId c : cf.writer_ctx)
                    if (!S.contains(c)) log.obs_ctxs.insert(c);
            }
        }
        S.insert(log.obs_defs.begin(), log.obs_defs.end());
        S.insert(log.obs_ctxs.begin(), log.obs_ctxs.end());
        log.delta_control = missing_control(S, deps);
        S.insert(log.delta_control.begin(), log.delta_control.end());
        for (const auto& p : log.frontiers2check)
            if (!log.kept_frontiers.contains(p)) checked.insert(p);

        const bool done = log.obs_defs.empty() && log.obs_ctxs.empty() && log.delta_control.empty();
        log.wall = Clock::now() - ti;
        res.iterations.push_back(std::move(log));
        if (done) break;
    }
    finish(program, input, res, t0);
    return res;
}

}  // namespace

SliceResult slice_inter(const Program& program, const StaticDeps& deps, std::span<const std::int64_t> input,
                        const Criterion& criterion) {
    const auto t0 = Clock::now();
    return slice_inter_resolved(program, deps, input, resolve_criterion(program, input, criterion), t0);
}

std::vector<BatchEntry> batch_slice(const Program& program, const StaticDeps& deps,
                                    std::span<const std::int64_t> input, std::span<const Criterion> criteria) {
    std::vector<BatchEntry> out;
    if (criteria.empty()) return out;
    const auto c0 = Clock::now();
    const ProgramCensus census = census_all(program, input);
    const auto census_time = Clock::now() - c0;

    for (const auto& criterion : criteria) {
        BatchEntry entry;
        const auto t0 = Clock::now();
        try {
            if (criterion.node.value >= program.node_count()) throw std::out_of_range("criterion node out of range");
            const auto n = criterion.node.value;
            auto rc = resolve_with(program, input, criterion, census.counts[n], &census.last_context[n]);
            rc.prerun_steps += census.steps;
            entry.result = slice_inter_resolved(program, deps, input, std::move(rc), t0);
            entry.result->total += census_time / static_cast<long>(criteria.size());
        } catch (const CriterionNeverExecuted& e) {
            entry.error_kind = "CriterionNeverExecuted";
            entry.error = e.what();
        } catch (const RuntimeError& e) {
            entry.error_kind = "RuntimeError";
            entry.error = e.what();
        } catch (const std::exception& e) {
            entry.error_kind = "Error";
            entry.error = e.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

NodeSet InlinedProgram::map_back(const NodeSet& inlined) const {
    NodeSet out;
    for (NodeId n : inlined) {
        const auto& o = origin.at(n.value);
        out.insert(o.original);
        out.insert(o.call_chain.begin(), o.call_chain.end());
    }
    return out;
}

namespace {

struct DepthHooks {
    std::uint32_t max_depth = 0;
    void begin(const detail::OccState& o) { max_depth = std::max(max_depth, o.depth); }
    void read(const detail::OccState&, const Address&) {}
    void write(const detail::OccState&, const Address&) {}
};

struct FoundCopy {
    Occurrence occ;
};

struct CopyCounterHooks {
    const std::vector<char>& primary;
    std::uint32_t target;
    std::uint32_t seen = 0;
    void begin(const detail::OccState& o) {
        if (primary[o.node.value] && ++seen == target) throw FoundCopy{o.occurrence()};
    }
    void read(const detail::OccState&, const Address&) {}
    void write(const detail::OccState&, const Address&) {}
};

// Generates the source of a call-free main by expanding every call up to the
// observed call depth. Locals of the k-th expansion become `__k_name`, its
// return value `__rk`; calls deeper than the observed depth are never reached
// before the criterion and become dead assignments.
class Inliner {
public:
    Inliner(const Program& program, std::uint32_t depth, NodeId criterion, const InlineOptions& options)
        : p_(program), depth_(depth), criterion_(criterion), options_(options) {}

    std::string generate() {
        for (const auto& g : p_.globals()) out_ << "global " << g << ";\n";
        for (const auto& a : p_.arrays()) out_ << "array " << a.name << "[" << a.length << "];\n";
        out_ << "proc main() {\n";
        Scope scope{"", {}, 0};
        block(p_.procedure(p_.main_proc()).body, scope, 1);
        out_ << "}\n";
        return out_.str();
    }

    std::vector<InlineOrigin> origin;
    std::vector<char> primary;

private:
    struct Scope {
        std::string prefix;
        std::vector<NodeId> chain;
        std::uint32_t depth;
    };

    void emit(int indent, const std::string& text) {
        out_ << std::string(static_cast<std::size_t>(indent) * 2, ' ') << text << '\n';
    }

    void node(int indent, const std::string& text, NodeId original, const Scope& scope, bool is_primary) {
        if (origin.size() >= options_.max_nodes)
            throw InlineBudgetExceeded("inlined program exceeds " + std::to_string(options_.max_nodes) + " nodes");
        emit(indent, text);
        origin.push_back({original, scope.chain});
        primary.push_back(is_primary && original == criterion_ ? 1 : 0);
    }

    std::string var(const Scope& scope, const std::string& name, bool global) const {
        return global ? name : scope.prefix + name;
    }

    std::string target(const Scope& scope, const Stmt& s) const { return var(scope, s.target, s.target_ref.global); }

    std::string expr(const Expr& e, const Scope& scope) const {
        return expr_to_string(e, [&](const Expr& v) { return var(scope, v.name, v.var.global); });
    }

    void block(const std::vector<Stmt>& body, const Scope& scope, int indent) {
        for (const auto& s : body) stmt(s, scope, indent);
    }

    void stmt(const Stmt& s, const Scope& scope, int indent) {
        switch (s.kind) {
        case StmtKind::Assign:
            node(indent, target(scope, s) + " = " + expr(*s.value, scope) + ";", s.node, scope, true);
            return;
        case StmtKind::ArrayStore:
            node(indent, s.array + "[" + expr(*s.index, scope) + "] = " + expr(*s.value, scope) + ";", s.node, scope,
                 true);
            return;
        case StmtKind::Input: node(indent, "input " + target(scope, s) + ";", s.node, scope, true); return;
        case StmtKind::Print: node(indent, "print " + expr(*s.value, scope) + ";", s.node, scope, true); return;
        case StmtKind::If:
            node(indent, "if (" + expr(*s.value, scope) + ") {", s.node, scope, true);
            block(s.then_body, scope, indent + 1);
            if (s.has_else) {
                emit(indent, "} else {");
                block(s.else_body, scope, indent + 1);
            }
            emit(indent, "}");
            return;
        case StmtKind::While:
            node(indent, "while (" + expr(*s.value, scope) + ") {", s.node, scope, true);
            block(s.then_body, scope, indent + 1);
            emit(indent, "}");
            return;
        case StmtKind::Return:
            node(indent, "__r" + std::to_string(current_expansion_) + " = " + expr(*s.value, scope) + ";", s.node,
                 scope, true);
            return;
        case StmtKind::Call: call(s, scope, indent); return;
        }
    }

    void call(const Stmt& s, const Scope& scope, int indent) {
        const Procedure& callee = p_.procedure(s.callee_id);
        if (s.node == criterion_ && !s.has_result)
            throw InlineUnsupported("criterion is a call without a result");
        if (scope.depth + 1 > depth_) {
            const std::string dead = s.has_result ? target(scope, s) : "__d" + std::to_string(++counter_);
            node(indent, dead + " = 0;", s.node, scope, false);
            return;
        }
        check_shape(callee, s.has_result);

        const std::size_t k = ++counter_;
        Scope inner{"__" + std::to_string(k) + "_", scope.chain, scope.depth + 1};
        inner.chain.push_back(s.node);
        for (std::size_t i = 0; i < callee.params.size(); ++i)
            node(indent, inner.prefix + callee.params[i] + " = " + expr(*s.args[i], scope) + ";", s.node, scope,
                 false);
        const std::size_t saved = current_expansion_;
        current_expansion_ = k;
        block(callee.body, inner, indent);
        current_expansion_ = saved;
        if (s.has_result)
            node(indent, target(scope, s) + " = __r" + std::to_string(k) + ";", s.node, scope, true);
    }

    static bool contains_return(const std::vector<Stmt>& body) {
        return std::any_of(body.begin(), body.end(), [](const Stmt& s) {
            return s.kind == StmtKind::Return || contains_return(s.then_body) || contains_return(s.else_body);
        });
    }

    static bool has_nested_return(const std::vector<Stmt>& body) {
        return std::any_of(body.begin(), body.end(),
                           [](const Stmt& s) { return contains_return(s.then_body) || contains_return(s.else_body); });
    }

    void check_shape(const Procedure& callee, bool needs_result) const {
        const auto& body = callee.body;
        const bool ends_with_return = !body.empty() && body.back().kind == StmtKind::Return;
        bool early = has_nested_return(body);
        for (std::size_t i = 0; i + 1 < body.size(); ++i) early = early || body[i].kind == StmtKind::Return;
        if (early) throw InlineUnsupported("procedure " + callee.name + " returns before its last statement");
        if (needs_result && !ends_with_return)
            throw InlineUnsupported("procedure " + callee.name + " has no final return");
    }

    const Program& p_;
    std::uint32_t depth_;
    NodeId criterion_;
    InlineOptions options_;
    std::ostringstream out_;
    std::size_t counter_ = 0;
    std::size_t current_expansion_ = 0;
};

bool uses_reserved_names(const Program& program) {
    auto reserved = [](const std::string& n) { return n.size() >= 2 && n[0] == '_' && n[1] == '_'; };
    for (const auto& g : program.globals())
        if (reserved(g)) return true;
    for (const auto& proc : program.procedures())
        for (const auto& l : proc.locals)
            if (reserved(l)) return true;
    return false;
}

}  // namespace

InlinedProgram inline_program(const Program& program, std::span<const std::int64_t> input, const Criterion& criterion,
                              const InlineOptions& options) {
    if (uses_reserved_names(program)) throw InlineUnsupported("identifiers starting with '__' are reserved");
    const ResolvedCriterion rc = resolve_criterion(program, input, criterion);

    DepthHooks depth_hooks;
    ContextTable contexts;
    RunOptions run_options;
    run_options.stop = rc.occ;
    detail::Machine<DepthHooks> depth_run(program, input, run_options, depth_hooks, contexts);
    depth_run.execute();
    if (depth_hooks.max_depth > options.max_depth)
        throw InlineBudgetExceeded("call depth " + std::to_string(depth_hooks.max_depth) + " exceeds inline budget " +
                                   std::to_string(options.max_depth));

    Inliner inliner(program, depth_hooks.max_depth, rc.occ.node, options);
    InlinedProgram result;
    result.source = inliner.generate();
    result.program = parse_program(result.source);
    result.origin = std::move(inliner.origin);
    if (result.program.node_count() != result.origin.size())
        throw std::logic_error("inlined node numbering does not match the generated source");

    // The q-th execution of any copy of the criterion node is I^q.
    CopyCounterHooks counter{inliner.primary, rc.occ.count};
    ContextTable copy_contexts;
    RunOptions plain;
    detail::Machine<CopyCounterHooks> copy_run(result.program, input, plain, counter, copy_contexts);
    try {
        copy_run.execute();
    } catch (const FoundCopy& found) {
        result.criterion = Criterion::at(found.occ.node, found.occ.count);
        return result;
    }
    throw std::logic_error("inlined program never reaches the criterion");
}

}  // namespace odslice
