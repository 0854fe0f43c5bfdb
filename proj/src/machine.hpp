#pragma once

// Tree-walking interpreter parameterized by an instrumentation policy. The
// policy sees every occurrence start/end and every memory read and write, in
// program order; the plain policy compiles to nothing.

#include <limits>
#include <span>
#include <vector>

#include "odslice/exec.hpp"

namespace odslice::detail {

struct OccState {
    NodeId node;
    std::uint32_t count = 0;
    CtxId ctx = 0;
    std::size_t index = 0;  // position in start order
    FrameId frame = 0;
    std::int64_t caller = -1;
    std::uint32_t depth = 0;  // 0 in main

    Occurrence occurrence() const { return {node, count}; }
};

struct NoHooks {
    void begin(const OccState&) {}
    void read(const OccState&, const Address&) {}
    void write(const OccState&, const Address&) {}
};

inline constexpr std::size_t kMaxCallDepth = 20000;

template <class Hooks>
class Machine {
public:
    Machine(const Program& program, std::span<const std::int64_t> input, const RunOptions& options, Hooks& hooks,
            ContextTable& contexts)
        : program_(program), input_(input), options_(options), hooks_(hooks), contexts_(contexts),
          counts_(program.node_count(), 0) {
        globals_.assign(program.globals().size(), 0);
        arrays_.reserve(program.arrays().size());
        for (const auto& a : program.arrays()) arrays_.emplace_back(static_cast<std::size_t>(a.length), 0);
    }

    ExecOutcome execute() {
        ExecOutcome out;
        const Procedure& main = program_.procedure(program_.main_proc());
        frames_.push_back({0, program_.main_proc(), 0, -1, 0, 0, false});
        values_.assign(main.locals.size(), 0);
        try {
            exec_block(main.body);
        } catch (const Halt&) {
            out.halted_at_criterion = true;
            out.stop_context = contexts_.get(stop_ctx_);
        }
        out.printed = std::move(printed_);
        out.steps = steps_;
        if (options_.stop && !out.halted_at_criterion)
            throw StopNotReached(*options_.stop, counts_[options_.stop->node.value]);
        return out;
    }

    std::uint32_t count_of(NodeId n) const { return counts_[n.value]; }

private:
    struct Halt {};

    struct Frame {
        FrameId id;
        std::uint32_t proc;
        CtxId ctx;
        std::int64_t caller;
        std::size_t base;
        std::int64_t ret;
        bool returned;
    };

    OccState begin(NodeId node) {
        if (options_.step_limit != 0 && steps_ >= options_.step_limit)
            throw RuntimeError(RuntimeError::Kind::StepLimit, {node, counts_[node.value] + 1},
                               "step limit " + std::to_string(options_.step_limit) + " exceeded");
        const Frame& f = frames_.back();
        OccState o{node, ++counts_[node.value], f.ctx, static_cast<std::size_t>(steps_++), f.id, f.caller,
                   static_cast<std::uint32_t>(frames_.size() - 1)};
        hooks_.begin(o);
        return o;
    }

    void end(const OccState& o) {
        if constexpr (requires { hooks_.end(o); }) hooks_.end(o);
        if (options_.stop && o.node == options_.stop->node && o.count == options_.stop->count) {
            stop_ctx_ = o.ctx;
            throw Halt{};
        }
    }

    [[noreturn]] void fail(const OccState& o, RuntimeError::Kind kind, const std::string& detail) const {
        throw RuntimeError(kind, o.occurrence(), detail);
    }

    void exec_block(const std::vector<Stmt>& block) {
        for (const Stmt& s : block) {
            exec(s);
            if (returning_) return;
        }
    }

    void exec(const Stmt& s) {
        switch (s.kind) {
        case StmtKind::Assign: {
            const OccState o = begin(s.node);
            const std::int64_t v = eval(*s.value, o);
            store(o, s.target_ref, v);
            end(o);
            return;
        }
        case StmtKind::ArrayStore: {
            const OccState o = begin(s.node);
            const std::int64_t idx = eval(*s.index, o);
            const std::int64_t v = eval(*s.value, o);
            auto& arr = arrays_[s.array_id];
            if (idx < 0 || static_cast<std::uint64_t>(idx) >= arr.size())
                fail(o, RuntimeError::Kind::ArrayOutOfBounds, s.array + "[" + std::to_string(idx) + "]");
            hooks_.write(o, Address::element(s.array_id, static_cast<std::uint32_t>(idx)));
            arr[static_cast<std::size_t>(idx)] = v;
            end(o);
            return;
        }
        case StmtKind::Input: {
            const OccState o = begin(s.node);
            if (input_pos_ >= input_.size()) fail(o, RuntimeError::Kind::InputExhausted, "input exhausted");
            store(o, s.target_ref, input_[input_pos_++]);
            end(o);
            return;
        }
        case StmtKind::Print: {
            const OccState o = begin(s.node);
            printed_.push_back(eval(*s.value, o));
            end(o);
            return;
        }
        case StmtKind::If: {
            const OccState o = begin(s.node);
            const bool taken = eval(*s.value, o) != 0;
            end(o);
            exec_block(taken ? s.then_body : s.else_body);
            return;
        }
        case StmtKind::While:
            for (;;) {
                const OccState o = begin(s.node);
                const bool taken = eval(*s.value, o) != 0;
                end(o);
                if (!taken) return;
                exec_block(s.then_body);
                if (returning_) return;
            }
        case StmtKind::Return: {
            const OccState o = begin(s.node);
            const std::int64_t v = eval(*s.value, o);
            Frame& f = frames_.back();
            hooks_.write(o, Address::ret(f.id));
            f.ret = v;
            f.returned = true;
            returning_ = true;
            end(o);
            return;
        }
        case StmtKind::Call:
            call(s);
            return;
        }
    }

    void call(const Stmt& s) {
        const OccState o = begin(s.node);
        const Procedure& callee = program_.procedure(s.callee_id);
        args_.clear();
        for (const auto& a : s.args) args_.push_back(eval(*a, o));
        if (frames_.size() >= kMaxCallDepth) fail(o, RuntimeError::Kind::StackOverflow, "call depth exceeded");

        const FrameId fid = ++next_frame_;
        const std::size_t base = values_.size();
        values_.resize(base + callee.locals.size(), 0);
        for (std::uint32_t i = 0; i < args_.size(); ++i) {
            hooks_.write(o, Address::frame(fid, i));
            values_[base + i] = args_[i];
        }
        frames_.push_back({fid, s.callee_id, contexts_.push(o.ctx, s.node), static_cast<std::int64_t>(o.index), base, 0,
                           false});
        exec_block(callee.body);
        const bool returned = frames_.back().returned;
        const std::int64_t rv = frames_.back().ret;
        returning_ = false;
        frames_.pop_back();
        values_.resize(base);

        if (s.has_result) {
            if (!returned) fail(o, RuntimeError::Kind::MissingReturn, callee.name + " finished without return");
            hooks_.read(o, Address::ret(fid));
            store(o, s.target_ref, rv);
        }
        end(o);
    }

    void store(const OccState& o, const VarRef& ref, std::int64_t v) {
        if (ref.global) {
            hooks_.write(o, Address::global(ref.slot));
            globals_[ref.slot] = v;
        } else {
            const Frame& f = frames_.back();
            hooks_.write(o, Address::frame(f.id, ref.slot));
            values_[f.base + ref.slot] = v;
        }
    }

    std::int64_t eval(const Expr& e, const OccState& o) {
        switch (e.kind) {
        case Expr::Kind::Literal:
            return e.value;
        case Expr::Kind::Var:
            if (e.var.global) {
                hooks_.read(o, Address::global(e.var.slot));
                return globals_[e.var.slot];
            } else {
                const Frame& f = frames_.back();
                hooks_.read(o, Address::frame(f.id, e.var.slot));
                return values_[f.base + e.var.slot];
            }
        case Expr::Kind::ArrayRead: {
            const std::int64_t idx = eval(*e.lhs, o);
            const auto& arr = arrays_[e.array];
            if (idx < 0 || static_cast<std::uint64_t>(idx) >= arr.size())
                fail(o, RuntimeError::Kind::ArrayOutOfBounds, e.name + "[" + std::to_string(idx) + "]");
            hooks_.read(o, Address::element(e.array, static_cast<std::uint32_t>(idx)));
            return arr[static_cast<std::size_t>(idx)];
        }
        case Expr::Kind::Unary: {
            const std::int64_t v = eval(*e.lhs, o);
            if (e.unop == UnOp::Not) return v == 0 ? 1 : 0;
            if (v == std::numeric_limits<std::int64_t>::min()) fail(o, RuntimeError::Kind::Overflow, "negation");
            return -v;
        }
        case Expr::Kind::Binary: {
            // Both operands are always evaluated (no short-circuit).
            const std::int64_t a = eval(*e.lhs, o);
            const std::int64_t b = eval(*e.rhs, o);
            return binary(e.binop, a, b, o);
        }
        }
        return 0;
    }

    std::int64_t binary(BinOp op, std::int64_t a, std::int64_t b, const OccState& o) const {
        std::int64_t r = 0;
        switch (op) {
        case BinOp::Add:
            if (__builtin_add_overflow(a, b, &r)) fail(o, RuntimeError::Kind::Overflow, "addition");
            return r;
        case BinOp::Sub:
            if (__builtin_sub_overflow(a, b, &r)) fail(o, RuntimeError::Kind::Overflow, "subtraction");
            return r;
        case BinOp::Mul:
            if (__builtin_mul_overflow(a, b, &r)) fail(o, RuntimeError::Kind::Overflow, "multiplication");
            return r;
        case BinOp::Div:
        case BinOp::Mod:
            if (b == 0) fail(o, RuntimeError::Kind::DivByZero, "division by zero");
            if (a == std::numeric_limits<std::int64_t>::min() && b == -1)
                fail(o, RuntimeError::Kind::Overflow, "division");
            return op == BinOp::Div ? a / b : a % b;
        case BinOp::Lt: return a < b;
        case BinOp::Le: return a <= b;
        case BinOp::Gt: return a > b;
        case BinOp::Ge: return a >= b;
        case BinOp::Eq: return a == b;
        case BinOp::Ne: return a != b;
        case BinOp::And: return (a != 0 && b != 0) ? 1 : 0;
        case BinOp::Or: return (a != 0 || b != 0) ? 1 : 0;
        }
        return 0;
    }

    const Program& program_;
    std::span<const std::int64_t> input_;
    const RunOptions& options_;
    Hooks& hooks_;
    ContextTable& contexts_;

    std::vector<std::uint32_t> counts_;
    std::vector<std::int64_t> globals_;
    std::vector<std::vector<std::int64_t>> arrays_;
    std::vector<Frame> frames_;
    std::vector<std::int64_t> values_;
    std::vector<std::int64_t> args_;
    std::vector<std::int64_t> printed_;
    std::size_t input_pos_ = 0;
    std::uint64_t steps_ = 0;
    FrameId next_frame_ = 0;
    CtxId stop_ctx_ = 0;
    bool returning_ = false;
};

}  // namespace odslice::detail
