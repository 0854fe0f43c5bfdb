#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace odslice {

/// Dense, program-wide statement identity. Branch conditions of `if` and
/// `while` are nodes of their own.
struct NodeId {
    std::uint32_t value = 0;
    auto operator<=>(const NodeId&) const = default;
};

struct NodeIdHash {
    std::size_t operator()(NodeId n) const noexcept { return std::hash<std::uint32_t>{}(n.value); }
};

/// Static ("may") abstraction of runtime addresses.
struct AbstractLocation {
    enum class Kind : std::uint8_t { GlobalScalar, LocalScalar, ArrayWhole, Ret };
    Kind kind = Kind::GlobalScalar;
    std::uint32_t proc = 0;  // LocalScalar, Ret
    std::uint32_t slot = 0;  // GlobalScalar: global slot, LocalScalar: local slot, ArrayWhole: array id

    static AbstractLocation global(std::uint32_t slot) { return {Kind::GlobalScalar, 0, slot}; }
    static AbstractLocation local(std::uint32_t proc, std::uint32_t slot) { return {Kind::LocalScalar, proc, slot}; }
    static AbstractLocation array(std::uint32_t id) { return {Kind::ArrayWhole, 0, id}; }
    static AbstractLocation ret(std::uint32_t proc) { return {Kind::Ret, proc, 0}; }

    auto operator<=>(const AbstractLocation&) const = default;
};

enum class BinOp : std::uint8_t { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnOp : std::uint8_t { Neg, Not };

/// A scalar variable after name resolution.
struct VarRef {
    bool global = false;
    std::uint32_t slot = 0;
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    enum class Kind : std::uint8_t { Literal, Var, ArrayRead, Unary, Binary };
    Kind kind = Kind::Literal;
    std::int64_t value = 0;  // Literal
    std::string name;        // Var, ArrayRead
    VarRef var;              // Var
    std::uint32_t array = 0; // ArrayRead
    UnOp unop = UnOp::Neg;
    BinOp binop = BinOp::Add;
    ExprPtr lhs;  // Unary operand, Binary lhs, ArrayRead index
    ExprPtr rhs;  // Binary rhs
};

enum class StmtKind : std::uint8_t { Assign, ArrayStore, Input, Print, If, While, Call, Return };

struct Stmt {
    StmtKind kind = StmtKind::Assign;
    NodeId node;
    int line = 0;       // relative to the procedure header
    int else_line = 0;  // If with an else branch: line of `} else {`

    std::string target;  // Assign, Input, Call (result)
    VarRef target_ref;
    bool has_result = false;  // Call

    std::string array;  // ArrayStore
    std::uint32_t array_id = 0;

    ExprPtr index;  // ArrayStore
    ExprPtr value;  // Assign, ArrayStore, Print, Return, If/While condition

    std::string callee;  // Call
    std::uint32_t callee_id = 0;
    std::vector<ExprPtr> args;

    std::vector<Stmt> then_body;  // If then-branch, While body
    std::vector<Stmt> else_body;
    bool has_else = false;
};

struct ArrayDecl {
    std::string name;
    std::int64_t length = 0;
};

struct Procedure {
    std::string name;
    std::vector<std::string> params;
    std::vector<std::string> locals;  // slot table; params occupy the first slots
    std::vector<Stmt> body;
    int header_line = 0;  // absolute line in the source text
    int close_line = 0;   // relative line of the closing brace
};

struct NodeInfo {
    NodeId id;
    std::uint32_t proc = 0;
    int line = 0;  // relative to the procedure header
    StmtKind kind = StmtKind::Assign;
    const Stmt* stmt = nullptr;
    std::vector<AbstractLocation> uses;  // sorted, unique
    std::vector<AbstractLocation> defs;  // sorted, unique
};

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parsed and validated program. Immutable once built; nodes refer into the
/// owned statement tree, so a Program is movable but not copyable.
class Program {
public:
    Program() = default;
    Program(Program&&) noexcept = default;
    Program& operator=(Program&&) noexcept = default;
    Program(const Program&) = delete;
    Program& operator=(const Program&) = delete;

    const std::vector<std::string>& globals() const { return globals_; }
    const std::vector<ArrayDecl>& arrays() const { return arrays_; }
    const std::vector<Procedure>& procedures() const { return procs_; }
    const Procedure& procedure(std::uint32_t i) const { return procs_.at(i); }
    std::uint32_t main_proc() const { return main_; }

    std::size_t node_count() const { return nodes_.size(); }
    const NodeInfo& node(NodeId n) const { return nodes_.at(n.value); }
    const std::vector<NodeInfo>& nodes() const { return nodes_; }

    std::optional<std::uint32_t> find_procedure(std::string_view name) const;
    std::optional<NodeId> find_node(std::string_view proc, int line) const;

    /// "proc:line"
    std::string node_label(NodeId n) const;
    std::string location_name(const AbstractLocation& loc) const;

    bool has_calls() const;

private:
    friend Program parse_program(std::string_view text);

    std::vector<std::string> globals_;
    std::vector<ArrayDecl> arrays_;
    std::vector<Procedure> procs_;
    std::uint32_t main_ = 0;
    std::vector<NodeInfo> nodes_;
};

/// Parses and validates source text. Node numbering follows textual order.
Program parse_program(std::string_view text);

/// One entry per node, ordered by NodeId.
const std::vector<NodeInfo>& node_table(const Program& program);

/// Canonical source text; parse_program(pretty_print(p)) yields the same nodes.
std::string pretty_print(const Program& program);

std::string to_string(StmtKind kind);
std::string expr_to_string(const Expr& e);

/// Same as expr_to_string, with scalar variable names supplied by `var_name`.
std::string expr_to_string(const Expr& e, const std::function<std::string(const Expr&)>& var_name);

/// Maximum array length accepted by the validator.
inline constexpr std::int64_t kMaxArrayLength = std::int64_t{1} << 22;

}  // namespace odslice
