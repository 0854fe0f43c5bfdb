#include "odslice/minilang.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace odslice {

namespace {

enum class Tok : std::uint8_t { Ident, Int, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t value = 0;
};

struct Line {
    int number = 0;  // absolute, 1-based
    std::vector<Token> toks;
};

const std::unordered_set<std::string> kKeywords = {"global", "array", "proc", "if",   "else",
                                                   "while",  "input", "print", "call", "return"};

std::vector<Token> lex_line(std::string_view s, int lineno) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), 0});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            Token t{Tok::Int, std::string(s.substr(i, j - i)), 0};
            auto [p, ec] = std::from_chars(s.data() + i, s.data() + j, t.value);
            if (ec != std::errc{}) throw SyntaxError(lineno, "integer literal out of range: " + t.text);
            out.push_back(std::move(t));
            i = j;
            continue;
        }
        static const char* two[] = {"<=", ">=", "==", "!=", "&&", "||"};
        bool matched = false;
        for (const char* op : two) {
            if (s.substr(i, 2) == op) {
                out.push_back({Tok::Punct, op, 0});
                i += 2;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (std::string_view("(){}[],;=+-*/%<>!").find(c) != std::string_view::npos) {
            out.push_back({Tok::Punct, std::string(1, c), 0});
            ++i;
            continue;
        }
        throw SyntaxError(lineno, std::string("unexpected character '") + c + "'");
    }
    return out;
}

class LineParser {
public:
    explicit LineParser(const Line& line) : line_(line) {}

    int lineno() const { return line_.number; }
    bool done() const { return pos_ >= line_.toks.size(); }
    const Token& peek(std::size_t ahead = 0) const {
        static const Token end{};
        return pos_ + ahead < line_.toks.size() ? line_.toks[pos_ + ahead] : end;
    }
    bool is_punct(std::string_view p, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Punct && t.text == p;
    }
    bool is_word(std::string_view w, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Ident && t.text == w;
    }
    void expect_punct(std::string_view p) {
        if (!is_punct(p)) fail("expected '" + std::string(p) + "'");
        ++pos_;
    }
    void expect_word(std::string_view w) {
        if (!is_word(w)) fail("expected '" + std::string(w) + "'");
        ++pos_;
    }
    std::string ident() {
        const Token& t = peek();
        if (t.kind != Tok::Ident) fail("expected identifier");
        if (kKeywords.contains(t.text)) fail("reserved word '" + t.text + "' used as identifier");
        ++pos_;
        return t.text;
    }
    std::int64_t integer() {
        const Token& t = peek();
        if (t.kind != Tok::Int) fail("expected integer");
        ++pos_;
        return t.value;
    }
    void expect_end() {
        if (!done()) fail("unexpected '" + peek().text + "' (one statement per line)");
    }
    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(line_.number, msg); }

    ExprPtr expr() { return parse_or(); }

private:
    ExprPtr binary(BinOp op, ExprPtr l, ExprPtr r) {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Binary;
        e->binop = op;
        e->lhs = std::move(l);
        e->rhs = std::move(r);
        return e;
    }
    ExprPtr parse_or() {
        auto l = parse_and();
        while (is_punct("||")) {
            ++pos_;
            l = binary(BinOp::Or, std::move(l), parse_and());
        }
        return l;
    }
    ExprPtr parse_and() {
        auto l = parse_eq();
        while (is_punct("&&")) {
            ++pos_;
            l = binary(BinOp::And, std::move(l), parse_eq());
        }
        return l;
    }
    ExprPtr parse_eq() {
        auto l = parse_rel();
        for (;;) {
            if (is_punct("==")) {
                ++pos_;
                l = binary(BinOp::Eq, std::move(l), parse_rel());
            } else if (is_punct("!=")) {
                ++pos_;
                l = binary(BinOp::Ne, std::move(l), parse_rel());
            } else {
                return l;
            }
        }
    }
    ExprPtr parse_rel() {
        auto l = parse_add();
        for (;;) {
            BinOp op;
            if (is_punct("<")) op = BinOp::Lt;
            else if (is_punct("<=")) op = BinOp::Le;
            else if (is_punct(">")) op = BinOp::Gt;
            else if (is_punct(">=")) op = BinOp::Ge;
            else return l;
            ++pos_;
            l = binary(op, std::move(l), parse_add());
        }
    }
    ExprPtr parse_add() {
        auto l = parse_mul();
        for (;;) {
            if (is_punct("+")) {
                ++pos_;
                l = binary(BinOp::Add, std::move(l), parse_mul());
            } else if (is_punct("-")) {
                ++pos_;
                l = binary(BinOp::Sub, std::move(l), parse_mul());
            } else {
                return l;
            }
        }
    }
    ExprPtr parse_mul() {
        auto l = parse_unary();
        for (;;) {
            BinOp op;
            if (is_punct("*")) op = BinOp::Mul;
            else if (is_punct("/")) op = BinOp::Div;
            else if (is_punct("%")) op = BinOp::Mod;
            else return l;
            ++pos_;
            l = binary(op, std::move(l), parse_unary());
        }
    }
    ExprPtr parse_unary() {
        if (is_punct("-") || is_punct("!")) {
            const UnOp op = is_punct("-") ? UnOp::Neg : UnOp::Not;
            ++pos_;
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Unary;
            e->unop = op;
            e->lhs = parse_unary();
            return e;
        }
        return parse_primary();
    }
    ExprPtr parse_primary() {
        const Token& t = peek();
        if (t.kind == Tok::Int) {
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Literal;
            e->value = integer();
            return e;
        }
        if (is_punct("(")) {
            ++pos_;
            auto e = expr();
            expect_punct(")");
            return e;
        }
        if (t.kind == Tok::Ident) {
            if (is_word("call")) fail("calls are statements, not expressions");
            auto e = std::make_unique<Expr>();
            e->name = ident();
            if (is_punct("[")) {
                ++pos_;
                e->kind = Expr::Kind::ArrayRead;
                e->lhs = expr();
                expect_punct("]");
            } else {
                e->kind = Expr::Kind::Var;
            }
            return e;
        }
        fail(t.kind == Tok::End ? "unexpected end of line" : "unexpected '" + t.text + "'");
    }

    const Line& line_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Structural parse

struct RawProgram {
    std::vector<std::pair<std::string, int>> globals;  // name, line
    std::vector<std::pair<ArrayDecl, int>> arrays;
    std::vector<Procedure> procs;
};

class StructureParser {
public:
    explicit StructureParser(std::vector<Line> lines) : lines_(std::move(lines)) {}

    RawProgram parse() {
        RawProgram raw;
        while (cur_ < lines_.size()) {
            const Line& line = lines_[cur_];
            LineParser p(line);
            if (p.is_word("global")) {
                p.expect_word("global");
                raw.globals.emplace_back(p.ident(), line.number);
                p.expect_punct(";");
                p.expect_end();
                ++cur_;
            } else if (p.is_word("array")) {
                raw.arrays.emplace_back(parse_array(p), line.number);
                ++cur_;
            } else if (p.is_word("proc")) {
                raw.procs.push_back(parse_proc());
            } else {
                p.fail("expected 'global', 'array' or 'proc' at top level");
            }
        }
        return raw;
    }

private:
    static ArrayDecl parse_array(LineParser& p) {
        p.expect_word("array");
        ArrayDecl d;
        d.name = p.ident();
        p.expect_punct("[");
        d.length = p.integer();
        p.expect_punct("]");
        p.expect_punct(";");
        p.expect_end();
        if (d.length <= 0) p.fail("array length must be positive");
        if (d.length > kMaxArrayLength) p.fail("array length exceeds " + std::to_string(kMaxArrayLength));
        return d;
    }

    Procedure parse_proc() {
        LineParser p(lines_[cur_]);
        Procedure proc;
        proc.header_line = p.lineno();
        p.expect_word("proc");
        proc.name = p.ident();
        p.expect_punct("(");
        if (!p.is_punct(")")) {
            proc.params.push_back(p.ident());
            while (p.is_punct(",")) {
                p.expect_punct(",");
                proc.params.push_back(p.ident());
            }
        }
        p.expect_punct(")");
        p.expect_punct("{");
        p.expect_end();
        ++cur_;
        header_ = proc.header_line;
        auto [body, term] = parse_block();
        if (term != Terminator::Close) throw SyntaxError(last_line_, "'else' without 'if'");
        proc.body = std::move(body);
        proc.close_line = last_line_ - header_;
        return proc;
    }

    enum class Terminator { Close, Else };

    std::pair<std::vector<Stmt>, Terminator> parse_block() {
        std::vector<Stmt> out;
        for (;;) {
            if (cur_ >= lines_.size()) {
                const int n = lines_.empty() ? 1 : lines_.back().number;
                throw SyntaxError(n, "unexpected end of input: missing '}'");
            }
            const Line& line = lines_[cur_];
            LineParser p(line);
            if (p.is_punct("}")) {
                p.expect_punct("}");
                last_line_ = line.number;
                ++cur_;
                if (p.done()) return {std::move(out), Terminator::Close};
                p.expect_word("else");
                p.expect_punct("{");
                p.expect_end();
                return {std::move(out), Terminator::Else};
            }
            out.push_back(parse_stmt());
        }
    }

    Stmt parse_stmt() {
        const Line& line = lines_[cur_];
        LineParser p(line);
        Stmt s;
        s.line = line.number - header_;
        if (p.is_word("global") || p.is_word("proc")) p.fail("declaration inside a procedure");
        if (p.is_word("array")) throw ValidationError("line " + std::to_string(line.number) + ": local array '" +
                                                      (p.peek(1).text) + "' (arrays must be declared at top level)");
        if (p.is_word("if") || p.is_word("while")) {
            const bool is_if = p.is_word("if");
            p.expect_word(is_if ? "if" : "while");
            p.expect_punct("(");
            s.value = p.expr();
            p.expect_punct(")");
            p.expect_punct("{");
            p.expect_end();
            ++cur_;
            s.kind = is_if ? StmtKind::If : StmtKind::While;
            auto [body, term] = parse_block();
            s.then_body = std::move(body);
            if (term == Terminator::Else) {
                if (!is_if) throw SyntaxError(last_line_, "'else' after 'while'");
                s.has_else = true;
                s.else_line = last_line_ - header_;
                auto [eb, t2] = parse_block();
                if (t2 != Terminator::Close) throw SyntaxError(last_line_, "duplicate 'else'");
                s.else_body = std::move(eb);
            }
            return s;
        }
        if (p.is_word("input")) {
            p.expect_word("input");
            s.kind = StmtKind::Input;
            s.target = p.ident();
        } else if (p.is_word("print")) {
            p.expect_word("print");
            s.kind = StmtKind::Print;
            s.value = p.expr();
        } else if (p.is_word("return")) {
            p.expect_word("return");
            s.kind = StmtKind::Return;
            s.value = p.expr();
        } else if (p.is_word("call")) {
            s.kind = StmtKind::Call;
            parse_call(p, s);
        } else {
            const std::string name = p.ident();
            if (p.is_punct("[")) {
                p.expect_punct("[");
                s.kind = StmtKind::ArrayStore;
                s.array = name;
                s.index = p.expr();
                p.expect_punct("]");
                p.expect_punct("=");
                s.value = p.expr();
            } else {
                p.expect_punct("=");
                s.target = name;
                if (p.is_word("call")) {
                    s.kind = StmtKind::Call;
                    s.has_result = true;
                    parse_call(p, s);
                } else {
                    s.kind = StmtKind::Assign;
                    s.value = p.expr();
                }
            }
        }
        p.expect_punct(";");
        p.expect_end();
        ++cur_;
        return s;
    }

    static void parse_call(LineParser& p, Stmt& s) {
        p.expect_word("call");
        s.callee = p.ident();
        p.expect_punct("(");
        if (!p.is_punct(")")) {
            s.args.push_back(p.expr());
            while (p.is_punct(",")) {
                p.expect_punct(",");
                s.args.push_back(p.expr());
            }
        }
        p.expect_punct(")");
    }

    std::vector<Line> lines_;
    std::size_t cur_ = 0;
    int header_ = 0;
    int last_line_ = 0;
};

// ---------------------------------------------------------------------------
// Name resolution and validation

class Resolver {
public:
    Resolver(std::vector<std::string>& globals, std::vector<ArrayDecl>& arrays, std::vector<Procedure>& procs)
        : globals_(globals), arrays_(arrays), procs_(procs) {
        for (std::uint32_t i = 0; i < globals_.size(); ++i) global_ids_[globals_[i]] = i;
        for (std::uint32_t i = 0; i < arrays_.size(); ++i) array_ids_[arrays_[i].name] = i;
        for (std::uint32_t i = 0; i < procs_.size(); ++i) proc_ids_[procs_[i].name] = i;
    }

    void run() {
        for (std::uint32_t i = 0; i < procs_.size(); ++i) resolve_proc(i);
    }

private:
    using Assigned = std::set<std::string>;

    [[noreturn]] void fail(const Stmt& s, const std::string& msg) const {
        throw ValidationError(proc_->name + ":" + std::to_string(s.line) + ": " + msg);
    }

    void resolve_proc(std::uint32_t id) {
        proc_id_ = id;
        proc_ = &procs_[id];
        local_ids_.clear();
        proc_->locals.clear();
        Assigned assigned;
        for (const auto& p : proc_->params) {
            if (local_ids_.contains(p))
                throw ValidationError(proc_->name + ": duplicate parameter '" + p + "'");
            if (global_ids_.contains(p) || array_ids_.contains(p))
                throw ValidationError(proc_->name + ": parameter '" + p + "' shadows a global");
            local_ids_[p] = static_cast<std::uint32_t>(proc_->locals.size());
            proc_->locals.push_back(p);
            assigned.insert(p);
        }
        block(proc_->body, assigned);
    }

    // Returns true when every path through the block ends in `return`.
    bool block(std::vector<Stmt>& stmts, Assigned& assigned) {
        for (std::size_t i = 0; i < stmts.size(); ++i) {
            if (stmt(stmts[i], assigned)) {
                if (i + 1 < stmts.size()) fail(stmts[i + 1], "unreachable statement after return");
                return true;
            }
        }
        return false;
    }

    bool stmt(Stmt& s, Assigned& assigned) {
        switch (s.kind) {
        case StmtKind::Assign:
            expr(s, *s.value, assigned);
            define(s, s.target, s.target_ref, assigned);
            return false;
        case StmtKind::ArrayStore: {
            auto it = array_ids_.find(s.array);
            if (it == array_ids_.end()) fail(s, "unknown array '" + s.array + "'");
            s.array_id = it->second;
            expr(s, *s.index, assigned);
            expr(s, *s.value, assigned);
            return false;
        }
        case StmtKind::Input:
            define(s, s.target, s.target_ref, assigned);
            return false;
        case StmtKind::Print:
            expr(s, *s.value, assigned);
            return false;
        case StmtKind::Return:
            if (proc_id_ == main_id()) fail(s, "return in main");
            expr(s, *s.value, assigned);
            return true;
        case StmtKind::Call: {
            auto it = proc_ids_.find(s.callee);
            if (it == proc_ids_.end()) fail(s, "call to undefined procedure '" + s.callee + "'");
            s.callee_id = it->second;
            if (procs_[s.callee_id].name == "main") fail(s, "call to main");
            if (procs_[s.callee_id].params.size() != s.args.size())
                fail(s, "arity mismatch calling '" + s.callee + "': expected " +
                            std::to_string(procs_[s.callee_id].params.size()) + ", got " +
                            std::to_string(s.args.size()));
            for (auto& a : s.args) expr(s, *a, assigned);
            if (s.has_result) define(s, s.target, s.target_ref, assigned);
            return false;
        }
        case StmtKind::If: {
            expr(s, *s.value, assigned);
            Assigned then_set = assigned;
            Assigned else_set = assigned;
            const bool then_ret = block(s.then_body, then_set);
            const bool else_ret = block(s.else_body, else_set);
            if (then_ret && else_ret) return true;
            if (then_ret) assigned = std::move(else_set);
            else if (else_ret) assigned = std::move(then_set);
            else {
                Assigned both;
                std::set_intersection(then_set.begin(), then_set.end(), else_set.begin(), else_set.end(),
                                      std::inserter(both, both.begin()));
                assigned = std::move(both);
            }
            return false;
        }
        case StmtKind::While: {
            expr(s, *s.value, assigned);
            Assigned body_set = assigned;
            block(s.then_body, body_set);
            return false;
        }
        }
        return false;
    }

    void define(const Stmt& s, const std::string& name, VarRef& ref, Assigned& assigned) {
        if (array_ids_.contains(name)) fail(s, "array '" + name + "' used as a scalar");
        if (auto g = global_ids_.find(name); g != global_ids_.end()) {
            ref = {true, g->second};
            return;
        }
        auto [it, inserted] = local_ids_.try_emplace(name, static_cast<std::uint32_t>(proc_->locals.size()));
        if (inserted) proc_->locals.push_back(name);
        ref = {false, it->second};
        assigned.insert(name);
    }

    void expr(const Stmt& s, Expr& e, const Assigned& assigned) {
        switch (e.kind) {
        case Expr::Kind::Literal:
            return;
        case Expr::Kind::Var: {
            if (array_ids_.contains(e.name)) fail(s, "array '" + e.name + "' used as a scalar");
            if (auto g = global_ids_.find(e.name); g != global_ids_.end()) {
                e.var = {true, g->second};
                return;
            }
            if (!assigned.contains(e.name)) {
                if (local_ids_.contains(e.name)) fail(s, "variable '" + e.name + "' may be read before assignment");
                fail(s, "unknown variable '" + e.name + "'");
            }
            e.var = {false, local_ids_.at(e.name)};
            return;
        }
        case Expr::Kind::ArrayRead: {
            auto it = array_ids_.find(e.name);
            if (it == array_ids_.end()) fail(s, "unknown array '" + e.name + "'");
            e.array = it->second;
            expr(s, *e.lhs, assigned);
            return;
        }
        case Expr::Kind::Unary:
            expr(s, *e.lhs, assigned);
            return;
        case Expr::Kind::Binary:
            expr(s, *e.lhs, assigned);
            expr(s, *e.rhs, assigned);
            return;
        }
    }

    std::uint32_t main_id() const { return proc_ids_.at("main"); }

    std::vector<std::string>& globals_;
    std::vector<ArrayDecl>& arrays_;
    std::vector<Procedure>& procs_;
    std::unordered_map<std::string, std::uint32_t> global_ids_, array_ids_, proc_ids_, local_ids_;
    Procedure* proc_ = nullptr;
    std::uint32_t proc_id_ = 0;
};

// ---------------------------------------------------------------------------
// Node numbering and def/use modeling

void expr_locations(const Expr& e, std::uint32_t proc, std::vector<AbstractLocation>& out) {
    switch (e.kind) {
    case Expr::Kind::Literal:
        return;
    case Expr::Kind::Var:
        out.push_back(e.var.global ? AbstractLocation::global(e.var.slot) : AbstractLocation::local(proc, e.var.slot));
        return;
    case Expr::Kind::ArrayRead:
        out.push_back(AbstractLocation::array(e.array));
        expr_locations(*e.lhs, proc, out);
        return;
    case Expr::Kind::Unary:
        expr_locations(*e.lhs, proc, out);
        return;
    case Expr::Kind::Binary:
        expr_locations(*e.lhs, proc, out);
        expr_locations(*e.rhs, proc, out);
        return;
    }
}

AbstractLocation var_location(const VarRef& v, std::uint32_t proc) {
    return v.global ? AbstractLocation::global(v.slot) : AbstractLocation::local(proc, v.slot);
}

void normalize(std::vector<AbstractLocation>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

void number_nodes(std::vector<Stmt>& stmts, std::uint32_t proc, std::vector<NodeInfo>& nodes) {
    for (auto& s : stmts) {
        NodeInfo info;
        info.id = NodeId{static_cast<std::uint32_t>(nodes.size())};
        s.node = info.id;
        info.proc = proc;
        info.line = s.line;
        info.kind = s.kind;
        info.stmt = &s;
        switch (s.kind) {
        case StmtKind::Assign:
            expr_locations(*s.value, proc, info.uses);
            info.defs.push_back(var_location(s.target_ref, proc));
            break;
        case StmtKind::ArrayStore:
            expr_locations(*s.index, proc, info.uses);
            expr_locations(*s.value, proc, info.uses);
            info.defs.push_back(AbstractLocation::array(s.array_id));
            break;
        case StmtKind::Input:
            info.defs.push_back(var_location(s.target_ref, proc));
            break;
        case StmtKind::Print:
        case StmtKind::If:
        case StmtKind::While:
            expr_locations(*s.value, proc, info.uses);
            break;
        case StmtKind::Call:
            for (const auto& a : s.args) expr_locations(*a, proc, info.uses);
            for (std::uint32_t i = 0; i < s.args.size(); ++i) info.defs.push_back(AbstractLocation::local(s.callee_id, i));
            if (s.has_result) {
                info.uses.push_back(AbstractLocation::ret(s.callee_id));
                info.defs.push_back(var_location(s.target_ref, proc));
            }
            break;
        case StmtKind::Return:
            expr_locations(*s.value, proc, info.uses);
            info.defs.push_back(AbstractLocation::ret(proc));
            break;
        }
        normalize(info.uses);
        normalize(info.defs);
        nodes.push_back(std::move(info));
        number_nodes(s.then_body, proc, nodes);
        number_nodes(s.else_body, proc, nodes);
    }
}

const char* binop_text(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    }
    return "?";
}

}  // namespace

Program parse_program(std::string_view text) {
    std::vector<Line> lines;
    int lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++lineno;
        auto toks = lex_line(text.substr(start, end - start), lineno);
        if (!toks.empty()) lines.push_back({lineno, std::move(toks)});
        if (end == text.size()) break;
        start = end + 1;
    }

    RawProgram raw = StructureParser(std::move(lines)).parse();

    Program prog;
    std::set<std::string> top_names;
    auto claim = [&](const std::string& name, const std::string& what) {
        if (!top_names.insert(name).second) throw ValidationError("duplicate top-level name '" + name + "' (" + what + ")");
    };
    for (auto& [g, line] : raw.globals) {
        claim(g, "global");
        prog.globals_.push_back(g);
    }
    for (auto& [a, line] : raw.arrays) {
        claim(a.name, "array");
        prog.arrays_.push_back(a);
    }
    std::set<std::string> proc_names;
    for (auto& p : raw.procs) {
        if (!proc_names.insert(p.name).second) throw ValidationError("duplicate procedure '" + p.name + "'");
    }
    prog.procs_ = std::move(raw.procs);

    auto main_it = std::find_if(prog.procs_.begin(), prog.procs_.end(), [](const Procedure& p) { return p.name == "main"; });
    if (main_it == prog.procs_.end()) throw ValidationError("no main procedure");
    if (!main_it->params.empty()) throw ValidationError("main must take no parameters");
    prog.main_ = static_cast<std::uint32_t>(main_it - prog.procs_.begin());

    Resolver(prog.globals_, prog.arrays_, prog.procs_).run();

    for (std::uint32_t i = 0; i < prog.procs_.size(); ++i) number_nodes(prog.procs_[i].body, i, prog.nodes_);
    return prog;
}

const std::vector<NodeInfo>& node_table(const Program& program) { return program.nodes(); }

std::optional<std::uint32_t> Program::find_procedure(std::string_view name) const {
    for (std::uint32_t i = 0; i < procs_.size(); ++i)
        if (procs_[i].name == name) return i;
    return std::nullopt;
}

std::optional<NodeId> Program::find_node(std::string_view proc, int line) const {
    auto p = find_procedure(proc);
    if (!p) return std::nullopt;
    for (const auto& n : nodes_)
        if (n.proc == *p && n.line == line) return n.id;
    return std::nullopt;
}

std::string Program::node_label(NodeId n) const {
    const NodeInfo& info = node(n);
    return procs_[info.proc].name + ":" + std::to_string(info.line);
}

std::string Program::location_name(const AbstractLocation& loc) const {
    switch (loc.kind) {
    case AbstractLocation::Kind::GlobalScalar: return "::" + globals_.at(loc.slot);
    case AbstractLocation::Kind::LocalScalar: return procs_.at(loc.proc).name + "::" + procs_.at(loc.proc).locals.at(loc.slot);
    case AbstractLocation::Kind::ArrayWhole: return arrays_.at(loc.slot).name + "[]";
    case AbstractLocation::Kind::Ret: return "ret(" + procs_.at(loc.proc).name + ")";
    }
    return "?";
}

bool Program::has_calls() const {
    return std::any_of(nodes_.begin(), nodes_.end(), [](const NodeInfo& n) { return n.kind == StmtKind::Call; });
}

std::string to_string(StmtKind kind) {
    switch (kind) {
    case StmtKind::Assign: return "assign";
    case StmtKind::ArrayStore: return "array-store";
    case StmtKind::Input: return "input";
    case StmtKind::Print: return "print";
    case StmtKind::If: return "if";
    case StmtKind::While: return "while";
    case StmtKind::Call: return "call";
    case StmtKind::Return: return "return";
    }
    return "?";
}

std::string expr_to_string(const Expr& e, const std::function<std::string(const Expr&)>& var_name) {
    switch (e.kind) {
    case Expr::Kind::Literal: return std::to_string(e.value);
    case Expr::Kind::Var: return var_name(e);
    case Expr::Kind::ArrayRead: return e.name + "[" + expr_to_string(*e.lhs, var_name) + "]";
    case Expr::Kind::Unary:
        return std::string(e.unop == UnOp::Neg ? "-" : "!") + "(" + expr_to_string(*e.lhs, var_name) + ")";
    case Expr::Kind::Binary:
        return "(" + expr_to_string(*e.lhs, var_name) + " " + binop_text(e.binop) + " " +
               expr_to_string(*e.rhs, var_name) + ")";
    }
    return "";
}

std::string expr_to_string(const Expr& e) {
    return expr_to_string(e, [](const Expr& v) { return v.name; });
}

namespace {

class Printer {
public:
    std::string print(const Program& p) {
        for (const auto& g : p.globals()) emit_next("global " + g + ";");
        for (const auto& a : p.arrays()) emit_next("array " + a.name + "[" + std::to_string(a.length) + "];");
        for (const auto& proc : p.procedures()) {
            std::string params;
            for (std::size_t i = 0; i < proc.params.size(); ++i) params += (i ? ", " : "") + proc.params[i];
            base_ = std::max(proc.header_line, line_ + 1);
            emit_at(base_, "proc " + proc.name + "(" + params + ") {", 0);
            block(proc.body, 1);
            emit_at(base_ + proc.close_line, "}", 0);
        }
        return out_.str();
    }

private:
    void emit_next(const std::string& text) { emit_at(line_ + 1, text, 0); }

    // Pads with blank lines so that relative statement lines survive.
    void emit_at(int line, const std::string& text, int depth) {
        while (line_ + 1 < line) {
            out_ << '\n';
            ++line_;
        }
        out_ << std::string(static_cast<std::size_t>(depth) * 2, ' ') << text << '\n';
        ++line_;
    }

    void block(const std::vector<Stmt>& stmts, int depth) {
        for (const auto& s : stmts) stmt(s, depth);
    }

    static std::string args(const Stmt& s) {
        std::string out;
        for (std::size_t i = 0; i < s.args.size(); ++i) out += (i ? ", " : "") + expr_to_string(*s.args[i]);
        return out;
    }

    int end_line(const std::vector<Stmt>& body, int open_line) const {
        return body.empty() ? open_line + 1 : last_line(body.back()) + 1;
    }

    static int last_line(const Stmt& s) {
        if (s.kind == StmtKind::If || s.kind == StmtKind::While) {
            const auto& tail = s.has_else ? s.else_body : s.then_body;
            const int open = s.has_else ? s.else_line : s.line;
            return tail.empty() ? open + 1 : last_line(tail.back()) + 1;
        }
        return s.line;
    }

    void stmt(const Stmt& s, int depth) {
        const int at = base_ + s.line;
        switch (s.kind) {
        case StmtKind::Assign: emit_at(at, s.target + " = " + expr_to_string(*s.value) + ";", depth); break;
        case StmtKind::ArrayStore:
            emit_at(at, s.array + "[" + expr_to_string(*s.index) + "] = " + expr_to_string(*s.value) + ";", depth);
            break;
        case StmtKind::Input: emit_at(at, "input " + s.target + ";", depth); break;
        case StmtKind::Print: emit_at(at, "print " + expr_to_string(*s.value) + ";", depth); break;
        case StmtKind::Return: emit_at(at, "return " + expr_to_string(*s.value) + ";", depth); break;
        case StmtKind::Call:
            emit_at(at, (s.has_result ? s.target + " = " : std::string()) + "call " + s.callee + "(" + args(s) + ");", depth);
            break;
        case StmtKind::If:
        case StmtKind::While: {
            emit_at(at, std::string(s.kind == StmtKind::If ? "if" : "while") + " (" + expr_to_string(*s.value) + ") {", depth);
            block(s.then_body, depth + 1);
            if (s.has_else) {
                emit_at(base_ + s.else_line, "} else {", depth);
                block(s.else_body, depth + 1);
                emit_at(base_ + end_line(s.else_body, s.else_line), "}", depth);
            } else {
                emit_at(base_ + end_line(s.then_body, s.line), "}", depth);
            }
            break;
        }
        }
    }

    std::ostringstream out_;
    int line_ = 0;
    int base_ = 0;
};

}  // namespace

std::string pretty_print(const Program& program) { return Printer().print(program); }

}  // namespace odslice
