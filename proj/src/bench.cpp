#include "odslice/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

#include "odslice/baselines.hpp"
#include "odslice/exec.hpp"
#include "odslice/sda.hpp"

namespace odslice::bench {

std::string to_string(Family f) {
    switch (f) {
    case Family::SortLoop: return "sort-loop";
    case Family::TwoPhase: return "two-phase";
    case Family::DoubleCall: return "double-call";
    case Family::Recursive: return "recursive";
    case Family::RandomCorpus: return "random-corpus";
    }
    return "?";
}

Family family_from_string(const std::string& s) {
    for (Family f : {Family::SortLoop, Family::TwoPhase, Family::DoubleCall, Family::Recursive, Family::RandomCorpus})
        if (to_string(f) == s) return f;
    throw std::invalid_argument("unknown program family '" + s + "'");
}

namespace {

class Source {
public:
    Source& line(const std::string& text) {
        out_ << std::string(static_cast<std::size_t>(indent_) * 2, ' ') << text << '\n';
        return *this;
    }
    Source& open(const std::string& text) {
        line(text);
        ++indent_;
        return *this;
    }
    Source& close(const std::string& text = "}") {
        --indent_;
        return line(text);
    }
    Source& reopen(const std::string& text) {
        close(text);
        ++indent_;
        return *this;
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
    int indent_ = 0;
};

std::vector<Criterion> executed_lines(const Program& program, std::span<const std::int64_t> input) {
    const ProgramCensus c = census_all(program, input);
    std::vector<Criterion> out;
    for (std::size_t i = 0; i < c.counts.size(); ++i)
        if (c.counts[i] > 0) out.push_back(Criterion::last(NodeId{static_cast<std::uint32_t>(i)}));
    return out;
}

NodeId node_at(const Program& program, const std::string& proc, int line) {
    auto n = program.find_node(proc, line);
    if (!n) throw std::logic_error("generator produced no node at " + proc + ":" + std::to_string(line));
    return *n;
}

// Insertion sort over N inputs followed by a post-processing chain whose
// statements depend on increasingly long prefixes of the chain.
void gen_sort_loop(GeneratedProgram& gp, std::mt19937_64& rng) {
    const std::uint32_t n = gp.size;
    const std::string N = std::to_string(n);
    std::uniform_int_distribution<std::int64_t> value(0, 999), small(1, 9);
    Source s;
    s.line("array a[" + N + "];");
    s.open("proc main() {");
    s.line("i = 0;");
    s.open("while (i < " + N + ") {").line("input v;").line("a[i] = v;").line("i = i + 1;").close();
    s.line("i = 1;");
    s.open("while (i < " + N + ") {");
    s.line("key = a[i];").line("j = i - 1;").line("go = 1;");
    s.open("while (go) {");
    s.open("if (j < 0) {").line("go = 0;").reopen("} else {");
    s.open("if (a[j] > key) {").line("a[j + 1] = a[j];").line("j = j - 1;").reopen("} else {");
    s.line("go = 0;").close().close().close();
    s.line("a[j + 1] = key;").line("i = i + 1;").close();
    s.line("lo = a[0];");
    s.line("hi = a[" + std::to_string(n - 1) + "];");
    s.line("t0 = " + std::to_string(small(rng)) + ";");
    for (int k = 1; k <= 12; ++k) {
        const std::string prev = "t" + std::to_string(k - 1);
        std::string rhs;
        if (k == 6) rhs = prev + " + lo";
        else if (k == 9) rhs = prev + " - hi";
        else if (k == 11) rhs = prev + " + a[" + std::to_string((k * 7) % n) + "]";
        else rhs = prev + " + " + std::to_string(small(rng));
        s.line("t" + std::to_string(k) + " = " + rhs + ";");
    }
    s.line("print t12;");
    s.line("print hi - lo;");
    s.close();
    gp.source = s.str();
    gp.program = parse_program(gp.source);
    for (std::uint32_t i = 0; i < n; ++i) gp.input.push_back(value(rng));
    gp.criteria = executed_lines(gp.program, gp.input);
}

// A short relevant computation around a loop whose step count scales with
// the size but which never reaches the criterion's variables dynamically.
void gen_two_phase(GeneratedProgram& gp, std::mt19937_64& rng, bool coupled) {
    const std::uint32_t per_iteration = coupled ? 7 : 6;
    const std::uint32_t iterations = std::max<std::uint32_t>(1, gp.size / per_iteration);
    std::uniform_int_distribution<std::int64_t> value(1, 99);
    Source s;
    s.open("proc main() {");
    s.line("input a;");
    s.line("b = a * 2;");
    s.line("i = 0;").line("acc = 0;").line("t = 1;");
    s.open("while (i < " + std::to_string(iterations) + ") {");
    s.line("acc = (acc + i * 3) % 1009;");
    s.line("t = (t * 7 + acc) % 101;");
    s.line("u = t - acc + i;");
    if (coupled) s.open("if (u > 100000) {").line("b = u;").close();
    s.line("acc = acc + u % 13;");
    s.line("i = i + 1;");
    s.close();
    s.line("print b;");
    s.line("print acc;");
    s.close();
    gp.source = s.str();
    gp.program = parse_program(gp.source);
    gp.input = {value(rng)};
    const int criterion_line = coupled ? 16 : 13;
    gp.criteria = {Criterion::at(node_at(gp.program, "main", criterion_line), 1)};
}

// Two calls of one procedure, the criterion depending on the first only.
// Size 1 is the classic two-call inlining example.
void gen_double_call(GeneratedProgram& gp, std::mt19937_64& rng) {
    Source s;
    s.open("proc inc(v) {");
    s.line("r1 = v + 1;");
    for (std::uint32_t k = 2; k <= gp.size; ++k)
        s.line("r" + std::to_string(k) + " = r" + std::to_string(k - 1) + " + 1;");
    s.line("return r" + std::to_string(gp.size) + ";");
    s.close();
    const std::int64_t first = gp.seed == 0 ? 1 : std::uniform_int_distribution<std::int64_t>(0, 50)(rng);
    const std::int64_t second = gp.seed == 0 ? 7 : std::uniform_int_distribution<std::int64_t>(0, 50)(rng);
    s.open("proc main() {");
    s.line("x = " + std::to_string(first) + ";");
    s.line("y = call inc(x);");
    s.line("z = call inc(" + std::to_string(second) + ");");
    s.line("print y;");
    s.close();
    gp.source = s.str();
    gp.program = parse_program(gp.source);
    gp.criteria = {Criterion::at(node_at(gp.program, "main", 4), 1)};
}

void gen_recursive(GeneratedProgram& gp, std::mt19937_64& rng) {
    Source s;
    s.line("global acc;");
    s.open("proc rec(d, k) {");
    s.line("acc = acc + d * k;");
    s.line("t = 0;");
    s.open("if (d > 0) {").line("t = call rec(d - 1, k);").close();
    s.line("return t + d;");
    s.close();
    s.open("proc main() {");
    s.line("input n;");
    s.line("input k;");
    s.line("s = call rec(n, k);");
    s.line("print s;");
    s.line("print acc;");
    s.close();
    gp.source = s.str();
    gp.program = parse_program(gp.source);
    gp.input = {static_cast<std::int64_t>(gp.size), std::uniform_int_distribution<std::int64_t>(1, 9)(rng)};
    gp.criteria = executed_lines(gp.program, gp.input);
}

// Random structured programs: at most six procedures, statement nesting at
// most three, loops bounded by literal trip counts, recursion bounded by a
// depth parameter that every recursive call decrements.
class RandomGen {
public:
    RandomGen(std::uint64_t seed, std::uint32_t size) : rng_(seed), size_(std::max<std::uint32_t>(size, 1)) {}

    std::string generate() {
        nprocs_ = pick(1, 5);
        recursive_.assign(nprocs_, false);
        params_.assign(nprocs_, 0);
        for (int i = 0; i < nprocs_; ++i) {
            recursive_[i] = chance(0.35);
            params_[i] = pick(0, 2) + (recursive_[i] ? 1 : 0);
        }
        s_.line("global g0;").line("global g1;").line("global g2;").line("array arr[8];");
        for (int i = 0; i < nprocs_; ++i) procedure(i);
        main_proc();
        return s_.str();
    }

private:
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    template <class T>
    const T& choose(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(pick(0, static_cast<int>(v.size()) - 1))];
    }

    static std::string proc_name(int i) { return "p" + std::to_string(i); }

    void procedure(int i) {
        current_ = i;
        avail_.clear();
        std::vector<std::string> ps;
        if (recursive_[i]) ps.push_back("d");
        for (int k = static_cast<int>(ps.size()); k < params_[i]; ++k) ps.push_back("a" + std::to_string(k));
        std::string header;
        for (std::size_t k = 0; k < ps.size(); ++k) header += (k ? ", " : "") + ps[k];
        for (const auto& p : ps)
            if (p != "d") avail_.push_back(p);
        readonly_ = recursive_[i] ? std::vector<std::string>{"d"} : std::vector<std::string>{};
        loops_ = 0;
        s_.open("proc " + proc_name(i) + "(" + header + ") {");
        block(0, pick(2, 3 + static_cast<int>(size_ % 4)));
        s_.line("return " + expr(1) + ";");
        s_.close();
    }

    void main_proc() {
        current_ = nprocs_;
        avail_.clear();
        readonly_.clear();
        loops_ = 0;
        s_.open("proc main() {");
        s_.line("input v0;");
        avail_.push_back("v0");
        block(0, pick(3, 5 + static_cast<int>(size_ % 5)));
        if (nprocs_ > 0) call_stmt(true);
        s_.line("print " + expr(1) + ";");
        s_.close();
    }

    void block(int depth, int count) {
        for (int k = 0; k < count; ++k) statement(depth);
    }

    void statement(int depth) {
        const bool can_nest = depth < 3;
        const bool can_call = current_ == nprocs_ ? nprocs_ > 0 : current_ + 1 < nprocs_ || recursive_[current_];
        for (;;) {
            const int r = pick(0, 99);
            if (r < 30) return assign();
            if (r < 38) return array_store();
            if (r < 47) return print();
            if (r < 51) return input();
            if (r < 64) {
                if (!can_nest) continue;
                return if_stmt(depth);
            }
            if (r < 75) {
                if (!can_nest || loops_ >= 2) continue;
                return while_stmt(depth);
            }
            if (!can_call) continue;
            return call_stmt(false);
        }
    }

    std::string fresh_or_existing() {
        if (!avail_.empty() && chance(0.5)) return choose(avail_);
        return "v" + std::to_string(pick(0, 5));
    }

    void define(const std::string& v) {
        if (std::find(avail_.begin(), avail_.end(), v) == avail_.end()) avail_.push_back(v);
    }

    std::string target() {
        if (chance(0.2)) return "g" + std::to_string(pick(0, 2));
        return fresh_or_existing();
    }

    void assign() {
        const std::string t = target();
        s_.line(t + " = " + expr(2) + ";");
        if (t[0] != 'g') define(t);
    }

    void array_store() { s_.line("arr[" + index() + "] = " + expr(2) + ";"); }

    void print() { s_.line("print " + expr(2) + ";"); }

    void input() {
        const std::string t = fresh_or_existing();
        s_.line("input " + t + ";");
        define(t);
    }

    void if_stmt(int depth) {
        s_.open("if (" + expr(2) + ") {");
        scoped([&] { block(depth + 1, pick(1, 3)); });
        if (chance(0.5)) {
            s_.reopen("} else {");
            scoped([&] { block(depth + 1, pick(1, 3)); });
        }
        s_.close();
    }

    void while_stmt(int depth) {
        const std::string w = "w" + std::to_string(loops_);
        const int bound = pick(1, 4);
        s_.line(w + " = 0;");
        s_.open("while (" + w + " < " + std::to_string(bound) + ") {");
        ++loops_;
        readonly_.push_back(w);
        scoped([&] { block(depth + 1, pick(1, 3)); });
        s_.line(w + " = " + w + " + 1;");
        readonly_.pop_back();
        --loops_;
        s_.close();
    }

    std::string args_for(int callee, bool self) {
        std::string out;
        for (int k = 0; k < params_[callee]; ++k) {
            std::string a;
            if (k == 0 && recursive_[callee]) a = self ? "d - 1" : std::to_string(pick(0, 3));
            else a = expr(1);
            out += (k ? ", " : "") + a;
        }
        return out;
    }

    void call_stmt(bool force_main_call) {
        const bool in_main = current_ == nprocs_;
        std::vector<int> callees;
        for (int j = in_main ? 0 : current_ + 1; j < nprocs_; ++j) callees.push_back(j);
        const bool self = !in_main && !force_main_call && recursive_[current_] && (callees.empty() || chance(0.4));
        const int callee = self ? current_ : choose(callees);
        const std::string call = "call " + proc_name(callee) + "(" + args_for(callee, self) + ");";
        const bool bind = chance(0.75);
        const std::string t = bind ? fresh_or_existing() : "";
        const std::string text = bind ? t + " = " + call : call;
        if (self) {
            s_.open("if (d > 0) {");
            s_.line(text);
            s_.close();
        } else {
            s_.line(text);
            if (bind) define(t);
        }
    }

    std::string index() {
        if (chance(0.5)) return std::to_string(pick(0, 7));
        return "((" + leaf() + " % 8) + 8) % 8";
    }

    std::string leaf() {
        std::vector<std::string> vars = avail_;
        for (const auto& r : readonly_) vars.push_back(r);
        const int r = pick(0, 99);
        if (r < 30 || (vars.empty() && r < 80)) return std::to_string(pick(0, 9));
        if (r < 80) return choose(vars);
        if (r < 92) return "g" + std::to_string(pick(0, 2));
        return "arr[" + std::to_string(pick(0, 7)) + "]";
    }

    std::string expr(int depth) {
        if (depth == 0 || chance(0.4)) return leaf();
        const int r = pick(0, 99);
        if (r < 8) return std::string(chance(0.5) ? "-" : "!") + "(" + expr(depth - 1) + ")";
        if (r < 16) return "(" + expr(depth - 1) + " * " + std::to_string(pick(0, 4)) + ")";
        if (r < 24) return "(" + expr(depth - 1) + (chance(0.5) ? " / " : " % ") + std::to_string(pick(1, 7)) + ")";
        static const std::vector<std::string> ops{"+", "-", "+", "<", "<=", ">", ">=", "==", "!=", "&&", "||"};
        return "(" + expr(depth - 1) + " " + choose(ops) + " " + expr(depth - 1) + ")";
    }

    template <class F>
    void scoped(F&& body) {
        const auto saved = avail_;
        body();
        avail_ = saved;
    }

    std::mt19937_64 rng_;
    std::uint32_t size_;
    Source s_;
    int nprocs_ = 0;
    int current_ = 0;
    int loops_ = 0;
    std::vector<bool> recursive_;
    std::vector<int> params_;
    std::vector<std::string> avail_;
    std::vector<std::string> readonly_;
};

void gen_random(GeneratedProgram& gp) {
    for (std::size_t attempt = 0;; ++attempt) {
        std::seed_seq seq{static_cast<std::uint32_t>(gp.seed), static_cast<std::uint32_t>(gp.seed >> 32),
                          static_cast<std::uint32_t>(gp.size), static_cast<std::uint32_t>(attempt)};
        std::mt19937_64 rng(seq);
        RandomGen gen(rng(), gp.size);
        std::string source = gen.generate();
        Program program = parse_program(source);
        std::vector<std::int64_t> input;
        std::uniform_int_distribution<std::int64_t> value(-9, 20);
        for (int k = 0; k < 64; ++k) input.push_back(value(rng));
        RunOptions options;
        options.step_limit = kCorpusStepBudget;
        try {
            run(program, input, options);
        } catch (const RuntimeError&) {
            continue;
        }
        gp.source = std::move(source);
        gp.program = std::move(program);
        gp.input = std::move(input);
        gp.attempts = attempt + 1;
        gp.criteria = executed_lines(gp.program, gp.input);
        return;
    }
}

}  // namespace

GeneratedProgram gen_program(Family family, std::uint32_t size, std::uint64_t seed, const GenOptions& options) {
    if (size == 0) throw std::invalid_argument("program size must be positive");
    GeneratedProgram gp;
    gp.family = family;
    gp.size = size;
    gp.seed = seed;
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + size);
    switch (family) {
    case Family::SortLoop: gen_sort_loop(gp, rng); break;
    case Family::TwoPhase: gen_two_phase(gp, rng, options.coupled); break;
    case Family::DoubleCall: gen_double_call(gp, rng); break;
    case Family::Recursive: gen_recursive(gp, rng); break;
    case Family::RandomCorpus: gen_random(gp); break;
    }
    return gp;
}

BenchConfig BenchConfig::from_json(const nlohmann::json& j) {
    BenchConfig c;
    c.family = family_from_string(j.at("family").get<std::string>());
    c.sizes = j.at("sizes").get<std::vector<std::uint32_t>>();
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("modes")) c.modes = j.at("modes").get<std::vector<std::string>>();
    c.trials = j.value("trials", 1u);
    c.coupled = j.value("coupled", false);
    c.parallel = j.value("parallel", false);
    c.max_criteria = j.value("max_criteria", std::size_t{0});
    c.validate();
    return c;
}

nlohmann::json BenchConfig::to_json() const {
    return {{"family", to_string(family)}, {"sizes", sizes},       {"seeds", seeds},
            {"modes", modes},              {"trials", trials},     {"coupled", coupled},
            {"parallel", parallel},        {"max_criteria", max_criteria}};
}

void BenchConfig::validate() const {
    if (sizes.empty()) throw std::invalid_argument("bench config needs at least one size");
    if (std::find(sizes.begin(), sizes.end(), 0u) != sizes.end())
        throw std::invalid_argument("bench sizes must be positive");
    if (trials < 1) throw std::invalid_argument("bench trials must be at least 1");
    if (modes.empty()) throw std::invalid_argument("bench config needs at least one mode");
    for (const auto& m : modes)
        if (std::find(all_modes().begin(), all_modes().end(), m) == all_modes().end())
            throw std::invalid_argument("unknown mode '" + m + "'");
}

namespace {

struct Measurement {
    std::size_t slice_size = 0;
    std::size_t executions = 0;
    std::size_t frontiers_checked = 0;
    std::uint64_t steps = 0;
};

Measurement measure_once(const GeneratedProgram& gp, const StaticDeps& deps, const Criterion& criterion,
                         const std::string& mode) {
    const Program& program = gp.program;
    Measurement m;
    if (mode == "ondemand-inter" || mode == "execute-once" ||
        (mode == "ondemand-intra" && !program.has_calls())) {
        const SliceResult r = mode == "ondemand-inter"   ? slice_inter(program, deps, gp.input, criterion)
                              : mode == "execute-once" ? slice_execute_once(program, deps, gp.input, criterion)
                                                       : slice_intra(program, deps, gp.input, criterion);
        m.slice_size = r.slice.size();
        m.executions = r.executions;
        m.frontiers_checked = r.frontiers_checked();
        m.steps = r.steps();
    } else if (mode == "ondemand-intra") {
        const InlinedProgram inl = inline_program(program, gp.input, criterion);
        const StaticDeps inl_deps = static_data_deps(inl.program);
        const SliceResult r = slice_intra(inl.program, inl_deps, gp.input, inl.criterion);
        m.slice_size = inl.map_back(r.slice).size();
        m.executions = r.executions;
        m.frontiers_checked = r.frontiers_checked();
        m.steps = r.steps();
    } else {
        const CorroborationReport rep = mode == "upfront-all"
                                            ? corroborate_upfront_all(program, deps, gp.input, criterion)
                                            : corroborate_upfront_static_slice(program, deps, gp.input, criterion);
        m.slice_size = slice_from_corroborated(rep, deps).size();
        m.executions = 1;
        m.frontiers_checked = rep.targeted.size();
        m.steps = rep.run_steps;
    }
    return m;
}

std::string error_status(const std::exception& e) {
    if (dynamic_cast<const CriterionNeverExecuted*>(&e)) return "CriterionNeverExecuted";
    if (const auto* r = dynamic_cast<const RuntimeError*>(&e)) return "RuntimeError:" + to_string(r->kind());
    if (dynamic_cast<const InlineBudgetExceeded*>(&e)) return "InlineBudgetExceeded";
    if (dynamic_cast<const InlineUnsupported*>(&e)) return "InlineUnsupported";
    if (dynamic_cast<const PreconditionError*>(&e)) return "PreconditionError";
    return "Error";
}

}  // namespace

MetricRecord measure(const GeneratedProgram& gp, const StaticDeps& deps, const Criterion& criterion,
                     const std::string& mode, std::uint32_t trials) {
    MetricRecord rec;
    rec.family = to_string(gp.family);
    rec.size = gp.size;
    rec.seed = gp.seed;
    rec.mode = mode;
    rec.criterion = to_string(gp.program, criterion);
    double total_ms = 0;
    try {
        for (std::uint32_t t = 0; t < std::max<std::uint32_t>(trials, 1); ++t) {
            const auto t0 = std::chrono::steady_clock::now();
            const Measurement m = measure_once(gp, deps, criterion, mode);
            total_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            rec.slice_size = m.slice_size;
            rec.executions = m.executions;
            rec.frontiers_checked = m.frontiers_checked;
            rec.steps = m.steps;
        }
        rec.wall_ms = total_ms / std::max<std::uint32_t>(trials, 1);
    } catch (const std::exception& e) {
        rec.status = error_status(e);
    }
    return rec;
}

std::vector<MetricRecord> run_suite(const BenchConfig& config) {
    config.validate();
    GenOptions options;
    options.coupled = config.coupled;

    struct Instance {
        GeneratedProgram gp;
        StaticDeps deps;
    };
    std::vector<Instance> instances;
    for (auto size : config.sizes)
        for (auto seed : config.seeds) {
            Instance inst{gen_program(config.family, size, seed, options), {}};
            inst.deps = static_data_deps(inst.gp.program);
            instances.push_back(std::move(inst));
        }

    struct Task {
        std::size_t instance;
        Criterion criterion;
        std::string mode;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& crit = instances[i].gp.criteria;
        const std::size_t n = config.max_criteria ? std::min(config.max_criteria, crit.size()) : crit.size();
        for (std::size_t c = 0; c < n; ++c)
            for (const auto& mode : config.modes) tasks.push_back({i, crit[c], mode});
    }

    std::vector<MetricRecord> records(tasks.size());
    const auto count = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel for schedule(dynamic) if (config.parallel)
    for (std::int64_t k = 0; k < count; ++k) {
        const Task& t = tasks[static_cast<std::size_t>(k)];
        const Instance& inst = instances[t.instance];
        records[static_cast<std::size_t>(k)] = measure(inst.gp, inst.deps, t.criterion, t.mode, config.trials);
    }
    return sorted(std::move(records));
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("spearman: lists differ in length");
    if (xs.size() < 2) throw std::invalid_argument("spearman: need at least two points");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> order(v.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < order.size();) {
            std::size_t j = i;
            while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
            const double mean = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[order[k]] = mean;
            i = j + 1;
        }
        return r;
    };
    auto constant = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    };
    if (constant(xs) || constant(ys)) throw DegenerateInput("spearman: constant input");
    const auto rx = ranks(xs), ry = ranks(ys);
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<MetricRecord> sorted(std::vector<MetricRecord> records) {
    std::stable_sort(records.begin(), records.end(), [](const MetricRecord& a, const MetricRecord& b) {
        return std::tie(a.family, a.size, a.seed, a.mode, a.criterion) <
               std::tie(b.family, b.size, b.seed, b.mode, b.criterion);
    });
    return records;
}

nlohmann::json to_json(const MetricRecord& r) {
    return {{"family", r.family},
            {"size", r.size},
            {"seed", r.seed},
            {"mode", r.mode},
            {"criterion", r.criterion},
            {"slice_size", r.slice_size},
            {"executions", r.executions},
            {"frontiers_checked", r.frontiers_checked},
            {"steps", r.steps},
            {"wall_ms", r.wall_ms},
            {"status", r.status}};
}

std::string format_report(const std::vector<MetricRecord>& records, ReportFormat format) {
    const auto rows = sorted(records);
    if (format == ReportFormat::Json) {
        auto arr = nlohmann::json::array();
        for (const auto& r : rows) arr.push_back(to_json(r));
        return arr.dump(2) + "\n";
    }
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        char wall[32];
        std::snprintf(wall, sizeof wall, "%.6f", r.wall_ms);
        os << r.family << ',' << r.size << ',' << r.seed << ',' << r.mode << ',' << r.criterion << ','
           << r.slice_size << ',' << r.executions << ',' << r.frontiers_checked << ',' << r.steps << ',' << wall << ','
           << r.status << '\n';
    }
    return os.str();
}

void emit_report(const std::vector<MetricRecord>& records, ReportFormat format, const std::filesystem::path& path) {
    if (records.empty()) throw std::invalid_argument("no records to report");
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
    out << format_report(records, format);
    if (!out) throw std::ios_base::failure("failed writing " + path.string());
}

}  // namespace odslice::bench
