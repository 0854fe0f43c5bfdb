#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"
#include "odslice/baselines.hpp"
#include "odslice/bench.hpp"
#include "odslice/cfgdep.hpp"
#include "odslice/exec.hpp"
#include "odslice/minilang.hpp"
#include "odslice/report.hpp"
#include "odslice/sda.hpp"
#include "odslice/slicer.hpp"

namespace fs = std::filesystem;
using namespace odslice;

namespace {

enum Exit { kOk = 0, kUsage = 1, kProgramError = 2, kRuntimeError = 3, kNeverExecuted = 4, kOracleMismatch = 5 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Common {
    std::string program_path;
    std::string input_text;
    std::string input_file;
    std::string output;

    Program load() const { return parse_program(read_file(program_path)); }
    std::vector<std::int64_t> input() const {
        if (!input_file.empty()) return parse_input(read_file(input_file));
        return parse_input(input_text);
    }
};

void add_common(CLI::App* cmd, Common& c, bool with_input = true) {
    cmd->add_option("program", c.program_path, "Program source file")->required();
    if (with_input) {
        cmd->add_option("--input,-i", c.input_text, "Whitespace-separated input integers");
        cmd->add_option("--input-file", c.input_file, "File holding the input integers");
    }
    cmd->add_option("--output,-o", c.output, "Write the result to this file instead of stdout");
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

std::vector<Criterion> criteria_of(const Program& program, const std::vector<std::string>& specs) {
    std::vector<Criterion> out;
    for (const auto& s : specs) out.push_back(parse_criterion(program, s));
    return out;
}

SliceResult slice_with_mode(const Program& program, const StaticDeps& deps, std::span<const std::int64_t> input,
                            const Criterion& c, const std::string& mode, bool identity) {
    if (mode == "ondemand-inter") return slice_inter(program, deps, input, c);
    if (mode == "ondemand-intra") {
        if (!program.has_calls()) return slice_intra(program, deps, input, c);
        const InlinedProgram inl = inline_program(program, input, c);
        const StaticDeps inl_deps = static_data_deps(inl.program);
        SliceResult r = slice_intra(inl.program, inl_deps, input, inl.criterion);
        r.slice = inl.map_back(r.slice);
        for (auto& it : r.iterations) {
            // Logged pairs and nodes refer to the inlined program; map them back too.
            PairSet f2c, kept;
            for (auto [w, rd] : it.frontiers2check) f2c.emplace(inl.origin[w.value].original, inl.origin[rd.value].original);
            for (auto [w, rd] : it.kept_frontiers) kept.emplace(inl.origin[w.value].original, inl.origin[rd.value].original);
            it.frontiers2check = std::move(f2c);
            it.kept_frontiers = std::move(kept);
            it.obs_defs = inl.map_back(it.obs_defs);
            it.obs_ctxs = inl.map_back(it.obs_ctxs);
            it.delta_control = inl.map_back(it.delta_control);
        }
        return r;
    }
    if (mode == "execute-once") {
        ExecuteOnceOptions opts;
        opts.korel_laski_identity = identity;
        return slice_execute_once(program, deps, input, c, opts);
    }
    if (mode == "upfront-all") return as_slice_result(corroborate_upfront_all(program, deps, input, c), deps);
    if (mode == "upfront-slice")
        return as_slice_result(corroborate_upfront_static_slice(program, deps, input, c), deps);
    throw UsageError("unknown mode '" + mode + "'");
}

std::string default_out_dir() {
    if (const char* env = std::getenv("ODSLICE_OUT_DIR"); env && *env) return env;
    return ".";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"On-demand re-execution dynamic slicer for a small imperative language"};
    app.require_subcommand(1);

    Common run_opts;
    auto* run_cmd = app.add_subcommand("run", "Execute a program and print its outputs");
    add_common(run_cmd, run_opts);

    Common slice_opts;
    std::vector<std::string> slice_criteria;
    std::string mode = "ondemand-inter";
    bool no_timing = false;
    bool identity = false;
    auto* slice_cmd = app.add_subcommand("slice", "Compute dynamic slices as JSON");
    add_common(slice_cmd, slice_opts);
    slice_cmd->add_option("--criterion,-c", slice_criteria, "proc:line[#n|#last]; repeatable")->required();
    slice_cmd->add_option("--mode,-m", mode, "Slicing mode")
        ->check(CLI::IsMember(bench::all_modes()));
    slice_cmd->add_flag("--no-timing", no_timing, "Omit wall-clock fields");
    slice_cmd->add_flag("--korel-laski-identity", identity, "execute-once: also close over the identity relation");

    Common oracle_opts;
    std::vector<std::string> oracle_criteria;
    auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare on-demand and execute-once slices");
    add_common(oracle_cmd, oracle_opts);
    oracle_cmd->add_option("--criterion,-c", oracle_criteria, "Criteria to check (default: every executed line)");

    std::string bench_config;
    std::string bench_out_dir;
    std::string bench_format = "csv";
    int bench_threads = 0;
    auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark configuration and write reports");
    bench_cmd->add_option("config", bench_config, "BenchConfig JSON file")->required();
    bench_cmd->add_option("--out-dir", bench_out_dir, "Report directory (default: $ODSLICE_OUT_DIR or .)");
    bench_cmd->add_option("--format", bench_format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    bench_cmd->add_option("--threads", bench_threads, "Worker threads when the config enables parallel runs");

    Common dump_opts;
    bool dump_cfg_flag = false, dump_control = false, dump_data = false, dump_trace_flag = false,
         dump_source = false;
    auto* dump_cmd = app.add_subcommand("dump", "Print CFG, dependence or trace dumps");
    add_common(dump_cmd, dump_opts);
    dump_cmd->add_flag("--cfg", dump_cfg_flag, "Control flow graphs");
    dump_cmd->add_flag("--control", dump_control, "Control dependences");
    dump_cmd->add_flag("--data", dump_data, "Static data dependences");
    dump_cmd->add_flag("--trace", dump_trace_flag, "Execution trace with calling contexts");
    dump_cmd->add_flag("--source", dump_source, "Canonical source text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*run_cmd) {
            const Program p = run_opts.load();
            const auto out = run(p, run_opts.input());
            std::ostringstream os;
            for (auto v : out.printed) os << v << '\n';
            write_output(run_opts.output, os.str());
            return kOk;
        }
        if (*slice_cmd) {
            const Program p = slice_opts.load();
            const StaticDeps deps = static_data_deps(p);
            const auto input = slice_opts.input();
            const auto criteria = criteria_of(p, slice_criteria);
            nlohmann::json out;
            if (criteria.size() == 1) {
                out = to_json(p, slice_with_mode(p, deps, input, criteria[0], mode, identity));
            } else if (mode == "ondemand-inter") {
                out = nlohmann::json::array();
                int worst = kOk;
                for (const auto& e : batch_slice(p, deps, input, criteria)) {
                    if (e.result) {
                        out.push_back(to_json(p, *e.result));
                    } else {
                        out.push_back({{"error", e.error_kind}, {"message", e.error}});
                        std::cerr << "error: " << e.error << '\n';
                        worst = std::max(worst, e.error_kind == "CriterionNeverExecuted" ? int(kNeverExecuted)
                                                                                         : int(kRuntimeError));
                    }
                }
                write_output(slice_opts.output, (no_timing ? strip_timing(out) : out).dump(2) + "\n");
                return worst;
            } else {
                out = nlohmann::json::array();
                for (const auto& c : criteria) out.push_back(to_json(p, slice_with_mode(p, deps, input, c, mode, identity)));
            }
            write_output(slice_opts.output, (no_timing ? strip_timing(out) : out).dump(2) + "\n");
            return kOk;
        }
        if (*oracle_cmd) {
            const Program p = oracle_opts.load();
            const StaticDeps deps = static_data_deps(p);
            const auto input = oracle_opts.input();
            std::vector<Criterion> criteria;
            if (oracle_criteria.empty()) {
                const auto census = census_all(p, input);
                for (std::size_t i = 0; i < census.counts.size(); ++i)
                    if (census.counts[i]) criteria.push_back(Criterion::last(NodeId{static_cast<std::uint32_t>(i)}));
            } else {
                criteria = criteria_of(p, oracle_criteria);
            }
            std::ostringstream os;
            std::size_t mismatches = 0;
            for (const auto& c : criteria) {
                const SliceResult od = slice_inter(p, deps, input, c);
                const SliceResult eo = slice_execute_once(p, deps, input, c);
                NodeSet a, b;
                std::set_difference(od.slice.begin(), od.slice.end(), eo.slice.begin(), eo.slice.end(),
                                    std::inserter(a, a.end()));
                std::set_difference(eo.slice.begin(), eo.slice.end(), od.slice.begin(), od.slice.end(),
                                    std::inserter(b, b.end()));
                if (a.empty() && b.empty()) continue;
                ++mismatches;
                os << to_string(p, c) << ":";
                for (const auto& l : labels(p, a)) os << " +" << l;
                for (const auto& l : labels(p, b)) os << " -" << l;
                os << '\n';
            }
            os << "checked " << criteria.size() << " criteria, " << mismatches << " mismatches\n";
            write_output(oracle_opts.output, os.str());
            return mismatches ? kOracleMismatch : kOk;
        }
        if (*bench_cmd) {
            auto config = bench::BenchConfig::from_json(nlohmann::json::parse(read_file(bench_config)));
            if (bench_threads > 0) config.parallel = true;
#ifdef _OPENMP
            if (bench_threads > 0) omp_set_num_threads(bench_threads);
#endif
            const auto records = bench::run_suite(config);
            const fs::path dir = bench_out_dir.empty() ? fs::path(default_out_dir()) : fs::path(bench_out_dir);
            fs::create_directories(dir);
            const std::string stem = bench::to_string(config.family);
            if (bench_format != "json") bench::emit_report(records, bench::ReportFormat::Csv, dir / (stem + ".csv"));
            if (bench_format != "csv") bench::emit_report(records, bench::ReportFormat::Json, dir / (stem + ".json"));
            std::cerr << records.size() << " records written to " << dir.string() << '\n';
            return kOk;
        }
        if (*dump_cmd) {
            const Program p = dump_opts.load();
            std::ostringstream os;
            const bool any = dump_cfg_flag || dump_control || dump_data || dump_trace_flag || dump_source;
            if (dump_source) os << pretty_print(p);
            if (dump_cfg_flag || !any) os << "# cfg\n" << dump_cfg(p);
            if (dump_control || !any) os << "# control\n" << dump_control_deps(p, control_deps(p));
            if (dump_data || !any) os << "# data\n" << dump_data_deps(p, static_data_deps(p));
            if (dump_trace_flag) os << "# trace\n" << dump_trace(p, record_trace(p, dump_opts.input(), std::nullopt));
            write_output(dump_opts.output, os.str());
            return kOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const CriterionSyntaxError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const SyntaxError& e) {
        std::cerr << "syntax error: " << e.what() << '\n';
        return kProgramError;
    } catch (const ValidationError& e) {
        std::cerr << "invalid program: " << e.what() << '\n';
        return kProgramError;
    } catch (const NoSuchLine& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kProgramError;
    } catch (const CriterionNeverExecuted& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNeverExecuted;
    } catch (const RuntimeError& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kRuntimeError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: bad JSON: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}
