#include <algorithm>
#include <random>

#include "doctest.h"
#include "odslice/bench.hpp"
#include "support.hpp"

using namespace odslice;
using namespace odslice::bench;

namespace {

// Spearman from the textbook rank-difference formula (no ties).
double rank_difference_formula(const std::vector<double>& xs, const std::vector<double>& ys) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j)
                if (v[j] < v[i]) r[i] += 1;
        return r;
    };
    const auto rx = ranks(xs), ry = ranks(ys);
    double d2 = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
    const double n = static_cast<double>(xs.size());
    return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("spearman") {
    CHECK(spearman({1, 2, 3}, {10, 20, 30}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3}, {30, 20, 10}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 2, 3, 4}, {2, 1, 4, 3}) == doctest::Approx(0.6));
    CHECK(spearman({1, 2, 2, 3}, {1, 2, 2, 3}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(spearman({1}, {1}), std::invalid_argument);
    CHECK_THROWS_AS(spearman({1, 1, 1}, {1, 2, 3}), DegenerateInput);
    CHECK_THROWS_AS(spearman({1, 2}, {1, 2, 3}), std::invalid_argument);

    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> xs, ys;
        for (int i = 0; i < 9; ++i) {
            xs.push_back(static_cast<double>(i) * 1.5 + 0.25);
            ys.push_back(static_cast<double>(rng() % 1000000) + 0.5 * i);
        }
        std::shuffle(xs.begin(), xs.end(), rng);
        CHECK(spearman(xs, ys) == doctest::Approx(rank_difference_formula(xs, ys)));
    }
}

TEST_CASE("generator families") {
    const auto sl = gen_program(Family::SortLoop, 8, 0);
    CHECK(sl.program.arrays().size() == 1);
    CHECK(sl.program.arrays()[0].length == 8);
    const auto census = census_all(sl.program, sl.input);
    std::size_t executed = 0;
    for (auto c : census.counts) executed += c > 0;
    CHECK(sl.criteria.size() == executed);
    const auto out = run(sl.program, sl.input).printed;
    std::vector<std::int64_t> sorted_in(sl.input.begin(), sl.input.begin() + 8);
    std::sort(sorted_in.begin(), sorted_in.end());
    CHECK(out.back() == sorted_in.back() - sorted_in.front());

    const auto dc = gen_program(Family::DoubleCall, 1, 0);
    const auto p3 = parse_program(testing::kP3);
    CHECK(dc.program.node_count() == p3.node_count());
    for (std::size_t i = 0; i < p3.node_count(); ++i) {
        const NodeId id{static_cast<std::uint32_t>(i)};
        CHECK(dc.program.node_label(id) == p3.node_label(id));
        CHECK(dc.program.node(id).kind == p3.node(id).kind);
    }
    CHECK(run(dc.program, dc.input).printed == run(p3, {}).printed);

    const auto a = gen_program(Family::RandomCorpus, 5, 42);
    const auto b = gen_program(Family::RandomCorpus, 5, 42);
    CHECK(a.source == b.source);
    CHECK(a.input == b.input);
    CHECK(a.program.procedures().size() <= 6);
    CHECK(run(a.program, a.input).steps <= kCorpusStepBudget);

    for (std::uint32_t size : {1000u, 4000u}) {
        for (bool coupled : {false, true}) {
            GenOptions opt;
            opt.coupled = coupled;
            const auto tp = gen_program(Family::TwoPhase, size, 0, opt);
            const auto deps = static_data_deps(tp.program);
            REQUIRE(tp.criteria.size() == 1);
            const auto r = slice_execute_once(tp.program, deps, tp.input, tp.criteria[0]);
            CHECK(r.slice.size() == 3);
            CHECK(r.steps() + 50 >= size);
            CHECK(r.steps() <= size + 50);
        }
    }
}

TEST_CASE("config round-trip and validation") {
    const auto j = nlohmann::json::parse(
        R"({"family":"sort-loop","sizes":[8],"seeds":[0,1],"modes":["ondemand-inter","execute-once"],"trials":2})");
    const auto c = BenchConfig::from_json(j);
    CHECK(c.family == Family::SortLoop);
    CHECK(c.seeds == std::vector<std::uint64_t>{0, 1});
    CHECK(BenchConfig::from_json(c.to_json()).to_json() == c.to_json());
    CHECK_THROWS(BenchConfig::from_json(nlohmann::json::parse(R"({"family":"nope","sizes":[8]})")));
    CHECK_THROWS(BenchConfig::from_json(nlohmann::json::parse(R"({"family":"sort-loop","sizes":[]})")));
    CHECK_THROWS(
        BenchConfig::from_json(nlohmann::json::parse(R"({"family":"sort-loop","sizes":[8],"modes":["x"]})")));
}

TEST_CASE("suite records") {
    BenchConfig c;
    c.family = Family::SortLoop;
    c.sizes = {8};
    c.modes = {"ondemand-inter"};
    const auto recs = run_suite(c);
    CHECK(recs.size() == gen_program(Family::SortLoop, 8, 0).criteria.size());
    for (const auto& r : recs) {
        CHECK(r.status == "ok");
        CHECK(r.executions >= 1);
        CHECK(r.slice_size >= 1);
    }

    c.modes = all_modes();
    c.max_criteria = 3;
    const auto serial = run_suite(c);
    CHECK(serial.size() == 15);
    c.parallel = true;
    const auto par = run_suite(c);
    REQUIRE(par.size() == serial.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].criterion == serial[i].criterion);
        CHECK(par[i].mode == serial[i].mode);
        CHECK(par[i].slice_size == serial[i].slice_size);
        CHECK(par[i].executions == serial[i].executions);
    }
}

TEST_CASE("measure flags failures in the status column") {
    auto gp = gen_program(Family::TwoPhase, 1000, 0);
    const auto deps = static_data_deps(gp.program);
    const auto rec = measure(gp, deps, Criterion::at(gp.criteria[0].node, 5), "ondemand-inter", 1);
    CHECK(rec.status == "CriterionNeverExecuted");
    const auto ok = measure(gp, deps, gp.criteria[0], "execute-once", 3);
    CHECK(ok.status == "ok");
    CHECK(ok.wall_ms >= 0);
}

TEST_CASE("report formats") {
    MetricRecord r;
    r.family = "sort-loop";
    r.size = 8;
    r.mode = "ondemand-inter";
    r.criterion = "main:3#last";
    const auto csv = format_report({r}, ReportFormat::Csv);
    CHECK(lines(csv) == 2);
    CHECK(csv.substr(0, csv.find('\n')) == kCsvHeader);

    MetricRecord bad = r;
    bad.criterion = "main:1#last";
    bad.status = "RuntimeError:DivByZero";
    const std::vector<MetricRecord> two{r, bad};
    const auto csv2 = format_report(two, ReportFormat::Csv);
    CHECK(csv2.find("RuntimeError:DivByZero") != std::string::npos);
    const auto js = nlohmann::json::parse(format_report(two, ReportFormat::Json));
    CHECK(js.size() + 1 == lines(csv2));
    CHECK(js[0]["criterion"] == "main:1#last");

    const auto s = sorted({r, bad});
    CHECK(s[0].criterion == "main:1#last");
}
