#include <map>
#include <random>

#include "doctest.h"
#include "odslice/bench.hpp"
#include "support.hpp"

using namespace odslice;
using testing::ctx;
using testing::N;
using testing::pairs;

namespace {

using Triple = std::tuple<std::size_t, std::size_t, Address>;

// Last-writer scan over the raw access log.
std::set<Triple> scan_events(const Trace& trace) {
    std::map<Address, std::size_t> last;
    std::set<Triple> out;
    for (const auto& e : trace.events) {
        if (e.write) {
            last[e.addr] = e.occ;
        } else if (auto it = last.find(e.addr); it != last.end()) {
            out.emplace(it->second, e.occ, e.addr);
        }
    }
    return out;
}

std::set<Triple> recorded(const Trace& trace) {
    std::set<Triple> out;
    for (const auto& du : trace.du_pairs) out.emplace(du.writer, du.reader, du.addr);
    return out;
}

}  // namespace

TEST_CASE("run prints and counts steps") {
    const auto p1 = parse_program(testing::kP1);
    const auto out = run(p1, {});
    CHECK(out.printed == std::vector<std::int64_t>{4});
    CHECK(out.steps == 4);

    const auto p2 = parse_program(testing::kP2);
    const std::vector<std::int64_t> five{5};
    CHECK(run(p2, five).printed == std::vector<std::int64_t>{1});
    const std::vector<std::int64_t> neg{-5};
    CHECK(run(p2, neg).printed == std::vector<std::int64_t>{2});
}

TEST_CASE("runtime errors") {
    auto kind_of = [](std::string_view src, std::vector<std::int64_t> input) {
        try {
            run(parse_program(src), input);
        } catch (const RuntimeError& e) {
            return to_string(e.kind());
        }
        return std::string("none");
    };
    CHECK(kind_of("proc main() {\n  input x;\n  print x;\n}\n", {}) == to_string(RuntimeError::Kind::InputExhausted));
    CHECK(kind_of("proc main() {\n  input x;\n  print 1 / x;\n}\n", {0}) == to_string(RuntimeError::Kind::DivByZero));
    CHECK(kind_of("array a[2];\nproc main() {\n  print a[2];\n}\n", {}) ==
          to_string(RuntimeError::Kind::ArrayOutOfBounds));
    CHECK(kind_of("proc main() {\n  x = 9223372036854775807;\n  print x + 1;\n}\n", {}) ==
          to_string(RuntimeError::Kind::Overflow));
}

TEST_CASE("stop halts right after the designated occurrence") {
    const auto p = parse_program("proc main() {\n  i = 0;\n  while (i < 3) {\n    i = i + 1;\n    print i;\n  }\n}\n");
    RunOptions opt;
    opt.stop = Occurrence{N(p, "main:4"), 2};
    const auto out = run(p, {}, opt);
    CHECK(out.halted_at_criterion);
    CHECK(out.printed == std::vector<std::int64_t>{1, 2});
    opt.stop = Occurrence{N(p, "main:4"), 4};
    CHECK_THROWS_AS(run(p, {}, opt), StopNotReached);
}

TEST_CASE("occurrence counts") {
    const auto p1 = parse_program(testing::kP1);
    CHECK(count_occurrences(p1, {}, N(p1, "main:3")) == 1);
    const auto loop = parse_program("proc main() {\n  i = 0;\n  while (i < 3) {\n    i = i + 1;\n  }\n}\n");
    CHECK(count_occurrences(loop, {}, N(loop, "main:3")) == 3);
    const auto p2 = parse_program(testing::kP2);
    const std::vector<std::int64_t> five{5};
    CHECK(count_occurrences(p2, five, N(p2, "main:5")) == 0);
    const auto c = census_all(p2, five);
    CHECK(c.counts[N(p2, "main:3").value] == 1);
    CHECK(c.counts[N(p2, "main:5").value] == 0);
}

TEST_CASE("DU pairs of straight-line and call programs") {
    const auto p1 = parse_program(testing::kP1);
    const auto t1 = record_trace(p1, {}, Occurrence{N(p1, "main:4"), 1});
    REQUIRE(t1.du_pairs.size() == 2);
    CHECK(t1.occurrences[t1.du_pairs[0].writer].occ.node == N(p1, "main:1"));
    CHECK(t1.occurrences[t1.du_pairs[0].reader].occ.node == N(p1, "main:3"));
    CHECK(t1.occurrences[t1.du_pairs[1].writer].occ.node == N(p1, "main:3"));
    CHECK(t1.occurrences[t1.du_pairs[1].reader].occ.node == N(p1, "main:4"));

    const auto p3 = parse_program(testing::kP3);
    const auto t3 = record_trace(p3, {}, Occurrence{N(p3, "main:4"), 1});
    bool found = false;
    for (const auto& du : t3.du_pairs) {
        const auto& w = t3.occurrences[du.writer];
        const auto& r = t3.occurrences[du.reader];
        if (w.occ == Occurrence{N(p3, "inc:2"), 1} && r.occ == Occurrence{N(p3, "main:2"), 1}) {
            found = true;
            CHECK(du.addr.kind == Address::Kind::Ret);
            CHECK(t3.context_of(du.writer) == ctx(p3, {"main:2"}));
        }
    }
    CHECK(found);

    const auto constant = parse_program("proc main() {\n  print 0;\n}\n");
    CHECK(record_trace(constant, {}, std::nullopt).du_pairs.empty());
}

TEST_CASE("DU pairs agree with a last-writer scan of the access log") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto gp = bench::gen_program(bench::Family::RandomCorpus, 4, seed);
        const auto trace = record_trace(gp.program, gp.input, std::nullopt, true);
        REQUIRE_FALSE(trace.events.empty());
        CHECK(recorded(trace) == scan_events(trace));
    }
    const auto sl = bench::gen_program(bench::Family::SortLoop, 8, 1);
    const auto trace = record_trace(sl.program, sl.input, std::nullopt, true);
    CHECK(recorded(trace) == scan_events(trace));
}

TEST_CASE("corroboration examples") {
    const auto p1 = parse_program(testing::kP1);
    const auto d1 = static_data_deps(p1);
    const Occurrence s1{N(p1, "main:4"), 1};
    // (main:2, main:3) is not a static pair; use the real one plus the inert writer.
    CHECK(corroborate_frontiers(p1, d1, {}, pairs(p1, {{"main:1", "main:3"}}), s1) ==
          pairs(p1, {{"main:1", "main:3"}}));
    CorroborationStats st;
    CHECK(corroborate_frontiers(p1, d1, {}, {}, s1, &st).empty());
    CHECK(st.shadow_writes == 0);

    const auto p2 = parse_program(testing::kP2);
    const auto d2 = static_data_deps(p2);
    const std::vector<std::int64_t> five{5};
    CHECK(corroborate_frontiers(p2, d2, five, pairs(p2, {{"main:3", "main:7"}, {"main:5", "main:7"}}),
                                Occurrence{N(p2, "main:7"), 1}) == pairs(p2, {{"main:3", "main:7"}}));

    const auto p3 = parse_program(testing::kP3);
    const auto d3 = static_data_deps(p3);
    const Occurrence s3{N(p3, "main:4"), 1};
    CHECK_THROWS_AS(corroborate_frontiers_ctx(p3, d3, {}, pairs(p3, {{"inc:2", "main:4"}}), s3), PreconditionViolation);

    const auto one = corroborate_frontiers_ctx(p3, d3, {}, pairs(p3, {{"inc:2", "main:2"}}), s3);
    CHECK(one == std::set<ContextualizedFrontier>{{N(p3, "inc:2"), ctx(p3, {"main:2"}), N(p3, "main:2"), {}}});

    const auto two = corroborate_frontiers_ctx(p3, d3, {}, pairs(p3, {{"main:2", "inc:1"}, {"main:3", "inc:1"}}), s3);
    CHECK(two == std::set<ContextualizedFrontier>{{N(p3, "main:2"), {}, N(p3, "inc:1"), ctx(p3, {"main:2"})},
                                                  {N(p3, "main:3"), {}, N(p3, "inc:1"), ctx(p3, {"main:3"})}});
}

TEST_CASE("a read after the stop is not corroborated") {
    const auto p = parse_program("proc main() {\n  x = 1;\n  print 5;\n  print x;\n}\n");
    const auto d = static_data_deps(p);
    CHECK(corroborate_frontiers(p, d, {}, d.data, Occurrence{N(p, "main:2"), 1}).empty());
    CHECK(corroborate_frontiers(p, d, {}, d.data, Occurrence{N(p, "main:3"), 1}) == d.data);
}

TEST_CASE("contextualized corroboration equals the trace-filtered oracle on random subsets") {
    std::mt19937_64 rng(11);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto gp = bench::gen_program(bench::Family::RandomCorpus, 4, seed);
        const auto deps = static_data_deps(gp.program);
        const auto census = census_all(gp.program, gp.input);
        std::vector<NodePair> all(deps.data.begin(), deps.data.end());
        for (int k = 0; k < 8; ++k) {
            PairSet f2c;
            for (const auto& pr : all)
                if (rng() % 3 == 0) f2c.insert(pr);
            const auto& c = gp.criteria[rng() % gp.criteria.size()];
            const Occurrence stop{c.node, static_cast<std::uint32_t>(1 + rng() % census.counts[c.node.value])};
            CHECK(corroborate_frontiers_ctx(gp.program, deps, gp.input, f2c, stop) ==
                  testing::trace_filtered(gp.program, gp.input, f2c, stop));
        }
    }
}

TEST_CASE("context table interns call-site sets") {
    ContextTable t;
    const auto a = t.push(0, NodeId{3});
    const auto b = t.push(a, NodeId{1});
    const auto c = t.push(t.push(0, NodeId{1}), NodeId{3});
    CHECK(t.get(0).empty());
    CHECK(t.get(b) == Context{NodeId{1}, NodeId{3}});
    CHECK(b == c);
    CHECK(t.push(0, NodeId{3}) == a);
}

TEST_CASE("input parsing") {
    CHECK(parse_input("") == std::vector<std::int64_t>{});
    CHECK(parse_input(" 1  -2\n3 ") == std::vector<std::int64_t>{1, -2, 3});
    CHECK_THROWS(parse_input("1 x"));
}
