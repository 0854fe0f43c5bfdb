#include "doctest.h"
#include "odslice/bench.hpp"
#include "support.hpp"

using namespace odslice;
using testing::N;
using testing::nodes;
using testing::pairs;

TEST_CASE("execute-once examples") {
    const auto p1 = parse_program(testing::kP1);
    const auto d1 = static_data_deps(p1);
    ExecuteOnceStats st;
    const auto r1 = slice_execute_once(p1, d1, {}, Criterion::at(N(p1, "main:4"), 1), {}, &st);
    CHECK(r1.slice == nodes(p1, {"main:4", "main:3", "main:1"}));
    CHECK(r1.executions == 1);
    CHECK(st.trace_occurrences == 4);
    CHECK(st.du_pairs == 2);
    CHECK(st.slice_occurrences == 3);

    const auto p2 = parse_program(testing::kP2);
    const std::vector<std::int64_t> five{5};
    CHECK(slice_execute_once(p2, static_data_deps(p2), five, Criterion::at(N(p2, "main:7"), 1)).slice ==
          nodes(p2, {"main:7", "main:3", "main:2", "main:1"}));

    const auto p3 = parse_program(testing::kP3);
    CHECK(slice_execute_once(p3, static_data_deps(p3), {}, Criterion::at(N(p3, "main:4"), 1)).slice ==
          nodes(p3, {"main:4", "main:2", "inc:2", "inc:1", "main:1"}));
    CHECK_THROWS_AS(slice_execute_once(p2, static_data_deps(p2), five, Criterion::last(N(p2, "main:5"))),
                    CriterionNeverExecuted);
}

TEST_CASE("reads by call sites still active at the criterion do not leak in") {
    const auto p3 = parse_program(testing::kP3);
    const auto d3 = static_data_deps(p3);
    // inc:1#last runs inside the second call; main:3 reads Ret only afterwards.
    const auto r = slice_execute_once(p3, d3, {}, Criterion::last(N(p3, "inc:1")));
    CHECK(r.slice == nodes(p3, {"inc:1", "main:3"}));
}

TEST_CASE("identity relation only widens the slice") {
    const auto p = parse_program(
        "proc main() {\n  i = 0;\n  s = 0;\n  while (i < 3) {\n    s = i;\n    i = i + 1;\n  }\n  print s;\n}\n");
    const auto d = static_data_deps(p);
    const auto c = Criterion::last(N(p, "main:7"));
    const auto plain = slice_execute_once(p, d, {}, c);
    ExecuteOnceOptions kl;
    kl.korel_laski_identity = true;
    const auto wide = slice_execute_once(p, d, {}, c, kl);
    CHECK(std::includes(wide.slice.begin(), wide.slice.end(), plain.slice.begin(), plain.slice.end()));
    CHECK(plain.slice == nodes(p, {"main:1", "main:3", "main:4", "main:5", "main:7"}));
}

TEST_CASE("upfront corroboration") {
    const auto p1 = parse_program(testing::kP1);
    const auto d1 = static_data_deps(p1);
    const auto all1 = corroborate_upfront_all(p1, d1, {}, Criterion::at(N(p1, "main:4"), 1));
    CHECK(all1.targeted.size() == 2);
    CHECK(all1.exercised.size() == 2);
    CHECK(slice_from_corroborated(all1, d1) == nodes(p1, {"main:4", "main:3", "main:1"}));

    const auto p2 = parse_program(testing::kP2);
    const auto d2 = static_data_deps(p2);
    const std::vector<std::int64_t> five{5};
    const auto all2 = corroborate_upfront_all(p2, d2, five, Criterion::last(N(p2, "main:7")));
    CHECK(all2.exercised.size() < all2.targeted.size());

    const auto late = parse_program("proc main() {\n  x = 1;\n  print 5;\n  print x;\n}\n");
    const auto dl = static_data_deps(late);
    CHECK(corroborate_upfront_all(late, dl, {}, Criterion::last(N(late, "main:2"))).exercised.empty());

    const auto p3 = parse_program(testing::kP3);
    const auto d3 = static_data_deps(p3);
    const auto c3 = Criterion::at(N(p3, "main:4"), 1);
    const auto sl3 = corroborate_upfront_static_slice(p3, d3, {}, c3);
    CHECK(sl3.targeted.contains({N(p3, "main:3"), N(p3, "inc:1")}));
    const auto all3 = corroborate_upfront_all(p3, d3, {}, c3);
    CHECK(slice_from_corroborated(all3, d3) == nodes(p3, {"main:4", "main:2", "inc:2", "inc:1", "main:1"}));
    CHECK(slice_from_corroborated(sl3, d3) == slice_from_corroborated(all3, d3));

    CHECK(corroborate_upfront_static_slice(p1, d1, {}, Criterion::last(N(p1, "main:1"))).targeted.empty());
    const auto whole = corroborate_upfront_static_slice(p1, d1, {}, Criterion::last(N(p1, "main:4")));
    CHECK(whole.targeted == all1.targeted);
    CHECK(whole.exercised == all1.exercised);

    const auto p0 = parse_program("proc main() {\n  print 0;\n}\n");
    const auto d0 = static_data_deps(p0);
    CHECK(slice_from_corroborated(corroborate_upfront_all(p0, d0, {}, Criterion::last(NodeId{0})), d0) ==
          NodeSet{NodeId{0}});

    const auto as = as_slice_result(all3, d3);
    CHECK(as.executions == 1);
    CHECK(as.frontiers_checked() == all3.targeted.size());
}

TEST_CASE("on-demand contains execute-once and equals the upfront closure") {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const auto gp = bench::gen_program(bench::Family::RandomCorpus, 4, seed);
        const auto deps = static_data_deps(gp.program);
        for (const auto& c : gp.criteria) {
            const auto od = slice_inter(gp.program, deps, gp.input, c);
            const auto eo = slice_execute_once(gp.program, deps, gp.input, c);
            CHECK(std::includes(od.slice.begin(), od.slice.end(), eo.slice.begin(), eo.slice.end()));
            CHECK(od.slice ==
                  slice_from_corroborated(corroborate_upfront_all(gp.program, deps, gp.input, c), deps));
        }
    }
}
