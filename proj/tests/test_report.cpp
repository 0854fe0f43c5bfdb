#include "doctest.h"
#include "support.hpp"

using namespace odslice;
using testing::N;

TEST_CASE("slice result JSON") {
    const auto p1 = parse_program(testing::kP1);
    const auto d1 = static_data_deps(p1);
    const auto r = slice_inter(p1, d1, {}, Criterion::last(N(p1, "main:4")));
    const auto j = to_json(p1, r);
    CHECK(j["slice"] == nlohmann::json::array({"main:1", "main:3", "main:4"}));
    CHECK(j["mode"] == "ondemand-inter");
    CHECK(j["executions"] == 3);
    CHECK(j["iterations"].size() == 3);
    CHECK(j.contains("total_ms"));
    CHECK(j["iterations"][0].contains("wall_ms"));
    CHECK(j["iterations"][0]["frontiers2check"].size() == 1);

    const auto s = strip_timing(j);
    CHECK_FALSE(s.contains("total_ms"));
    CHECK_FALSE(s["iterations"][0].contains("wall_ms"));
    CHECK(s["slice"] == j["slice"]);
}

TEST_CASE("corroboration report JSON") {
    const auto p3 = parse_program(testing::kP3);
    const auto d3 = static_data_deps(p3);
    const auto rep = corroborate_upfront_all(p3, d3, {}, Criterion::last(N(p3, "main:4")));
    const auto j = to_json(p3, rep);
    CHECK(j["mode"] == "upfront-all");
    CHECK(strip_timing(j) == strip_timing(to_json(p3, corroborate_upfront_all(p3, d3, {},
                                                                              Criterion::last(N(p3, "main:4"))))));
}

TEST_CASE("labels follow node order") {
    const auto p3 = parse_program(testing::kP3);
    CHECK(labels(p3, testing::nodes(p3, {"main:1", "inc:2"})) == std::vector<std::string>{"inc:2", "main:1"});
}
