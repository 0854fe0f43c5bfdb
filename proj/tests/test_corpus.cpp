#include <numeric>

#include "doctest.h"
#include "odslice/corpus.hpp"

using namespace odslice::corpus;

TEST_CASE("parallel sweep matches the serial reference") {
    std::vector<std::uint64_t> seeds(24);
    std::iota(seeds.begin(), seeds.end(), 0);
    SweepOptions opt;
    const auto a = sweep_serial(seeds, opt);
    const auto b = sweep_parallel(seeds, opt);
    CHECK(a.programs == 24);
    CHECK(a.criteria == b.criteria);
    CHECK(a.errors == 0);
    CHECK(a.subset_violations == 0);
    CHECK(a.upfront_disagreements == 0);
    CHECK(a.bound_violations == 0);
    CHECK(a.mismatches == b.mismatches);
    CHECK(a.total_executions == b.total_executions);
    CHECK(a.samples == b.samples);
}

TEST_CASE("merge is order-independent") {
    const auto x = check_program(1, {});
    const auto y = check_program(2, {});
    auto xy = x;
    xy.merge(y, 8);
    auto yx = y;
    yx.merge(x, 8);
    CHECK(xy.criteria == yx.criteria);
    CHECK(xy.samples == yx.samples);
    CHECK(xy.max_steps == yx.max_steps);
}
