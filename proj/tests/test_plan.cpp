#include "doctest.h"

#include <cmath>

#include "elsh/plan.hpp"

using namespace elsh;

namespace {
PlannerInput base(std::uint64_t n, double c, double D) {
    PlannerInput in;
    in.n = n;
    in.c = c;
    in.r = 0.45;
    in.D = D;
    return in;
}
}  // namespace

TEST_CASE("near-linear plan at n = 10^4, c = 2, D = 3") {
    const SearchPlan p = make_plan(base(10000, 2.0, 3.0));
    CHECK(p.k == 31);  // ceil(log2(1e4) / log2(1/g(3)))
    CHECK(p.g == doctest::Approx(0.7369930453403368));
    CHECK(p.M == doctest::Approx(0.4343452666324683).epsilon(1e-7));
    CHECK(p.rho == doctest::Approx(0.9865270688584922).epsilon(1e-7));
    CHECK(p.width == doctest::Approx(3.0 * 2.0 * 0.45));
    // rho ~ 0.987 makes the raw budget 2^{kM(1+1/log2 n)} >> n, so it clamps
    CHECK(p.budget_clamped);
    CHECK(p.probe_budget == 10000);
    CHECK(p.far_cap == 2 * p.probe_budget);
    CHECK(p.replication == 1);
    CHECK(p.bucket_scan_cap == 0);
}

TEST_CASE("near-linear plan at n = 2^20") {
    const SearchPlan p = make_plan(base(1ull << 20, 2.0, 3.0));
    CHECK(p.k == 46);  // ceil(20 / 0.440277)
    CHECK(p.budget_clamped);
}

TEST_CASE("wider separation yields a real sublinear budget") {
    const SearchPlan p = make_plan(base(1ull << 20, 10.0, 3.0));
    // rho(10,3) ~ 0.197: budget ~ 2^{kM(1+1/20)} stays far below n
    CHECK_FALSE(p.budget_clamped);
    CHECK(p.probe_budget < (1ull << 20) / 8);
    CHECK(p.probe_budget >= 1);
    CHECK(p.far_cap == 2 * p.probe_budget);
}

TEST_CASE("probe multiplier scales the unclamped budget") {
    PlannerInput in = base(1ull << 20, 10.0, 3.0);
    const SearchPlan one = make_plan(in);
    in.probe_multiplier = 4.0;
    const SearchPlan four = make_plan(in);
    CHECK(four.probe_budget >= 3 * one.probe_budget);
    CHECK(four.probe_budget <= 5 * one.probe_budget);
}

TEST_CASE("tiny instances stay within guards") {
    const SearchPlan p = make_plan(base(1, 2.0, 3.0));
    CHECK(p.k >= 1);
    CHECK(p.probe_budget >= 1);
    CHECK(p.far_cap >= 1);
    CHECK_THROWS_AS(make_plan(base(0, 2.0, 3.0)), std::invalid_argument);
    CHECK_THROWS_AS(make_plan(base(100, 1.0, 3.0)), std::invalid_argument);
    CHECK_THROWS_AS(make_plan(base(100, 2.0, 0.0)), std::invalid_argument);
    PlannerInput in = base(100, 2.0, 3.0);
    in.r = 0.0;
    CHECK_THROWS_AS(make_plan(in), std::invalid_argument);
}

TEST_CASE("radius grid covers [r, c*r] geometrically") {
    PlannerInput in = base(1000, 2.0, 3.0);
    in.epsilon_grid = 0.1;
    const SearchPlan p = make_plan(in);
    const auto& grid = p.distance_grid;
    REQUIRE(grid.size() >= 2);
    CHECK(grid.front() == doctest::Approx(in.r));
    CHECK(grid.back() >= in.c * in.r - 1e-12);
    CHECK(grid[grid.size() - 2] < in.c * in.r);  // last rung is the first past c*r
    for (std::size_t i = 1; i < grid.size(); ++i)
        CHECK(grid[i] / grid[i - 1] == doctest::Approx(1.1));
}

TEST_CASE("expanded plan trades memory for a single probe") {
    PlannerInput in = base(10000, 4.0, 3.0);
    const SearchPlan near = make_plan(in);
    const double eps = default_expansion_epsilon(in.n, near.rho);
    CHECK(eps == doctest::Approx((1.0 - near.rho) * (1.0 - near.rho) /
                                 std::log2(10000.0)).epsilon(1e-12));
    const SearchPlan ex = expanded_plan(in, eps);
    CHECK(ex.k == 61);        // ceil(log2 n / (log2(1/g) - M(1+eps)))
    CHECK(ex.k > near.k);     // longer keys than the near-linear variant
    CHECK(ex.replication >= 1ull << 12);  // T' = ceil(2^{k M (1+eps)})
    CHECK(ex.replication <= 1ull << 16);
    CHECK(ex.bucket_scan_cap == 3);
    CHECK(ex.probe_budget == in.tables);  // one lookup per table
    CHECK(ex.epsilon == eps);
}

TEST_CASE("expanded plan at n = 1000") {
    PlannerInput in = base(1000, 4.0, 3.0);
    const SearchPlan near = make_plan(in);
    const SearchPlan ex = expanded_plan(in, default_expansion_epsilon(in.n, near.rho));
    CHECK(ex.k == 46);
    CHECK(ex.replication == 1216);
}

TEST_CASE("expanded plan is infeasible when entropy dominates") {
    // at c = 2, D = 2 each projection's entropy exceeds its discrimination
    CHECK_THROWS_AS(expanded_plan(base(1000, 2.0, 2.0), 0.01), PlanInfeasible);
    // a large epsilon can push a feasible pair over the edge too
    CHECK_THROWS_AS(expanded_plan(base(1000, 2.0, 3.0), 1.0), PlanInfeasible);
    CHECK_THROWS_AS(expanded_plan(base(1000, 4.0, 3.0), -0.5), std::invalid_argument);
}
