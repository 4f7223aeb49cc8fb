#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "elsh/index.hpp"
#include "elsh/plan.hpp"
#include "elsh/query.hpp"
#include "elsh/sampling.hpp"

using namespace elsh;

namespace {

struct PlantedInstance {
    PointSet points;   // base points plus one mate per query, appended last
    PointSet queries;
    std::uint32_t n_base = 0;
};

/// Base points from the concentrated Gaussian instance; each query is a
/// fresh point from the same marginal with a mate planted at distance
/// exactly r (ids n_base, n_base+1, ...).
PlantedInstance make_planted(std::uint32_t n_base, std::uint32_t n_queries,
                             std::uint64_t d, double r, std::uint64_t seed) {
    Rng rng(seed);
    RandomInstanceSpec spec;
    spec.n = n_base;
    spec.d = d;
    spec.point_scale = 1.0;
    spec.query_distance = r;

    PlantedInstance out;
    out.points = gaussian_instance(spec, rng);
    out.queries = PointSet::with_dim(d);
    out.n_base = n_base;
    const double sigma = 1.0 / std::sqrt(2.0 * static_cast<double>(d));
    Point q(d), mate(d);
    for (std::uint32_t i = 0; i < n_queries; ++i) {
        for (auto& v : q) v = sigma * rng.normal();
        out.queries.append(q.data());
        sphere_point_into(q.data(), d, r, rng, mate.data());
        out.points.append(mate.data());
    }
    return out;
}

SearchPlan plan_for(std::uint64_t n, double c, double r, double D = 3.0,
                    std::uint32_t tables = 1) {
    PlannerInput in;
    in.n = n;
    in.c = c;
    in.r = r;
    in.D = D;
    in.tables = tables;
    return make_plan(in);
}

SearchOptions opts(SearchMode mode, std::uint64_t seed) {
    SearchOptions o;
    o.mode = mode;
    o.seed = seed;
    return o;
}

}  // namespace

TEST_CASE("planted neighbors are found at high rate") {
    const double c = 2.0, r = 0.3;
    const PlantedInstance inst = make_planted(400, 100, 64, r, 101);
    const Index idx = build_near_linear(
        inst.points, plan_for(inst.points.size(), c, r, 3.0, 4), 4, Rng(55));
    int hits = 0;
    for (std::uint32_t i = 0; i < 100; ++i) {
        const QueryReport rep = entropy_probe_search(
            idx, inst.queries.row(i), r, c, opts(SearchMode::decision, 9000 + i));
        hits += rep.success;
        if (rep.success) {
            REQUIRE(rep.found_distance.has_value());
            CHECK(*rep.found_distance <= c * r * (1.0 + 1e-12));
            // soundness: the reported distance is the real distance
            CHECK(*rep.found_distance ==
                  doctest::Approx(distance(inst.points.row(*rep.found_id),
                                           inst.queries.row(i), 64)));
        }
    }
    CHECK(hits >= 90);
}

TEST_CASE("a query on top of an indexed point succeeds via its own bucket") {
    const PlantedInstance inst = make_planted(100, 0, 48, 0.3, 102);
    const Index idx = build_near_linear(inst.points, plan_for(100, 2.0, 0.3), 1, Rng(56));
    for (std::uint32_t id = 0; id < 100; id += 7) {
        SearchOptions o = opts(SearchMode::decision, id);
        o.probe_multiplier = 0.0;  // the center bucket alone must do it
        const QueryReport rep = entropy_probe_search(idx, inst.points.row(id), 0.3, 2.0, o);
        CHECK(rep.success);
        CHECK(rep.probes_used == 0);
        CHECK(rep.tables_probed >= 1);
        REQUIRE(rep.found_distance.has_value());
        CHECK(*rep.found_distance <= 1e-9);
    }
}

TEST_CASE("a hopeless query fails cleanly") {
    const PlantedInstance inst = make_planted(200, 0, 32, 0.3, 103);
    const Index idx = build_near_linear(inst.points, plan_for(200, 2.0, 0.3), 1, Rng(57));
    Point far_q(32, 25.0);  // ~140 away from every indexed point

    const QueryReport dec =
        entropy_probe_search(idx, far_q, 0.3, 2.0, opts(SearchMode::decision, 1));
    CHECK_FALSE(dec.success);
    CHECK_FALSE(dec.found_id.has_value());  // decision mode reports nothing
    CHECK_FALSE(dec.found_distance.has_value());
    CHECK(dec.probes_used <= idx.plan.probe_budget);

    const QueryReport best =
        entropy_probe_search(idx, far_q, 0.3, 2.0, opts(SearchMode::optimize, 1));
    CHECK_FALSE(best.success);
    if (best.found_id) {  // optimize mode may still name the nearest scanned
        CHECK(*best.found_distance > 2.0 * 0.3);
        CHECK(*best.found_distance ==
              doctest::Approx(distance(inst.points.row(*best.found_id), far_q.data(), 32)));
    }

    SearchOptions fb = opts(SearchMode::decision, 1);
    fb.brute_force_fallback = true;
    const QueryReport fell = entropy_probe_search(idx, far_q, 0.3, 2.0, fb);
    CHECK(fell.fallback_used);
    CHECK_FALSE(fell.success);  // even the true neighbor is beyond c*r
    REQUIRE(fell.found_id.has_value());
    const auto [true_id, true_dist] = brute_force_nn(inst.points, far_q);
    CHECK(*fell.found_id == true_id);
    CHECK(*fell.found_distance == doctest::Approx(true_dist));
}

TEST_CASE("probe accounting respects the whole-query budget") {
    const PlantedInstance inst = make_planted(300, 20, 48, 0.3, 104);
    const std::uint32_t L = 3;
    const Index idx =
        build_near_linear(inst.points, plan_for(inst.points.size(), 2.0, 0.3, 3.0, L), L,
                          Rng(58));
    for (std::uint64_t budget : {0ull, 1ull, 7ull, 50ull}) {
        for (std::uint32_t i = 0; i < 20; i += 5) {
            SearchOptions o = opts(SearchMode::optimize, 40 + i);
            o.probe_budget_override = budget;
            const QueryReport rep =
                entropy_probe_search(idx, inst.queries.row(i), 0.3, 2.0, o);
            CHECK(rep.probes_used <= budget);
            CHECK(rep.max_table_probes <= (budget + L - 1) / L);
            CHECK(rep.tables_probed <= L);
        }
    }
}

TEST_CASE("success is monotone in the probe budget") {
    const double c = 2.0, r = 0.3;
    const PlantedInstance inst = make_planted(300, 40, 64, r, 105);
    const Index idx = build_near_linear(
        inst.points, plan_for(inst.points.size(), c, r, 3.0, 2), 2, Rng(59));
    int low_hits = 0, high_hits = 0;
    for (std::uint32_t i = 0; i < 40; ++i) {
        SearchOptions lo = opts(SearchMode::decision, 700 + i);
        lo.probe_budget_override = 50;
        SearchOptions hi = lo;
        hi.probe_budget_override = 100;
        const bool slo =
            entropy_probe_search(idx, inst.queries.row(i), r, c, lo).success;
        const bool shi =
            entropy_probe_search(idx, inst.queries.row(i), r, c, hi).success;
        // the first 50 probes of each table recur under the larger budget,
        // so a success cannot be lost by probing more
        if (slo) CHECK(shi);
        low_hits += slo;
        high_hits += shi;
    }
    CHECK(high_hits >= low_hits);
}

TEST_CASE("identical options reproduce identical reports") {
    const PlantedInstance inst = make_planted(150, 10, 32, 0.3, 106);
    const Index idx = build_near_linear(
        inst.points, plan_for(inst.points.size(), 2.0, 0.3, 3.0, 2), 2, Rng(60));
    for (std::uint32_t i = 0; i < 10; ++i) {
        const SearchOptions o = opts(SearchMode::optimize, 4242 + i);
        QueryReport a = entropy_probe_search(idx, inst.queries.row(i), 0.3, 2.0, o);
        QueryReport b = entropy_probe_search(idx, inst.queries.row(i), 0.3, 2.0, o);
        a.query_id = b.query_id = static_cast<std::int64_t>(i);
        CHECK(reports_equal(a, b));
        // and a different probe seed is allowed to differ
        SearchOptions o2 = o;
        o2.seed ^= 0x5555ull;
        const QueryReport c2 = entropy_probe_search(idx, inst.queries.row(i), 0.3, 2.0, o2);
        CHECK(c2.probes_used <= idx.plan.probe_budget);
    }
}

TEST_CASE("argument validation in the search entry points") {
    const PlantedInstance inst = make_planted(50, 0, 16, 0.3, 107);
    const Index idx = build_near_linear(inst.points, plan_for(50, 2.0, 0.3), 1, Rng(61));
    const Point q(16, 0.0);
    CHECK_THROWS_AS(entropy_probe_search(idx, q, 0.0, 2.0, opts(SearchMode::decision, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(entropy_probe_search(idx, q, 0.3, 1.0, opts(SearchMode::decision, 1)),
                    std::invalid_argument);
    const Point wrong(8, 0.0);
    CHECK_THROWS_AS(entropy_probe_search(idx, wrong, 0.3, 2.0, opts(SearchMode::decision, 1)),
                    std::invalid_argument);
    SearchOptions bad = opts(SearchMode::decision, 1);
    bad.probe_multiplier = -1.0;
    CHECK_THROWS_AS(entropy_probe_search(idx, q, 0.3, 2.0, bad), std::invalid_argument);
    CHECK_THROWS_AS(expanded_search(idx, q, opts(SearchMode::decision, 1)),
                    std::invalid_argument);  // wrong variant
}

TEST_CASE("expanded index answers with one lookup per table") {
    const double c = 4.0, r = 0.25;
    const PlantedInstance inst = make_planted(150, 60, 64, r, 108);
    PlannerInput in;
    in.n = inst.points.size();
    in.c = c;
    in.r = r;
    in.D = 3.0;
    in.tables = 8;
    const SearchPlan near = make_plan(in);
    const SearchPlan ex = expanded_plan(in, default_expansion_epsilon(in.n, near.rho));
    const Index idx = build_expanded(inst.points, ex, 8, Rng(62));

    int hits = 0;
    for (std::uint32_t i = 0; i < 60; ++i) {
        const QueryReport rep =
            expanded_search(idx, inst.queries.row(i), opts(SearchMode::decision, 200 + i));
        hits += rep.success;
        CHECK(rep.probes_used <= 8);          // one bucket per table, no sampling
        CHECK(rep.max_table_probes <= 1);
        CHECK(rep.max_bucket_scanned <= 3);   // hard scan cap per bucket
        if (rep.success) CHECK(*rep.found_distance <= c * r * (1.0 + 1e-12));
    }
    CHECK(hits >= 42);  // >= 70% with generous slack; typically much higher

    // wrong variant for the sampling search
    CHECK_THROWS_AS(entropy_probe_search(idx, inst.queries.row(0), r, c,
                                         opts(SearchMode::decision, 1)),
                    std::invalid_argument);
}

TEST_CASE("unknown-radius search walks the rung ladder") {
    const double c = 2.0, r_true = 0.32;
    const PlantedInstance inst = make_planted(250, 30, 48, r_true, 109);
    const std::vector<double> grid = distance_grid(0.2, 0.8, 0.25);
    std::vector<Index> rungs;
    for (std::size_t j = 0; j < grid.size(); ++j)
        rungs.push_back(build_near_linear(inst.points,
                                          plan_for(inst.points.size(), c, grid[j], 3.0, 2),
                                          2, Rng(63 + j)));
    int hits = 0;
    for (std::uint32_t i = 0; i < 30; ++i) {
        const QueryReport rep = search_unknown_radius(
            rungs, inst.queries.row(i), c, opts(SearchMode::decision, 300 + i));
        if (rep.success) {
            ++hits;
            REQUIRE(rep.grid_rung >= 0);
            REQUIRE(rep.grid_rung < static_cast<std::int32_t>(rungs.size()));
            CHECK(*rep.found_distance <= c * rungs[rep.grid_rung].plan.r * (1.0 + 1e-12));
        } else {
            CHECK(rep.grid_rung == -1);
        }
    }
    CHECK(hits >= 27);

    // a hopeless query exhausts every rung
    Point far_q(48, 30.0);
    const QueryReport none =
        search_unknown_radius(rungs, far_q.data(), c, opts(SearchMode::decision, 1));
    CHECK_FALSE(none.success);
    CHECK(none.grid_rung == -1);
    CHECK(none.tables_probed == 2 * rungs.size());

    CHECK_THROWS_AS(search_unknown_radius({}, far_q.data(), c,
                                          opts(SearchMode::decision, 1)),
                    std::invalid_argument);
    std::vector<Index> descending;
    descending.push_back(build_near_linear(inst.points,
                                           plan_for(inst.points.size(), c, 0.5), 1, Rng(70)));
    descending.push_back(build_near_linear(inst.points,
                                           plan_for(inst.points.size(), c, 0.3), 1, Rng(71)));
    CHECK_THROWS_AS(search_unknown_radius(descending, far_q.data(), c,
                                          opts(SearchMode::decision, 1)),
                    std::invalid_argument);
}

TEST_CASE("brute force breaks distance ties toward the lowest id") {
    PointSet pts(3, 2);
    pts.row(0)[0] = 1.0;
    pts.row(0)[1] = 0.0;
    pts.row(1)[0] = 1.0;
    pts.row(1)[1] = 0.0;
    pts.row(2)[0] = 0.9;
    pts.row(2)[1] = 0.0;
    const Point q{0.0, 0.0};
    const auto [id, dist] = brute_force_nn(pts, q);
    CHECK(id == 2);
    CHECK(dist == doctest::Approx(0.9));
    const Point q2{2.0, 0.0};  // now ids 0 and 1 tie at distance 1
    CHECK(brute_force_nn(pts, q2).first == 0);
}

TEST_CASE("fingerprint prefilter skips far candidates but keeps neighbors") {
    const double c = 4.0, r = 0.25;
    const PlantedInstance inst = make_planted(300, 40, 128, r, 110);
    Index idx = build_near_linear(
        inst.points, plan_for(inst.points.size(), c, r, 3.0, 6), 6, Rng(64));
    add_fingerprints(idx, 128, Rng(65));

    int hits = 0;
    for (std::uint32_t i = 0; i < 40; ++i) {
        SearchOptions o = opts(SearchMode::decision, 500 + i);
        o.fingerprint_prefilter = true;
        o.probe_multiplier = 8.0;
        const QueryReport rep = entropy_probe_search(idx, inst.queries.row(i), r, c, o);
        hits += rep.success;
        if (rep.success)
            CHECK(*rep.found_distance <= c * r * (1.0 + 1e-12));
    }
    CHECK(hits >= 34);  // the planted mate's sketch is close, so it survives
    // without fingerprints the option quietly degrades to a plain search
    const Index bare = build_near_linear(
        inst.points, plan_for(inst.points.size(), c, r, 3.0, 1), 1, Rng(66));
    SearchOptions o = opts(SearchMode::decision, 1);
    o.fingerprint_prefilter = true;
    const QueryReport rep = entropy_probe_search(bare, inst.queries.row(0), r, c, o);
    CHECK(rep.prefiltered == 0);
}
