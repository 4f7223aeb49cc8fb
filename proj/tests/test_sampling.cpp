#include "doctest.h"

#include <cmath>
#include <vector>

#include "elsh/points.hpp"
#include "elsh/random.hpp"
#include "elsh/sampling.hpp"

using namespace elsh;

TEST_CASE("sphere_point lands at distance exactly r") {
    Rng rng(5);
    Point q(32);
    for (auto& v : q) v = rng.normal();
    for (double r : {0.01, 0.5, 3.0}) {
        const Point s = sphere_point(q, r, rng);
        CHECK(distance(s, q) == doctest::Approx(r).epsilon(1e-12));
    }
    // d = 1: the only unit vectors are +-1
    const Point q1{0.3};
    for (int t = 0; t < 16; ++t) {
        const Point s = sphere_point(q1, 0.25, rng);
        CHECK(std::abs(std::abs(s[0] - 0.3) - 0.25) < 1e-12);
    }
}

TEST_CASE("sphere offsets average out over many draws") {
    Rng rng(6);
    const Point q(16, 0.0);
    const int trials = 4000;
    std::vector<double> mean(16, 0.0);
    for (int t = 0; t < trials; ++t) {
        const Point s = sphere_point(q, 1.0, rng);
        for (int i = 0; i < 16; ++i) mean[i] += s[i];
    }
    // each coordinate of a uniform unit vector has variance 1/d
    const double se = (1.0 / std::sqrt(16.0)) / std::sqrt(double(trials));
    for (int i = 0; i < 16; ++i) CHECK(std::abs(mean[i] / trials) <= 4.0 * se);
}

TEST_CASE("gaussian instance concentrates norms and pairwise distances") {
    Rng rng(8);
    RandomInstanceSpec spec;
    spec.n = 400;
    spec.d = 512;
    spec.point_scale = 2.0;
    const PointSet pts = gaussian_instance(spec, rng);
    REQUIRE(pts.size() == 400);
    REQUIRE(pts.dim() == 512);

    double norm_sum = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) norm_sum += norm(pts.row(i), 512);
    // norms concentrate at scale/sqrt(2), spread ~ scale/sqrt(4d) per point
    CHECK(norm_sum / 400.0 ==
          doctest::Approx(2.0 / std::sqrt(2.0)).epsilon(0.02));

    double dist_sum = 0.0;
    int pairs = 0;
    for (int i = 0; i < 40; ++i)
        for (int j = i + 1; j < 40; ++j) {
            dist_sum += distance(pts.row(i), pts.row(j), 512);
            ++pairs;
        }
    CHECK(dist_sum / pairs == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("gaussian instance rejects degenerate shapes") {
    Rng rng(9);
    RandomInstanceSpec spec;
    spec.n = 0;
    spec.d = 4;
    CHECK_THROWS_AS(gaussian_instance(spec, rng), std::invalid_argument);
    spec.n = 4;
    spec.d = 0;
    CHECK_THROWS_AS(gaussian_instance(spec, rng), std::invalid_argument);
    spec.d = 4;
    spec.point_scale = 0.0;
    CHECK_THROWS_AS(gaussian_instance(spec, rng), std::invalid_argument);
}

TEST_CASE("planted_query sits near the requested distance in high dimension") {
    Rng rng(10);
    Point p(1024);
    for (auto& v : p) v = 0.02 * rng.normal();
    double sum = 0.0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) sum += distance(planted_query(p, 0.5, rng), p);
    // per-coordinate deviation dist/sqrt(d) gives |w| ~ dist * (1 + O(1/sqrt d))
    CHECK(sum / trials == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("distance_grid is geometric and covers the range") {
    const std::vector<double> g = distance_grid(0.5, 1.0, 0.1);
    REQUIRE(g.size() >= 2);
    CHECK(g.front() == doctest::Approx(0.5));
    CHECK(g.back() >= 1.0);
    CHECK(g[g.size() - 2] < 1.0);
    for (std::size_t i = 1; i < g.size(); ++i)
        CHECK(g[i] / g[i - 1] == doctest::Approx(1.1));

    // a range that is a single rung
    const std::vector<double> one = distance_grid(2.0, 2.0, 0.25);
    CHECK(one.front() == doctest::Approx(2.0));
    CHECK(one.back() >= 2.0);

    CHECK_THROWS_AS(distance_grid(0.0, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(distance_grid(1.0, 0.5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(distance_grid(0.5, 1.0, 0.0), std::invalid_argument);
}
