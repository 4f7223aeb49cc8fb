#pragma once

#include <cstdint>
#include <vector>

#include "elsh/points.hpp"
#include "elsh/random.hpp"

namespace elsh {

/** Parameters of the concentrated Gaussian instance. */
struct RandomInstanceSpec {
    std::uint64_t n = 0;
    std::uint64_t d = 0;
    /// Typical interpoint distance; per-coordinate deviation is
    /// point_scale / sqrt(2d), so point norms concentrate at point_scale/sqrt(2)
    /// and pairwise distances at point_scale.
    double point_scale = 1.0;
    /// Distance at which query neighbors are planted (usually point_scale/c).
    double query_distance = 0.0;
};

/// q + r*u with u uniform on the unit sphere (normalized Gaussian vector);
/// the result is at distance exactly r from q (up to rounding).
Point sphere_point(const Point& q, double r, Rng& rng);
void sphere_point_into(const double* q, std::size_t d, double r, Rng& rng, double* out);

/// n points with i.i.d. normal coordinates of deviation point_scale/sqrt(2d).
PointSet gaussian_instance(const RandomInstanceSpec& spec, Rng& rng);

/// p + w with w Gaussian of total deviation `dist` (per-coordinate
/// dist/sqrt(d)); the result is at distance close to `dist` for large d.
Point planted_query(const Point& p, double dist, Rng& rng);

/// Geometric grid r_min * (1+epsilon)^j, ascending, first entry r_min,
/// last entry the first value >= r_max.
std::vector<double> distance_grid(double r_min, double r_max, double epsilon);

}  // namespace elsh
