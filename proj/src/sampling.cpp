#include "elsh/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace elsh {

void sphere_point_into(const double* q, std::size_t d, double r, Rng& rng, double* out) {
    if (r <= 0.0) throw std::invalid_argument("sphere_point: r must be > 0");
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double z = rng.normal();
            out[i] = z;
            n2 += z * z;
        }
    } while (n2 == 0.0);  // all-zero draw: astronomically unlikely, retried
    const double scale = r / std::sqrt(n2);
    for (std::size_t i = 0; i < d; ++i) out[i] = q[i] + scale * out[i];
}

Point sphere_point(const Point& q, double r, Rng& rng) {
    Point out(q.size());
    sphere_point_into(q.data(), q.size(), r, rng, out.data());
    return out;
}

PointSet gaussian_instance(const RandomInstanceSpec& spec, Rng& rng) {
    if (spec.n == 0) throw std::invalid_argument("gaussian_instance: n must be >= 1");
    if (spec.d == 0) throw std::invalid_argument("gaussian_instance: d must be >= 1");
    if (spec.point_scale <= 0.0)
        throw std::invalid_argument("gaussian_instance: point_scale must be > 0");
    const double sigma = spec.point_scale / std::sqrt(2.0 * static_cast<double>(spec.d));
    PointSet points(spec.n, spec.d);
    double* out = points.data().data();
    const std::size_t total = spec.n * spec.d;
    for (std::size_t i = 0; i < total; ++i) out[i] = sigma * rng.normal();
    return points;
}

Point planted_query(const Point& p, double dist, Rng& rng) {
    if (dist < 0.0) throw std::invalid_argument("planted_query: dist must be >= 0");
    const double sigma = dist / std::sqrt(static_cast<double>(p.size()));
    Point out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] + sigma * rng.normal();
    return out;
}

std::vector<double> distance_grid(double r_min, double r_max, double epsilon) {
    if (!(r_min > 0.0) || !(r_max >= r_min))
        throw std::invalid_argument("distance_grid: need 0 < r_min <= r_max");
    if (!(epsilon > 0.0)) throw std::invalid_argument("distance_grid: epsilon must be > 0");
    std::vector<double> grid{r_min};
    // Multiplicative steps; stop at the first rung covering r_max.
    while (grid.back() < r_max * (1.0 - 1e-12) && grid.size() < 100000)
        grid.push_back(grid.back() * (1.0 + epsilon));
    return grid;
}

}  // namespace elsh
