#include "elsh/math.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "elsh/random.hpp"

namespace elsh {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr double kInvLn2 = 1.4426950408889634074;  // 1/ln(2)

double h2(double w) { return entropy_term(w) + entropy_term(1.0 - w); }

/// Adaptive Gauss-Kronrod on [a, b]; throws when the error estimate does not
/// reach `tol`. The integrands here are smooth with Gaussian-like tails, so
/// depth 15 is far more than enough.
double integrate(double a, double b, double tol, double& err_out,
                 const std::function<double(double)>& f) {
    double err = 0.0;
    const double v = GK::integrate(f, a, b, 15, 1e-13, &err);
    if (!(err <= tol)) {
        throw QuadratureError("quadrature error " + std::to_string(err) +
                              " exceeds requested tolerance " + std::to_string(tol));
    }
    err_out = err;
    return v;
}

/// Smallest x on a half-unit lattice where f has decayed below `floor_val`.
/// The integrands below are eventually decreasing (Gaussian envelopes).
double tail_cut(double start, double floor_val, const std::function<double(double)>& f) {
    double x = start;
    while (f(x) > floor_val && x < 64.0) x += 0.5;
    return x;
}

}  // namespace

double entropy_term(double w) {
    if (w <= 0.0) return 0.0;
    return -w * std::log(w) * kInvLn2;
}

double entropy_bits(std::span<const double> weights) {
    if (weights.empty()) throw std::invalid_argument("entropy_bits: empty distribution");
    double sum = 0.0, h = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("entropy_bits: negative weight");
        if (w > 1.0 + 1e-12) throw std::invalid_argument("entropy_bits: weight exceeds 1");
        sum += w;
        h += entropy_term(w);
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("entropy_bits: weights sum to " + std::to_string(sum));
    return h;
}

double phi(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

EntropyEstimate alpha_constant(double tolerance) {
    if (tolerance <= 0.0) throw std::invalid_argument("alpha_constant: tolerance must be > 0");
    const auto f = [](double x) { return h2(phi(x)); };
    // Truncate where the integrand is below 1e-16; the remaining tail is
    // dominated by a Gaussian and contributes < 1e-15.
    const double cut = tail_cut(8.0, 1e-16, f);
    double err = 0.0;
    const double v = integrate(0.0, cut, tolerance, err, f);
    return {v, err + 1e-15};
}

EntropyEstimate bit_entropy_rate(double c) {
    if (c <= 1.0) throw std::invalid_argument("bit_entropy_rate: c must be > 1");
    const auto f = [c](double x) {
        const double t = x / c;
        return std::exp(-t * t) * h2(phi(x));
    };
    const double cut = tail_cut(8.0, 1e-16, f);
    const double pref = 2.0 / (c * std::sqrt(std::numbers::pi));
    double err = 0.0;
    const double v = integrate(0.0, cut, 1e-9, err, f);
    return {pref * v, pref * (err + 1e-15)};
}

EntropyEstimate interval_hash_entropy(double c, double D, double tolerance) {
    if (c <= 1.0) throw std::invalid_argument("interval_hash_entropy: c must be > 1");
    if (D <= 0.0) throw std::invalid_argument("interval_hash_entropy: D must be > 0");
    if (tolerance <= 0.0) throw std::invalid_argument("interval_hash_entropy: tolerance must be > 0");
    const double cd = c * D;

    double err_total = 0.0, err = 0.0;

    // Probability mass of landing one interval to the right of the query
    // (equals the mass for one interval to the left).
    const double m1 = integrate(0.0, cd, tolerance, err, [cd](double u) {
                          return entropy_term(phi(u) - phi(u + cd));
                      }) / cd;
    err_total += err / cd;

    // Mass of staying in the query's interval.
    const double m0 = 2.0 * integrate(0.0, 0.5 * cd, tolerance, err, [cd](double u) {
                          return entropy_term(1.0 - phi(u) - phi(cd - u));
                      }) / cd;
    err_total += 2.0 * err / cd;

    double value = 2.0 * m1 + m0;

    // Terms for |i| >= 2 intervals away shrink under an e^{-(cD)^2/2}
    // envelope. Include them only for narrow widths; otherwise bound the
    // first omitted pair of terms into abs_error.
    const auto term_i = [cd, tolerance](int i, double& terr) {
        double e = 0.0;
        const double v = integrate(0.0, cd, tolerance, e, [cd, i](double u) {
                             return entropy_term(phi(u + (i - 1) * cd) - phi(u + i * cd));
                         }) / cd;
        terr = e / cd;
        return v;
    };
    if (cd < 4.0) {
        for (int i = 2; i <= 40; ++i) {
            double terr = 0.0;
            const double ti = term_i(i, terr);
            value += 2.0 * ti;
            err_total += 2.0 * terr;
            if (2.0 * ti < std::max(tolerance * 1e-3, 1e-18)) break;
        }
    } else {
        double terr = 0.0;
        err_total += 3.0 * term_i(2, terr);  // conservative bound on the omitted tail
    }

    return {value, err_total};
}

double far_collision_prob(double D) {
    if (D <= 0.0) throw std::invalid_argument("far_collision_prob: D must be > 0");
    const double s = std::sqrt(2.0 / std::numbers::pi);
    return 1.0 - (s / D) * (-std::expm1(-0.5 * D * D));
}

double rho(double c, double D) {
    const double g = far_collision_prob(D);
    const double m = interval_hash_entropy(c, D, 1e-9).value;
    return std::min(1.0, m / (-std::log2(g)));
}

double verify_guessing_bound(std::span<const double> weights, int trials,
                             std::uint64_t rng_seed) {
    if (trials < 1) throw std::invalid_argument("verify_guessing_bound: trials must be >= 1");
    const double bits = entropy_bits(weights);  // also validates the distribution
    const auto s = static_cast<std::uint64_t>(std::ceil(4.0 * (std::pow(2.0, bits) + 1.0)));

    std::vector<double> cdf(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    Rng rng(rng_seed);
    const auto draw = [&]() {
        const double u = rng.uniform();
        return static_cast<std::size_t>(
            std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    };

    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        const std::size_t x = draw();
        for (std::uint64_t j = 0; j < s; ++j) {
            if (draw() == x) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / trials;
}

}  // namespace elsh
