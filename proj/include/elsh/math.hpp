#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace elsh {

/** A numerically computed quantity in bits, with an error bound. */
struct EntropyEstimate {
    double value = 0.0;      // bits
    double abs_error = 0.0;  // bound on the numerical error, bits
};

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// -w * log2(w) with the 0*log(0) = 0 convention (values <= 0 map to 0).
double entropy_term(double w);

/// Shannon entropy in bits of a finite distribution. Rejects negative
/// weights and sums farther than 1e-9 from 1.
double entropy_bits(std::span<const double> weights);

/// Upper tail of the standard normal: P[N(0,1) >= x] = erfc(x/sqrt 2)/2.
double phi(double x);

/// alpha = integral over [0, inf) of H2(phi(x)) dx, where H2 is the binary
/// entropy in bits. Numerically ~= 1.3030. abs_error <= tolerance or throws.
EntropyEstimate alpha_constant(double tolerance);

/// Entropy (bits) contributed by one sign-bit hash of a point at distance
/// 1/c from the query on the concentrated random instance:
///
///   rate(c) = (2 / (c * sqrt(pi))) * integral_0^inf e^{-(x/c)^2} H2(phi(x)) dx.
///
/// The prefactor is the normalization of the half-normal density of the
/// conditioned projection magnitude (projection variance 1/2), after the
/// substitution u = c*x. For large c this tends to (2*alpha/sqrt(pi)) / c.
EntropyEstimate bit_entropy_rate(double c);

/// Per-projection entropy M (bits) of an interval hash of a point at
/// distance r from the query with interval width D*c*r, conditioned on the
/// query's residue within its interval. Computed as M_{-1} + M_0 + M_1 via
/// the exact integrals
///   M_1 = (1/(cD)) * integral_0^{cD}   -w log2 w,  w = phi(u) - phi(u + cD)
///   M_0 = (2/(cD)) * integral_0^{cD/2} -w log2 w,  w = 1 - phi(u) - phi(cD - u)
/// (M_{-1} = M_1 by symmetry), plus the |i| >= 2 interval terms when
/// c*D < 4; beyond that they fall under the e^{-(cD)^2/2} envelope and the
/// first omitted term is folded into abs_error instead.
EntropyEstimate interval_hash_entropy(double c, double D, double tolerance);

/// Closed-form bound for the collision probability of one interval hash on
/// points at distance exactly 1, interval width D:
///
///   g(D) = 1 - (1/D) * sqrt(2/pi) * (1 - e^{-D^2/2}).
///
/// Note this form is an upper bound on the true collision probability: it
/// omits the event that the projection gap alone exceeds the interval (the
/// pair then splits for every shift), which has probability 2*phi(D). The
/// exact collision probability is far_collision_prob(D) - 2*phi(D); the gap
/// is ~0.0027 at D = 3 and negligible by D = 5.
double far_collision_prob(double D);

/// Query exponent rho = interval_hash_entropy(c, D) / log2(1/far_collision_prob(D)),
/// clamped to <= 1.
double rho(double c, double D);

/// Draws x from `weights`, then s = ceil(4 * (2^I + 1)) independent samples
/// (I = entropy in bits), and reports the fraction of `trials` where some
/// sample equals x. The hit rate is Omega(1/I) for any distribution.
double verify_guessing_bound(std::span<const double> weights, int trials,
                             std::uint64_t rng_seed);

}  // namespace elsh
