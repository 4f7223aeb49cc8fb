#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "elsh/points.hpp"
#include "elsh/random.hpp"

namespace elsh {

enum class HashMode : std::uint8_t { interval = 0, sign = 1 };

/** One Gaussian projection with a random interval shift. */
struct ProjectionHash {
    std::vector<double> direction;  // i.i.d. N(0,1) coordinates
    double shift = 0.0;             // uniform in [0, width)
    double width = 1.0;
};

/** k projections evaluated componentwise; the hash-table key. */
struct CompositeHash {
    std::vector<ProjectionHash> projections;
    HashMode mode = HashMode::interval;

    std::size_t k() const { return projections.size(); }
    std::size_t dim() const {
        return projections.empty() ? 0 : projections.front().direction.size();
    }
};

using CompositeKey = std::vector<std::int64_t>;

ProjectionHash new_projection(std::size_t d, double width, Rng& rng);
CompositeHash new_composite(std::size_t d, std::size_t k, double width, HashMode mode,
                            Rng& rng);

double project(const ProjectionHash& h, const double* p, std::size_t d);
double project(const ProjectionHash& h, const Point& p);

/// floor of a pre-shifted projection value into width-sized intervals.
inline std::int64_t bucket_of(double shifted, double width) {
    return static_cast<std::int64_t>(std::floor(shifted / width));
}

std::int64_t interval_bucket(const ProjectionHash& h, const double* p, std::size_t d);
std::int64_t interval_bucket(const ProjectionHash& h, const Point& p);

/// 1 when the projection is >= 0, else 0. The shift plays no role: the
/// separating hyperplane passes through the origin.
int sign_bit(const ProjectionHash& h, const double* p, std::size_t d);
int sign_bit(const ProjectionHash& h, const Point& p);

void composite_key_into(const CompositeHash& H, const double* p, std::size_t d,
                        CompositeKey& out);
CompositeKey composite_key(const CompositeHash& H, const double* p, std::size_t d);
CompositeKey composite_key(const CompositeHash& H, const Point& p);

/// 64-bit digest of a composite key for bucket storage. Collisions between
/// distinct keys occur with probability ~ (#keys)^2 / 2^64 — negligible at
/// this library's scale, and harmless for correctness because candidates are
/// verified by exact distance anyway.
inline std::uint64_t digest_step(std::uint64_t h, std::int64_t coord) {
    return mix64(h ^ static_cast<std::uint64_t>(coord));
}
inline std::uint64_t key_digest(const CompositeKey& key) {
    std::uint64_t h = 0x8f1bbcdcull;
    for (std::int64_t v : key) h = digest_step(h, v);
    return h;
}

/// Digest of shifted projection values bucketed at `width`; identical to
/// key_digest(floor(proj/width) componentwise) without materializing the key.
inline std::uint64_t projected_digest(std::span<const double> proj, double width) {
    std::uint64_t h = 0x8f1bbcdcull;
    for (double v : proj) h = digest_step(h, bucket_of(v, width));
    return h;
}

/// Samples, in projection space, the image of a uniform point on the sphere
/// of radius r around a center whose shifted projections are `base`.
///
/// For d > k this draws from the exact joint law of the k projections of a
/// uniform unit vector u: with G = P P^T = L L^T (Gram matrix of the
/// projection directions), xi ~ N(0, I_k) and Y ~ chi^2_{d-k},
///
///   P u  ~  L xi / sqrt(|xi|^2 + Y),
///
/// because (xi, Y) plays the role of (P-aligned components, residual norm)
/// of the underlying d-dimensional Gaussian. This costs O(k^2) per draw
/// instead of O(k d). When the Cholesky factorization is unavailable
/// (k >= d or a degenerate Gram matrix) it falls back to projecting an
/// explicitly sampled unit vector.
class ProjectedSampler {
public:
    explicit ProjectedSampler(const CompositeHash& H);

    bool fast() const { return fast_; }

    /// out[i] = base[i] + r * (P u)[i] for a fresh uniform unit vector u.
    void sample(std::span<const double> base, double r, Rng& rng,
                std::span<double> out) const;

private:
    const CompositeHash* hash_;
    std::size_t k_ = 0, d_ = 0;
    bool fast_ = false;
    std::vector<double> chol_;  // k x k lower-triangular factor, row-major
};

}  // namespace elsh
