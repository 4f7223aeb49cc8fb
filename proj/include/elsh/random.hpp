#pragma once

#include <cstdint>
#include <random>

namespace elsh {

/** splitmix64 finalizer; used for seed derivation and bucket-key digests. */
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Deterministic random source: a seeded mt19937_64 plus the handful of
/// distributions the library needs. fork(tag) derives an independent stream
/// from the *original* seed and the tag (not from the current state), so a
/// caller can hand out reproducible per-table or per-query generators in any
/// order, from any thread.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix64(seed)) {}

    std::uint64_t seed() const { return seed_; }
    std::mt19937_64& gen() { return gen_; }

    double normal() { return normal_(gen_); }
    double uniform() { return unif_(gen_); }  // in [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * unif_(gen_); }

    /// chi-square with nu degrees of freedom, i.e. Gamma(nu/2, scale 2).
    double chi_square(double nu) {
        std::gamma_distribution<double> g(0.5 * nu, 2.0);
        return g(gen_);
    }

    std::uint64_t next_u64() { return gen_(); }

    Rng fork(std::uint64_t tag) const {
        return Rng(mix64(seed_ ^ mix64(tag + 0x517cc1b727220a95ull)));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

}  // namespace elsh
