#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "elsh/lsh.hpp"
#include "elsh/plan.hpp"
#include "elsh/points.hpp"

namespace elsh {

enum class IndexVariant : std::uint8_t { near_linear = 0, expanded = 1 };

/**
 * One hash table stored as sorted CSR: `keys` holds the distinct 64-bit key
 * digests in ascending order, `offsets[i]..offsets[i+1]` delimits the ids
 * filed under keys[i]. Compact, cache-friendly, and bit-exact to serialize.
 */
struct BucketTable {
    CompositeHash hash;
    std::vector<std::uint64_t> keys;
    std::vector<std::uint64_t> offsets;  // size keys.size() + 1
    std::vector<std::uint32_t> ids;

    std::span<const std::uint32_t> lookup(std::uint64_t digest) const;
    std::uint64_t entries() const { return ids.size(); }
    std::uint64_t max_bucket() const;
};

struct Index {
    IndexVariant variant = IndexVariant::near_linear;
    SearchPlan plan;
    std::uint64_t n = 0, d = 0;
    std::vector<BucketTable> tables;

    PointSet points;  // empty when dropped (fingerprint-only index)
    bool has_points = false;

    std::uint32_t fingerprint_bits = 0;
    CompositeHash sketch;                       // sign-mode, fingerprint_bits projections
    std::vector<std::uint64_t> fingerprints;    // n * words, bit-packed

    // Runtime-only probe samplers, one per table (rebuilt by finalize();
    // they hold pointers into `tables`, so Index is movable but not
    // copyable).
    std::vector<ProjectedSampler> samplers;

    Index() = default;
    Index(const Index&) = delete;
    Index& operator=(const Index&) = delete;
    Index(Index&&) = default;
    Index& operator=(Index&&) = default;

    std::uint64_t entries() const;
    std::uint32_t fingerprint_words() const { return (fingerprint_bits + 63) / 64; }
    const std::uint64_t* fingerprint_row(std::uint64_t id) const {
        return fingerprints.data() + id * fingerprint_words();
    }

    /// Rebuilds the per-table probe samplers; called by builds and loads.
    void finalize();
};

/// Near-linear variant: L fresh composite hashes, each point filed once per
/// table under its own key. Total entries are exactly n*L.
Index build_near_linear(const PointSet& points, const SearchPlan& plan, std::uint32_t L,
                        const Rng& rng);

/// Expanded variant: each point filed under the keys of plan.replication
/// points sampled uniformly on the sphere of radius plan.r around it
/// (duplicate keys deduplicated per point). Refuses builds whose projected
/// entry count would exceed `memory_cap_bytes`.
Index build_expanded(const PointSet& points, const SearchPlan& plan, std::uint32_t L,
                     const Rng& rng,
                     std::uint64_t memory_cap_bytes = 4ull << 30);

/// Attaches a sign-bit sketch with `bits` projections and fingerprints all
/// indexed points under it.
void add_fingerprints(Index& index, std::uint32_t bits, const Rng& rng);

void fingerprint_into(const CompositeHash& sketch, const double* p, std::size_t d,
                      std::uint64_t* out);
std::vector<std::uint64_t> fingerprint(const CompositeHash& sketch, const double* p,
                                       std::size_t d);
std::uint32_t hamming_distance(const std::uint64_t* a, const std::uint64_t* b,
                               std::uint32_t words);

/// Ids filed under `key` in table `table_id` (empty when absent).
/// Throws std::out_of_range for a bad table id.
std::span<const std::uint32_t> bucket_lookup(const Index& index, std::uint32_t table_id,
                                             const CompositeKey& key);

// Binary index file: "ELSH" magic, version, variant, n, d, k, L, D header,
// the full plan, per-table hashes and CSR buckets, optional sketch and
// fingerprints, optional raw points, and a trailing FNV-1a checksum of all
// preceding bytes. All integers little-endian 64-bit.
void save_index(const Index& index, const std::string& path);
Index load_index(const std::string& path);

}  // namespace elsh
