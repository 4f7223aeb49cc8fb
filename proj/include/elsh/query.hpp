#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "elsh/index.hpp"

namespace elsh {

enum class SearchMode : std::uint8_t {
    decision,  // stop at the first point within c*r
    optimize,  // exhaust the budget, return the nearest scanned point
};

struct SearchOptions {
    SearchMode mode = SearchMode::optimize;
    std::uint64_t seed = 0;  // base seed; per-table probe streams are forked from it

    /// Scales the plan's whole-query probe budget; 0 probes only the
    /// query's own bucket in each table.
    double probe_multiplier = 1.0;
    /// When set, replaces the plan's whole-query probe budget outright (may
    /// exceed n). The effective budget is split evenly across the tables,
    /// remainder to the low-numbered ones, so probes_used never exceeds it.
    std::optional<std::uint64_t> probe_budget_override;

    /// On failure, fall back to a linear scan (needs stored points).
    bool brute_force_fallback = false;

    /// Skip exact distances for candidates whose fingerprint Hamming
    /// distance exceeds the threshold (needs an index with fingerprints).
    bool fingerprint_prefilter = false;
    /// Prefilter threshold as a fraction of the sketch bits; 0 picks
    /// (1/(2c) + 1/2)/2, halfway between the near and far bit-flip rates.
    double fingerprint_max_fraction = 0.0;
};

struct QueryReport {
    std::int64_t query_id = -1;
    std::optional<std::uint32_t> found_id;
    std::optional<double> found_distance;
    std::uint64_t probes_used = 0;          // sampled probes, summed over tables
    std::uint64_t points_scanned = 0;       // exact distance computations
    std::uint64_t far_points_scanned = 0;   // scanned points at distance > c*r
    bool success = false;                   // found_distance <= c*r

    // Accounting details (budget/cap compliance is per table).
    std::uint32_t tables_probed = 0;
    std::uint64_t max_table_probes = 0;
    std::uint64_t max_table_far = 0;
    std::uint32_t max_bucket_scanned = 0;   // expanded variant: always <= 3
    std::uint64_t prefiltered = 0;          // candidates skipped by fingerprints
    bool fallback_used = false;
    std::int32_t grid_rung = -1;            // set by search_unknown_radius
    double seconds = 0.0;
};

/// Field-by-field equality ignoring the wall-clock `seconds`.
bool reports_equal(const QueryReport& a, const QueryReport& b);

/// Entropy-probe search on a near-linear index: per table, probe the
/// query's own bucket for free, then up to this table's share of the probe
/// budget of buckets keyed by hashes of points sampled uniformly on the
/// sphere of radius r around the query. A table is abandoned once its
/// far-point cap is hit. Candidates are verified by exact distance; in
/// decision mode the first point within c*r ends the search.
QueryReport entropy_probe_search(const Index& index, const double* q, double r, double c,
                                 const SearchOptions& options);
QueryReport entropy_probe_search(const Index& index, const Point& q, double r, double c,
                                 const SearchOptions& options);

/// Expanded-index search: probes exactly one bucket per table (the query's
/// own key) and scans at most plan.bucket_scan_cap points in it.
QueryReport expanded_search(const Index& index, const double* q,
                            const SearchOptions& options);
QueryReport expanded_search(const Index& index, const Point& q,
                            const SearchOptions& options);

/// Decision search at each rung of an ascending radius grid, one index per
/// rung (rungs[i].plan.r ascending); returns at the first success with
/// counters aggregated over all rungs tried.
QueryReport search_unknown_radius(std::span<const Index> rungs, const double* q, double c,
                                  const SearchOptions& options);

/// Exact nearest neighbor by linear scan; ties broken toward the lowest id.
std::pair<std::uint32_t, double> brute_force_nn(const PointSet& points, const double* q);
std::pair<std::uint32_t, double> brute_force_nn(const PointSet& points, const Point& q);

}  // namespace elsh
