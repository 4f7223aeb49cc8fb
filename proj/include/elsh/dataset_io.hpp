#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "elsh/points.hpp"

namespace elsh {

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Planted query set: query points plus brute-force ground truth. */
struct QuerySet {
    PointSet queries;
    double r = 0.0;  // planted neighbor distance
    double c = 0.0;  // approximation factor the instance was generated for
    std::vector<std::int64_t> true_ids;
    std::vector<double> true_dists;
};

// Binary dataset format: "ELSHDATA" magic, then version, n, d as 64-bit
// little-endian integers, then n*d coordinates as little-endian doubles,
// row-major.
void save_points(const PointSet& points, const std::string& path);
PointSet load_points(const std::string& path);

/// Comma-separated values, one point per row; a non-numeric first row is
/// treated as a header and skipped, as are blank and '#' lines.
PointSet load_points_csv(const std::string& path);

/// Dispatches on the ".csv" extension, otherwise reads the binary format.
PointSet load_points_any(const std::string& path);

// Query sidecar format: "ELSHQURY" magic, version, m, d, then r and c as
// doubles, m*d coordinates, m true neighbor ids (int64, -1 when unknown),
// m true distances (doubles).
void save_queries(const QuerySet& qs, const std::string& path);
QuerySet load_queries(const std::string& path);

}  // namespace elsh
