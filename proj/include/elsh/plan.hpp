#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace elsh {

struct PlannerInput {
    std::uint64_t n = 0;        // database size
    double c = 2.0;             // approximation factor (> 1)
    double r = 1.0;             // near distance; far distance is c*r
    double D = 3.0;             // interval width in units of c*r
    double epsilon_grid = 0.1;  // multiplicative resolution of the radius grid
    std::uint32_t tables = 1;   // number of hash tables L
    double probe_multiplier = 1.0;  // scales the probe budget (sweeps)
};

/// Everything derived from (n, c, r, D): hash shape, probe budget, caps,
/// and the radius grid for searches with unknown neighbor distance.
struct SearchPlan {
    std::uint32_t k = 1;   // projections per table
    double g = 0.0;        // far collision probability bound per projection
    double M = 0.0;        // per-projection entropy, bits
    double rho = 0.0;      // query exponent M/log2(1/g), clamped to <= 1
    std::uint64_t probe_budget = 1;  // sampled probes per query, split across tables
    std::uint64_t far_cap = 1;       // per-table abort threshold on far points scanned
    std::vector<double> distance_grid;

    // carried instance parameters
    double c = 2.0, r = 1.0, D = 3.0;
    double width = 0.0;  // absolute interval width D*c*r
    std::uint32_t tables = 1;

    // expanded-variant parameters (replication == 1 for near-linear)
    std::uint64_t replication = 1;     // keys stored per point per table (T')
    std::uint32_t bucket_scan_cap = 0; // 0 = unlimited
    double epsilon = 0.0;              // expansion epsilon used, if any

    /// True when the raw 2^{kM(1+1/log2 n)} budget exceeded n and was
    /// clamped: brute force would match the probe count, so the near-linear
    /// index buys nothing asymptotically at these parameters.
    bool budget_clamped = false;
};

struct PlanInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Near-linear-variant plan: k = ceil(log2 n / log2(1/g)), probe budget
/// ceil(2^{k*M*(1+1/log2 n)} * probe_multiplier) clamped to <= n,
/// far_cap = 2*probe_budget, grid covering [r, c*r].
SearchPlan make_plan(const PlannerInput& input);

/// Expanded-variant plan: k = ceil(log2 n / (log2(1/g) - M(1+epsilon))),
/// replication T' = ceil(2^{k*M*(1+epsilon)}), one bucket lookup per table
/// (probe_budget == tables), at most 3 points scanned per bucket. Throws
/// PlanInfeasible when log2(1/g) <= M*(1+epsilon), i.e. rho*(1+epsilon) >= 1.
SearchPlan expanded_plan(const PlannerInput& input, double epsilon);

/// The default expansion epsilon (1-rho)^2 / log2 n.
double default_expansion_epsilon(std::uint64_t n, double rho_value);

}  // namespace elsh
