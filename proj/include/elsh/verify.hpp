#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace elsh {

/** One verification measurement with its acceptance band. */
struct CheckResult {
    int number = 0;  // check group (1..12)
    std::string name;
    double measured = 0.0;
    double lo = 0.0;  // inclusive acceptance band
    double hi = 0.0;
    bool pass = false;
    std::string detail;  // the numbers behind the verdict
    double seconds = 0.0;
};

/// Closed-form and quadrature checks: the alpha integral, sign-bit entropy
/// rates and their large-c limit, and the query exponent.
std::vector<CheckResult> verify_math(std::uint64_t seed);

/// Monte Carlo checks of the hash family: interval collision probabilities
/// against the closed form, interval-hash entropy against binned sampling,
/// sign-bit conditional-entropy symmetry, and the guess-sampling bound.
std::vector<CheckResult> verify_hash(std::uint64_t seed);

/// Index + query engine checks on planted random instances: probe-search
/// recall and far-scan accounting, expanded-index recall/size/scan caps,
/// soundness and budget invariants, fingerprint classification, determinism
/// and save/load round-trips.
std::vector<CheckResult> verify_endtoend(std::uint64_t seed);

std::vector<CheckResult> verify_all(std::uint64_t seed);

/// All measurements for one numbered check (1..12).
std::vector<CheckResult> run_check(int number, std::uint64_t seed);

/// One line per result (plus detail); returns true when every line passed.
bool print_checks(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace elsh
