#include "elsh/query.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace elsh {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct EffectiveBudget {
    std::uint64_t probes;
    std::uint64_t far_cap;
};

EffectiveBudget effective_budget(const SearchPlan& plan, const SearchOptions& o) {
    std::uint64_t b = plan.probe_budget;
    if (o.probe_budget_override) {
        b = *o.probe_budget_override;
    } else if (o.probe_multiplier != 1.0) {
        if (o.probe_multiplier < 0.0)
            throw std::invalid_argument("search: probe_multiplier must be >= 0");
        b = static_cast<std::uint64_t>(
            std::llround(static_cast<double>(plan.probe_budget) * o.probe_multiplier));
    }
    // The far cap tracks the effective budget so sweeps stay proportionate.
    return {b, std::max<std::uint64_t>(1, 2 * b)};
}

/// Even split of the whole-query budget, remainder to low-numbered tables.
/// Adding one probe to the budget grows exactly one table's share, so any
/// table's probe stream under a smaller budget is a prefix of its stream
/// under a larger one.
std::uint64_t table_share(std::uint64_t budget, std::uint32_t tables, std::uint32_t t) {
    return budget / tables + (t < budget % tables ? 1 : 0);
}

/// Shared candidate-scan state for one query.
struct Scanner {
    const Index& index;
    const double* q;
    double cr2;  // (c*r)^2
    const SearchOptions& opts;
    QueryReport& report;

    // fingerprint prefilter state
    std::vector<std::uint64_t> qfp;
    std::uint32_t fp_threshold = 0;
    bool prefilter = false;

    double best_d2 = std::numeric_limits<double>::infinity();
    std::optional<std::uint32_t> best_id;

    Scanner(const Index& idx, const double* query, double c, double r,
            const SearchOptions& o, QueryReport& rep)
        : index(idx), q(query), cr2(c * r * c * r), opts(o), report(rep) {
        if (o.fingerprint_prefilter && idx.fingerprint_bits > 0) {
            prefilter = true;
            qfp = fingerprint(idx.sketch, q, idx.d);
            double frac = o.fingerprint_max_fraction;
            if (frac <= 0.0) frac = 0.5 * (0.5 + 1.0 / (2.0 * c));
            fp_threshold = static_cast<std::uint32_t>(
                std::ceil(frac * static_cast<double>(idx.fingerprint_bits)));
        }
    }

    /// Returns true when a decision-mode hit should end the search.
    /// `far_count` is the per-table far counter to charge.
    bool scan_one(std::uint32_t id, std::uint64_t& far_count) {
        if (prefilter) {
            const std::uint32_t hd = hamming_distance(
                qfp.data(), index.fingerprint_row(id), index.fingerprint_words());
            if (hd > fp_threshold) {
                ++report.prefiltered;
                return false;
            }
        }
        const double d2 = squared_distance(q, index.points.row(id), index.d);
        ++report.points_scanned;
        if (d2 < best_d2 || (d2 == best_d2 && best_id && id < *best_id)) {
            best_d2 = d2;
            best_id = id;
        }
        if (d2 <= cr2) return opts.mode == SearchMode::decision;
        ++far_count;
        ++report.far_points_scanned;
        return false;
    }

    void commit() {
        if (best_id) {
            report.found_id = best_id;
            report.found_distance = std::sqrt(best_d2);
            report.success = best_d2 <= cr2;
        }
    }
};

void run_fallback(const Index& index, const double* q, double cr, QueryReport& report) {
    const auto [id, dist] = brute_force_nn(index.points, q);
    report.points_scanned += index.points.size();
    report.found_id = id;
    report.found_distance = dist;
    report.success = dist <= cr;
    report.fallback_used = true;
}

}  // namespace

bool reports_equal(const QueryReport& a, const QueryReport& b) {
    return a.query_id == b.query_id && a.found_id == b.found_id &&
           a.found_distance == b.found_distance && a.probes_used == b.probes_used &&
           a.points_scanned == b.points_scanned &&
           a.far_points_scanned == b.far_points_scanned && a.success == b.success &&
           a.tables_probed == b.tables_probed && a.max_table_probes == b.max_table_probes &&
           a.max_table_far == b.max_table_far &&
           a.max_bucket_scanned == b.max_bucket_scanned && a.prefiltered == b.prefiltered &&
           a.fallback_used == b.fallback_used && a.grid_rung == b.grid_rung;
}

QueryReport entropy_probe_search(const Index& index, const double* q, double r, double c,
                                 const SearchOptions& options) {
    const auto start = Clock::now();
    if (index.variant != IndexVariant::near_linear)
        throw std::invalid_argument("entropy_probe_search: needs a near-linear index");
    if (!(r > 0.0)) throw std::invalid_argument("entropy_probe_search: r must be > 0");
    if (!(c > 1.0)) throw std::invalid_argument("entropy_probe_search: c must be > 1");
    if (!index.has_points)
        throw std::invalid_argument("entropy_probe_search: index carries no points");
    if (index.samplers.size() != index.tables.size())
        throw std::logic_error("entropy_probe_search: index not finalized");

    QueryReport report;
    Scanner scanner(index, q, c, r, options, report);
    const auto [budget, far_cap] = effective_budget(index.plan, options);
    const std::uint32_t k = index.plan.k;
    const double width = index.plan.width;
    const Rng base_rng(options.seed);

    std::vector<double> base(k), proj(k);
    std::unordered_set<std::uint64_t> visited;
    bool done = false;

    const auto n_tables = static_cast<std::uint32_t>(index.tables.size());
    for (std::uint32_t t = 0; t < n_tables && !done; ++t) {
        const BucketTable& table = index.tables[t];
        const std::uint64_t quota = table_share(budget, n_tables, t);
        ++report.tables_probed;
        for (std::uint32_t j = 0; j < k; ++j) {
            const ProjectionHash& h = table.hash.projections[j];
            base[j] = project(h, q, index.d) + h.shift;
        }
        visited.clear();
        std::uint64_t table_probes = 0, table_far = 0;

        // The query's own bucket comes free: it is what a plain hash lookup
        // would examine, and keeps zero-budget searches meaningful.
        const std::uint64_t center = projected_digest(base, width);
        visited.insert(center);
        for (std::uint32_t id : table.lookup(center)) {
            if (scanner.scan_one(id, table_far)) {
                done = true;
                break;
            }
            if (table_far >= far_cap) break;
        }

        Rng rng = base_rng.fork(t);
        while (!done && table_probes < quota && table_far < far_cap) {
            index.samplers[t].sample(base, r, rng, proj);
            ++table_probes;
            const std::uint64_t digest = projected_digest(proj, width);
            if (!visited.insert(digest).second) continue;  // probed before: scanned once
            for (std::uint32_t id : table.lookup(digest)) {
                if (scanner.scan_one(id, table_far)) {
                    done = true;
                    break;
                }
                if (table_far >= far_cap) break;  // cap hit: abandon this table
            }
        }

        report.probes_used += table_probes;
        report.max_table_probes = std::max(report.max_table_probes, table_probes);
        report.max_table_far = std::max(report.max_table_far, table_far);
    }

    scanner.commit();
    if (options.mode == SearchMode::decision && !report.success) {
        // Pure decision semantics: no "best effort" answer on failure.
        report.found_id.reset();
        report.found_distance.reset();
    }
    if (!report.success && options.brute_force_fallback)
        run_fallback(index, q, c * r, report);
    report.seconds = elapsed_seconds(start);
    return report;
}

QueryReport entropy_probe_search(const Index& index, const Point& q, double r, double c,
                                 const SearchOptions& options) {
    if (q.size() != index.d)
        throw std::invalid_argument("entropy_probe_search: dimension mismatch");
    return entropy_probe_search(index, q.data(), r, c, options);
}

QueryReport expanded_search(const Index& index, const double* q,
                            const SearchOptions& options) {
    const auto start = Clock::now();
    if (index.variant != IndexVariant::expanded)
        throw std::invalid_argument("expanded_search: needs an expanded index");
    if (!index.has_points)
        throw std::invalid_argument("expanded_search: index carries no points");

    QueryReport report;
    const double r = index.plan.r, c = index.plan.c;
    Scanner scanner(index, q, c, r, options, report);
    const std::uint32_t cap =
        index.plan.bucket_scan_cap == 0 ? 3 : index.plan.bucket_scan_cap;
    CompositeKey key;
    bool done = false;

    for (std::uint32_t t = 0; t < index.tables.size() && !done; ++t) {
        const BucketTable& table = index.tables[t];
        ++report.tables_probed;
        ++report.probes_used;
        report.max_table_probes = std::max<std::uint64_t>(report.max_table_probes, 1);
        composite_key_into(table.hash, q, index.d, key);
        const auto bucket = table.lookup(key_digest(key));
        std::uint64_t table_far = 0;
        std::uint32_t scanned = 0;
        for (std::uint32_t id : bucket) {
            if (scanned >= cap) break;  // at most `cap` points per bucket, always
            ++scanned;
            if (scanner.scan_one(id, table_far)) {
                done = true;
                break;
            }
        }
        report.max_bucket_scanned = std::max(report.max_bucket_scanned, scanned);
        report.max_table_far = std::max(report.max_table_far, table_far);
    }

    scanner.commit();
    if (options.mode == SearchMode::decision && !report.success) {
        report.found_id.reset();
        report.found_distance.reset();
    }
    if (!report.success && options.brute_force_fallback)
        run_fallback(index, q, c * r, report);
    report.seconds = elapsed_seconds(start);
    return report;
}

QueryReport expanded_search(const Index& index, const Point& q,
                            const SearchOptions& options) {
    if (q.size() != index.d)
        throw std::invalid_argument("expanded_search: dimension mismatch");
    return expanded_search(index, q.data(), options);
}

QueryReport search_unknown_radius(std::span<const Index> rungs, const double* q, double c,
                                  const SearchOptions& options) {
    const auto start = Clock::now();
    if (rungs.empty()) throw std::invalid_argument("search_unknown_radius: no rungs");
    for (std::size_t i = 1; i < rungs.size(); ++i)
        if (rungs[i].plan.r <= rungs[i - 1].plan.r)
            throw std::invalid_argument("search_unknown_radius: rung radii must ascend");

    QueryReport total;
    SearchOptions rung_opts = options;
    rung_opts.mode = SearchMode::decision;
    rung_opts.brute_force_fallback = false;
    for (std::size_t i = 0; i < rungs.size(); ++i) {
        rung_opts.seed = Rng(options.seed).fork(0x6e1dull + i).seed();
        QueryReport r = (rungs[i].variant == IndexVariant::near_linear)
                            ? entropy_probe_search(rungs[i], q, rungs[i].plan.r, c, rung_opts)
                            : expanded_search(rungs[i], q, rung_opts);
        total.probes_used += r.probes_used;
        total.points_scanned += r.points_scanned;
        total.far_points_scanned += r.far_points_scanned;
        total.tables_probed += r.tables_probed;
        total.prefiltered += r.prefiltered;
        total.max_table_probes = std::max(total.max_table_probes, r.max_table_probes);
        total.max_table_far = std::max(total.max_table_far, r.max_table_far);
        total.max_bucket_scanned = std::max(total.max_bucket_scanned, r.max_bucket_scanned);
        if (r.success) {
            total.found_id = r.found_id;
            total.found_distance = r.found_distance;
            total.success = true;
            total.grid_rung = static_cast<std::int32_t>(i);
            break;
        }
    }
    if (!total.success && options.brute_force_fallback && !rungs.empty() &&
        rungs[0].has_points)
        run_fallback(rungs[0], q, c * rungs.back().plan.r, total);
    total.seconds = elapsed_seconds(start);
    return total;
}

std::pair<std::uint32_t, double> brute_force_nn(const PointSet& points, const double* q) {
    if (points.empty()) throw std::invalid_argument("brute_force_nn: empty dataset");
    std::uint32_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d2 = squared_distance(q, points.row(i), points.dim());
        if (d2 < best_d2) {  // strict: ties keep the lowest id
            best_d2 = d2;
            best = static_cast<std::uint32_t>(i);
        }
    }
    return {best, std::sqrt(best_d2)};
}

std::pair<std::uint32_t, double> brute_force_nn(const PointSet& points, const Point& q) {
    if (q.size() != points.dim())
        throw std::invalid_argument("brute_force_nn: dimension mismatch");
    return brute_force_nn(points, q.data());
}

}  // namespace elsh
