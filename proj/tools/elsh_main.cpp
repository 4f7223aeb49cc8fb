// Command-line front end: generate planted instances, print plans, build and
// query indexes, sweep a parameter axis into CSV, and run the verification
// checks.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "elsh/dataset_io.hpp"
#include "elsh/index.hpp"
#include "elsh/math.hpp"
#include "elsh/plan.hpp"
#include "elsh/query.hpp"
#include "elsh/sampling.hpp"
#include "elsh/verify.hpp"

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// gen-data
// ---------------------------------------------------------------------------

struct GenArgs {
    std::uint64_t n = 1000, d = 64, m = 0, seed = 1;
    double c = 2.0, r = 0.0, scale = 1.0;
    std::string plant = "sphere";  // sphere | gaussian | none
    std::string out, queries_out;
};

int run_gen(const GenArgs& a) {
    if (a.out.empty()) {
        std::cerr << "gen-data: --out is required\n";
        return 2;
    }
    const double r = a.r > 0.0 ? a.r : a.scale / a.c;
    elsh::Rng rng(a.seed);
    elsh::RandomInstanceSpec spec{a.n, a.d, a.scale, r};
    elsh::PointSet points = elsh::gaussian_instance(spec, rng);

    elsh::QuerySet qs;
    qs.queries = elsh::PointSet::with_dim(a.d);
    qs.r = r;
    qs.c = a.c;
    const double sigma = a.scale / std::sqrt(2.0 * static_cast<double>(a.d));
    std::vector<double> q(a.d), p(a.d);
    for (std::uint64_t i = 0; i < a.m; ++i) {
        for (auto& v : q) v = sigma * rng.normal();
        qs.queries.append(q.data());
        if (a.plant == "sphere") {
            elsh::sphere_point_into(q.data(), a.d, r, rng, p.data());
            points.append(p.data());
        } else if (a.plant == "gaussian") {
            const elsh::Point planted =
                elsh::planted_query({q.begin(), q.end()}, r, rng);
            points.append(planted.data());
        }
    }
    elsh::save_points(points, a.out);
    std::cout << "wrote " << points.size() << " points (dim " << a.d << ") to "
              << a.out << "\n";

    if (!a.queries_out.empty()) {
        qs.true_ids.resize(a.m, -1);
        qs.true_dists.resize(a.m, -1.0);
        for (std::uint64_t i = 0; i < a.m; ++i) {
            const auto [id, dist] = elsh::brute_force_nn(points, qs.queries.row(i));
            qs.true_ids[i] = id;
            qs.true_dists[i] = dist;
        }
        elsh::save_queries(qs, a.queries_out);
        std::cout << "wrote " << a.m << " queries (r = " << r << ", c = " << a.c
                  << ", brute-force truth attached) to " << a.queries_out << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

struct PlanArgs {
    std::uint64_t n = 1000;
    double c = 2.0, r = 1.0, D = 3.0, grid_eps = 0.1, multiplier = 1.0;
    std::uint32_t tables = 1;
    double eps = -1.0;  // expanded epsilon; < 0 means the default
    bool as_json = false;
};

int run_plan(const PlanArgs& a) {
    elsh::PlannerInput in;
    in.n = a.n;
    in.c = a.c;
    in.r = a.r;
    in.D = a.D;
    in.epsilon_grid = a.grid_eps;
    in.tables = a.tables;
    in.probe_multiplier = a.multiplier;
    const elsh::SearchPlan plan = elsh::make_plan(in);

    json j;
    j["n"] = a.n;
    j["c"] = a.c;
    j["r"] = a.r;
    j["D"] = a.D;
    j["tables"] = a.tables;
    j["k"] = plan.k;
    j["g"] = plan.g;
    j["M"] = plan.M;
    j["rho"] = plan.rho;
    j["width"] = plan.width;
    j["probe_budget"] = plan.probe_budget;
    j["far_cap"] = plan.far_cap;
    j["budget_clamped"] = plan.budget_clamped;
    j["grid_rungs"] = plan.distance_grid.size();

    const double eps =
        a.eps >= 0.0 ? a.eps : elsh::default_expansion_epsilon(std::max<std::uint64_t>(a.n, 2), plan.rho);
    j["expanded"]["epsilon"] = eps;
    try {
        const elsh::SearchPlan ex = elsh::expanded_plan(in, eps);
        j["expanded"]["feasible"] = true;
        j["expanded"]["k"] = ex.k;
        j["expanded"]["replication"] = ex.replication;
        j["expanded"]["bucket_scan_cap"] = ex.bucket_scan_cap;
        j["expanded"]["entries_estimate"] =
            static_cast<double>(a.n) * static_cast<double>(ex.replication) * a.tables;
    } catch (const elsh::PlanInfeasible& e) {
        j["expanded"]["feasible"] = false;
        j["expanded"]["reason"] = e.what();
    }

    if (a.as_json) {
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    const auto flat = [](const json& node, const std::string& prefix, auto&& self) -> void {
        for (auto it = node.begin(); it != node.end(); ++it) {
            if (it->is_object())
                self(*it, prefix + it.key() + ".", self);
            else
                std::cout << prefix << it.key() << "=" << it->dump() << "\n";
        }
    };
    flat(j, "", flat);
    return 0;
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

struct BuildArgs {
    std::string data, out;
    std::string variant = "near-linear";  // near-linear | expanded
    double c = 2.0, r = 1.0, D = 3.0, grid_eps = 0.1, multiplier = 1.0;
    double eps = -1.0;
    std::uint32_t tables = 1, fingerprint_bits = 0;
    std::uint64_t seed = 1;
    bool drop_points = false;
};

int run_build(const BuildArgs& a) {
    const elsh::PointSet points = elsh::load_points_any(a.data);
    elsh::PlannerInput in;
    in.n = points.size();
    in.c = a.c;
    in.r = a.r;
    in.D = a.D;
    in.epsilon_grid = a.grid_eps;
    in.tables = a.tables;
    in.probe_multiplier = a.multiplier;

    elsh::Index index;
    if (a.variant == "near-linear") {
        const elsh::SearchPlan plan = elsh::make_plan(in);
        index = elsh::build_near_linear(points, plan, a.tables, elsh::Rng(a.seed));
    } else if (a.variant == "expanded") {
        const elsh::SearchPlan base = elsh::make_plan(in);
        const double eps = a.eps >= 0.0
                               ? a.eps
                               : elsh::default_expansion_epsilon(
                                     std::max<std::uint64_t>(points.size(), 2), base.rho);
        const elsh::SearchPlan plan = elsh::expanded_plan(in, eps);
        index = elsh::build_expanded(points, plan, a.tables, elsh::Rng(a.seed));
    } else {
        std::cerr << "build: --variant must be near-linear or expanded\n";
        return 2;
    }
    if (a.fingerprint_bits > 0)
        elsh::add_fingerprints(index, a.fingerprint_bits, elsh::Rng(a.seed).fork(0xF16Eull));
    if (a.drop_points) {
        index.points = elsh::PointSet();
        index.has_points = false;
    }
    elsh::save_index(index, a.out);
    std::cout << "built " << a.variant << " index: n = " << index.n << ", d = " << index.d
              << ", k = " << index.plan.k << ", tables = " << index.tables.size()
              << ", entries = " << index.entries()
              << ", probe budget = " << index.plan.probe_budget
              << (index.plan.budget_clamped ? " (clamped to n)" : "") << "\n"
              << "wrote " << a.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// query
// ---------------------------------------------------------------------------

struct QueryArgs {
    std::string index, queries, out, data;
    std::string mode = "decision";  // decision | optimize
    std::uint64_t seed = 1;
    double multiplier = 1.0;
    std::uint64_t budget_override = 0;  // 0 = use the plan
    double r_min = 0.0, r_max = 0.0, grid_eps = 0.1;
    double c = 2.0, D = 3.0;
    std::uint32_t tables = 1;
    bool fallback = false, prefilter = false;
    double prefilter_fraction = 0.0;
};

void write_report_row(std::ostream& os, const elsh::QueryReport& rep) {
    os << rep.query_id << ',' << (rep.found_id ? static_cast<std::int64_t>(*rep.found_id) : -1)
       << ',' << (rep.found_distance ? *rep.found_distance : -1.0) << ','
       << (rep.success ? 1 : 0) << ',' << rep.probes_used << ',' << rep.points_scanned
       << ',' << rep.far_points_scanned << ',' << rep.tables_probed << ','
       << rep.max_table_probes << ',' << rep.max_table_far << ','
       << rep.max_bucket_scanned << ',' << rep.prefiltered << ','
       << (rep.fallback_used ? 1 : 0) << ',' << rep.grid_rung << ',' << rep.seconds
       << '\n';
}

constexpr const char* kReportHeader =
    "query_id,found_id,found_distance,success,probes_used,points_scanned,"
    "far_points_scanned,tables_probed,max_table_probes,max_table_far,"
    "max_bucket_scanned,prefiltered,fallback_used,grid_rung,seconds";

int run_query(const QueryArgs& a) {
    const elsh::QuerySet qs = elsh::load_queries(a.queries);
    const std::uint64_t m = qs.queries.size();

    elsh::SearchOptions base_opts;
    base_opts.mode =
        a.mode == "optimize" ? elsh::SearchMode::optimize : elsh::SearchMode::decision;
    base_opts.probe_multiplier = a.multiplier;
    if (a.budget_override > 0) base_opts.probe_budget_override = a.budget_override;
    base_opts.brute_force_fallback = a.fallback;
    base_opts.fingerprint_prefilter = a.prefilter;
    base_opts.fingerprint_max_fraction = a.prefilter_fraction;

    std::vector<elsh::QueryReport> reports(m);
    const bool rung_mode = a.r_min > 0.0 && a.r_max > 0.0;
    if (rung_mode) {
        if (a.data.empty()) {
            std::cerr << "query: --r-min/--r-max need --data to build the rung family\n";
            return 2;
        }
        const elsh::PointSet points = elsh::load_points_any(a.data);
        const double c = qs.c > 1.0 ? qs.c : a.c;
        const std::vector<double> grid = elsh::distance_grid(a.r_min, a.r_max, a.grid_eps);
        std::vector<elsh::Index> rungs;
        rungs.reserve(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            elsh::PlannerInput in;
            in.n = points.size();
            in.c = c;
            in.r = grid[i];
            in.D = a.D;
            in.tables = a.tables;
            rungs.push_back(elsh::build_near_linear(points, elsh::make_plan(in), a.tables,
                                                    elsh::Rng(a.seed).fork(3000 + i)));
        }
        std::cout << "built " << rungs.size() << " rung indexes over [" << a.r_min << ", "
                  << a.r_max << "]\n";
        for (std::uint64_t i = 0; i < m; ++i) {
            elsh::SearchOptions o = base_opts;
            o.seed = elsh::Rng(a.seed).fork(5000 + i).seed();
            reports[i] = elsh::search_unknown_radius(rungs, qs.queries.row(i), c, o);
            reports[i].query_id = static_cast<std::int64_t>(i);
        }
    } else {
        if (a.index.empty()) {
            std::cerr << "query: --index is required (or --r-min/--r-max with --data)\n";
            return 2;
        }
        const elsh::Index index = elsh::load_index(a.index);
        for (std::uint64_t i = 0; i < m; ++i) {
            elsh::SearchOptions o = base_opts;
            o.seed = elsh::Rng(a.seed).fork(5000 + i).seed();
            if (index.variant == elsh::IndexVariant::near_linear)
                reports[i] = elsh::entropy_probe_search(index, qs.queries.row(i),
                                                        index.plan.r, index.plan.c, o);
            else
                reports[i] = elsh::expanded_search(index, qs.queries.row(i), o);
            reports[i].query_id = static_cast<std::int64_t>(i);
        }
    }

    std::uint64_t successes = 0;
    double probes = 0, scanned = 0, far = 0, secs = 0;
    for (const auto& rep : reports) {
        successes += rep.success;
        probes += static_cast<double>(rep.probes_used);
        scanned += static_cast<double>(rep.points_scanned);
        far += static_cast<double>(rep.far_points_scanned);
        secs += rep.seconds;
    }
    const double dm = m > 0 ? static_cast<double>(m) : 1.0;
    std::cout << "queries = " << m << ", successes = " << successes
              << ", recall = " << (static_cast<double>(successes) / dm)
              << ", mean probes = " << probes / dm << ", mean scanned = " << scanned / dm
              << ", mean far = " << far / dm << ", mean seconds = " << secs / dm << "\n";

    if (!a.out.empty()) {
        std::ofstream os(a.out);
        if (!os) {
            std::cerr << "query: cannot write " << a.out << "\n";
            return 2;
        }
        os << kReportHeader << '\n';
        for (const auto& rep : reports) write_report_row(os, rep);
        std::cout << "wrote per-query reports to " << a.out << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string data, queries, out;
    std::string axis = "probe-multiplier";  // probe-multiplier | c | D | L
    std::vector<double> values;
    std::vector<std::uint64_t> seeds{1};
    double c = 0.0, r = 0.0, D = 3.0;  // 0 = take from the query file
    std::uint32_t tables = 1;
};

int run_sweep(const SweepArgs& a) {
    if (a.values.empty()) {
        std::cerr << "sweep: --values is required\n";
        return 2;
    }
    const elsh::PointSet points = elsh::load_points_any(a.data);
    const elsh::QuerySet qs = elsh::load_queries(a.queries);
    const double r = a.r > 0.0 ? a.r : qs.r;
    const double base_c = a.c > 1.0 ? a.c : qs.c;
    if (!(r > 0.0) || !(base_c > 1.0)) {
        std::cerr << "sweep: need r > 0 and c > 1 (from --r/--c or the query file)\n";
        return 2;
    }

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) {
            std::cerr << "sweep: cannot write " << a.out << "\n";
            return 2;
        }
        os = &file;
    }
    // Rows are flushed as they are produced so partial sweeps stay usable.
    *os << "# elsh sweep v1\n"
        << "axis,value,seed,recall,mean_probes,mean_far,mean_scanned,mean_seconds,"
           "index_entries,k,budget\n"
        << std::flush;

    // For the probe-multiplier axis the index does not depend on the value,
    // so one index per seed is built and reused across the whole row set.
    std::map<std::uint64_t, elsh::Index> multiplier_cache;

    for (const double value : a.values) {
        for (const std::uint64_t seed : a.seeds) {
            double c = base_c, D = a.D, mult = 1.0;
            std::uint32_t L = a.tables;
            if (a.axis == "probe-multiplier")
                mult = value;
            else if (a.axis == "c")
                c = value;
            else if (a.axis == "D")
                D = value;
            else if (a.axis == "L")
                L = static_cast<std::uint32_t>(value);
            else {
                std::cerr << "sweep: unknown axis " << a.axis << "\n";
                return 2;
            }

            elsh::PlannerInput in;
            in.n = points.size();
            in.c = c;
            in.r = r;
            in.D = D;
            in.tables = L;
            const elsh::SearchPlan plan = elsh::make_plan(in);

            const elsh::Index* index = nullptr;
            elsh::Index scratch;
            if (a.axis == "probe-multiplier") {
                auto it = multiplier_cache.find(seed);
                if (it == multiplier_cache.end())
                    it = multiplier_cache
                             .emplace(seed, elsh::build_near_linear(points, plan, L,
                                                                    elsh::Rng(seed)))
                             .first;
                index = &it->second;
            } else {
                scratch = elsh::build_near_linear(points, plan, L, elsh::Rng(seed));
                index = &scratch;
            }

            const std::uint64_t m = qs.queries.size();
            std::uint64_t successes = 0;
            double probes = 0, far = 0, scanned = 0, secs = 0;
            for (std::uint64_t qi = 0; qi < m; ++qi) {
                elsh::SearchOptions o;
                o.mode = elsh::SearchMode::decision;
                o.probe_multiplier = mult;
                o.seed = elsh::Rng(seed).fork(5000 + qi).seed();
                const elsh::QueryReport rep =
                    elsh::entropy_probe_search(*index, qs.queries.row(qi), r, c, o);
                successes += rep.success;
                probes += static_cast<double>(rep.probes_used);
                far += static_cast<double>(rep.far_points_scanned);
                scanned += static_cast<double>(rep.points_scanned);
                secs += rep.seconds;
            }
            const double dm = m > 0 ? static_cast<double>(m) : 1.0;
            *os << a.axis << ',' << value << ',' << seed << ','
                << (static_cast<double>(successes) / dm) << ',' << probes / dm << ','
                << far / dm << ',' << scanned / dm << ',' << secs / dm << ','
                << index->entries() << ',' << plan.k << ',' << plan.probe_budget << '\n'
                << std::flush;
        }
    }
    if (!a.out.empty()) std::cout << "wrote sweep rows to " << a.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
    std::string suite = "all";  // math | hash | endtoend | all
    std::uint64_t seed = 7;
    std::vector<int> checks;
};

int run_verify(const VerifyArgs& a) {
    std::vector<elsh::CheckResult> results;
    if (!a.checks.empty()) {
        for (int n : a.checks) {
            auto part = elsh::run_check(n, a.seed);
            results.insert(results.end(), part.begin(), part.end());
        }
    } else if (a.suite == "math") {
        results = elsh::verify_math(a.seed);
    } else if (a.suite == "hash") {
        results = elsh::verify_hash(a.seed);
    } else if (a.suite == "endtoend") {
        results = elsh::verify_endtoend(a.seed);
    } else if (a.suite == "all") {
        results = elsh::verify_all(a.seed);
    } else {
        std::cerr << "verify: --suite must be math, hash, endtoend or all\n";
        return 2;
    }
    return elsh::print_checks(std::cout, results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropy-probe nearest neighbor search toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI key=value file");
    app.set_version_flag("--version", "elsh 0.1.0");

    GenArgs gen;
    auto* sg = app.add_subcommand("gen-data",
                                  "generate a concentrated Gaussian instance with "
                                  "planted query neighbors and brute-force truth");
    sg->add_option("--n", gen.n, "base point count")->capture_default_str();
    sg->add_option("--d", gen.d, "dimension")->capture_default_str();
    sg->add_option("--m", gen.m, "query count")->capture_default_str();
    sg->add_option("--c", gen.c, "approximation factor")->capture_default_str();
    sg->add_option("--r", gen.r, "planted neighbor distance (default scale/c)");
    sg->add_option("--scale", gen.scale, "typical interpoint distance")->capture_default_str();
    sg->add_option("--plant", gen.plant, "sphere | gaussian | none")->capture_default_str();
    sg->add_option("--seed", gen.seed, "rng seed")->capture_default_str();
    sg->add_option("--out", gen.out, "output points file")->required();
    sg->add_option("--queries-out", gen.queries_out, "output query sidecar file");

    PlanArgs plan;
    auto* sp = app.add_subcommand("plan", "derive hash/probe parameters for an instance");
    sp->add_option("--n", plan.n, "point count")->capture_default_str();
    sp->add_option("--c", plan.c, "approximation factor")->capture_default_str();
    sp->add_option("--r", plan.r, "near distance")->capture_default_str();
    sp->add_option("--D", plan.D, "interval width in units of c*r")->capture_default_str();
    sp->add_option("--tables", plan.tables, "hash tables")->capture_default_str();
    sp->add_option("--grid-eps", plan.grid_eps, "radius grid resolution")->capture_default_str();
    sp->add_option("--multiplier", plan.multiplier, "probe budget multiplier")->capture_default_str();
    sp->add_option("--eps", plan.eps, "expanded-variant epsilon (default (1-rho)^2/log2 n)");
    sp->add_flag("--json", plan.as_json, "emit JSON instead of key=value lines");

    BuildArgs build;
    auto* sb = app.add_subcommand("build", "build an index from a points file");
    sb->add_option("--data", build.data, "points file (binary or .csv)")->required();
    sb->add_option("--out", build.out, "output index file")->required();
    sb->add_option("--variant", build.variant, "near-linear | expanded")->capture_default_str();
    sb->add_option("--c", build.c, "approximation factor")->capture_default_str();
    sb->add_option("--r", build.r, "near distance")->capture_default_str();
    sb->add_option("--D", build.D, "interval width in units of c*r")->capture_default_str();
    sb->add_option("--tables", build.tables, "hash tables")->capture_default_str();
    sb->add_option("--grid-eps", build.grid_eps, "radius grid resolution")->capture_default_str();
    sb->add_option("--multiplier", build.multiplier, "probe budget multiplier")->capture_default_str();
    sb->add_option("--eps", build.eps, "expanded-variant epsilon");
    sb->add_option("--fingerprint-bits", build.fingerprint_bits, "sign-sketch bits (0 = none)")
        ->capture_default_str();
    sb->add_option("--seed", build.seed, "rng seed")->capture_default_str();
    sb->add_flag("--drop-points", build.drop_points,
                 "store fingerprints/buckets only (index cannot verify distances)");

    QueryArgs query;
    auto* sq = app.add_subcommand("query", "run queries against an index");
    sq->add_option("--index", query.index, "index file");
    sq->add_option("--queries", query.queries, "query sidecar file")->required();
    sq->add_option("--mode", query.mode, "decision | optimize")->capture_default_str();
    sq->add_option("--seed", query.seed, "rng seed")->capture_default_str();
    sq->add_option("--multiplier", query.multiplier, "probe budget multiplier")
        ->capture_default_str();
    sq->add_option("--budget-override", query.budget_override,
                   "whole-query probe budget (0 = plan value)")->capture_default_str();
    sq->add_option("--out", query.out, "per-query report CSV");
    sq->add_option("--data", query.data, "points file for --r-min/--r-max rung mode");
    sq->add_option("--r-min", query.r_min, "smallest rung radius");
    sq->add_option("--r-max", query.r_max, "largest rung radius");
    sq->add_option("--grid-eps", query.grid_eps, "rung grid resolution")->capture_default_str();
    sq->add_option("--c", query.c, "approximation factor for rung mode")->capture_default_str();
    sq->add_option("--D", query.D, "interval width for rung mode")->capture_default_str();
    sq->add_option("--tables", query.tables, "tables per rung index")->capture_default_str();
    sq->add_flag("--brute-force-fallback", query.fallback,
                 "linear scan when the probe search fails");
    sq->add_flag("--fingerprint-prefilter", query.prefilter,
                 "skip candidates with distant fingerprints");
    sq->add_option("--prefilter-fraction", query.prefilter_fraction,
                   "prefilter threshold as a fraction of sketch bits");

    SweepArgs sweep;
    auto* ss = app.add_subcommand("sweep", "sweep one axis and emit CSV rows");
    ss->add_option("--data", sweep.data, "points file")->required();
    ss->add_option("--queries", sweep.queries, "query sidecar file")->required();
    ss->add_option("--out", sweep.out, "output CSV (default stdout)");
    ss->add_option("--axis", sweep.axis, "probe-multiplier | c | D | L")->capture_default_str();
    ss->add_option("--values", sweep.values, "axis values")->delimiter(',')->required();
    ss->add_option("--seeds", sweep.seeds, "build/query seeds")->delimiter(',')
        ->capture_default_str();
    ss->add_option("--c", sweep.c, "approximation factor (default from query file)");
    ss->add_option("--r", sweep.r, "near distance (default from query file)");
    ss->add_option("--D", sweep.D, "interval width")->capture_default_str();
    ss->add_option("--tables", sweep.tables, "hash tables")->capture_default_str();

    VerifyArgs verify;
    auto* sv = app.add_subcommand("verify", "run the verification checks");
    sv->add_option("--suite", verify.suite, "math | hash | endtoend | all")
        ->capture_default_str();
    sv->add_option("--seed", verify.seed, "rng seed")->capture_default_str();
    sv->add_option("--check", verify.checks, "run only these numbered checks (1..12)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(sg)) return run_gen(gen);
        if (app.got_subcommand(sp)) return run_plan(plan);
        if (app.got_subcommand(sb)) return run_build(build);
        if (app.got_subcommand(sq)) return run_query(query);
        if (app.got_subcommand(ss)) return run_sweep(sweep);
        if (app.got_subcommand(sv)) return run_verify(verify);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
