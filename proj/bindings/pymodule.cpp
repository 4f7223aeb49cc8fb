// Python bindings for the core operations: planning, instance generation,
// index builds, searches, serialization, and the verification checks.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <stdexcept>
#include <vector>

#include "elsh/dataset_io.hpp"
#include "elsh/index.hpp"
#include "elsh/math.hpp"
#include "elsh/plan.hpp"
#include "elsh/query.hpp"
#include "elsh/sampling.hpp"
#include "elsh/verify.hpp"

namespace py = pybind11;
using namespace elsh;

namespace {

PointSet points_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw std::invalid_argument("points must be a 2-d array");
    const auto n = static_cast<std::size_t>(arr.shape(0));
    const auto d = static_cast<std::size_t>(arr.shape(1));
    if (n == 0 || d == 0) throw std::invalid_argument("points array must be non-empty");
    PointSet pts(n, d);
    std::memcpy(pts.data().data(), arr.data(), n * d * sizeof(double));
    return pts;
}

py::array_t<double> array_from_points(const PointSet& pts) {
    py::array_t<double> arr({pts.size(), pts.dim()});
    std::memcpy(arr.mutable_data(), pts.data().data(),
                pts.size() * pts.dim() * sizeof(double));
    return arr;
}

Point point_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 1) throw std::invalid_argument("expected a 1-d vector");
    return Point(arr.data(), arr.data() + arr.shape(0));
}

PlannerInput planner_input(std::uint64_t n, double c, double r, double D,
                           double epsilon_grid, std::uint32_t tables,
                           double probe_multiplier) {
    PlannerInput in;
    in.n = n;
    in.c = c;
    in.r = r;
    in.D = D;
    in.epsilon_grid = epsilon_grid;
    in.tables = tables;
    in.probe_multiplier = probe_multiplier;
    return in;
}

SearchOptions make_options(const std::string& mode, std::uint64_t seed,
                           double probe_multiplier,
                           std::optional<std::uint64_t> probe_budget_override,
                           bool brute_force_fallback, bool fingerprint_prefilter,
                           double fingerprint_max_fraction) {
    SearchOptions o;
    if (mode == "decision")
        o.mode = SearchMode::decision;
    else if (mode == "optimize")
        o.mode = SearchMode::optimize;
    else
        throw std::invalid_argument("mode must be 'decision' or 'optimize'");
    o.seed = seed;
    o.probe_multiplier = probe_multiplier;
    o.probe_budget_override = probe_budget_override;
    o.brute_force_fallback = brute_force_fallback;
    o.fingerprint_prefilter = fingerprint_prefilter;
    o.fingerprint_max_fraction = fingerprint_max_fraction;
    return o;
}

}  // namespace

PYBIND11_MODULE(_elsh, m) {
    m.doc() = "entropy-probe nearest neighbor search";

    py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_ArithmeticError);
    py::register_exception<PlanInfeasible>(m, "PlanInfeasible", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_IOError);

    // ---- numeric groundwork ------------------------------------------------
    py::class_<EntropyEstimate>(m, "EntropyEstimate")
        .def_readonly("value", &EntropyEstimate::value)
        .def_readonly("abs_error", &EntropyEstimate::abs_error)
        .def("__repr__", [](const EntropyEstimate& e) {
            return "EntropyEstimate(value=" + std::to_string(e.value) +
                   ", abs_error=" + std::to_string(e.abs_error) + ")";
        });

    m.def("entropy_bits",
          [](const std::vector<double>& w) { return entropy_bits(w); },
          py::arg("weights"), "Shannon entropy in bits of a finite distribution.");
    m.def("phi", &phi, py::arg("x"), "Standard normal upper tail P[N(0,1) >= x].");
    m.def("alpha_constant", &alpha_constant, py::arg("tolerance") = 1e-9);
    m.def("bit_entropy_rate", &bit_entropy_rate, py::arg("c"));
    m.def("interval_hash_entropy", &interval_hash_entropy, py::arg("c"), py::arg("D"),
          py::arg("tolerance") = 1e-9);
    m.def("far_collision_prob", &far_collision_prob, py::arg("D"));
    m.def("rho", &rho, py::arg("c"), py::arg("D"),
          "Query exponent M/log2(1/g), clamped to <= 1.");
    m.def("verify_guessing_bound",
          [](const std::vector<double>& w, int trials, std::uint64_t seed) {
              return verify_guessing_bound(w, trials, seed);
          },
          py::arg("weights"), py::arg("trials") = 2000, py::arg("seed") = 1);

    // ---- planning ----------------------------------------------------------
    py::class_<SearchPlan>(m, "SearchPlan")
        .def_readonly("k", &SearchPlan::k)
        .def_readonly("g", &SearchPlan::g)
        .def_readonly("M", &SearchPlan::M)
        .def_readonly("rho", &SearchPlan::rho)
        .def_readonly("probe_budget", &SearchPlan::probe_budget)
        .def_readonly("far_cap", &SearchPlan::far_cap)
        .def_readonly("distance_grid", &SearchPlan::distance_grid)
        .def_readonly("c", &SearchPlan::c)
        .def_readonly("r", &SearchPlan::r)
        .def_readonly("D", &SearchPlan::D)
        .def_readonly("width", &SearchPlan::width)
        .def_readonly("tables", &SearchPlan::tables)
        .def_readonly("replication", &SearchPlan::replication)
        .def_readonly("bucket_scan_cap", &SearchPlan::bucket_scan_cap)
        .def_readonly("epsilon", &SearchPlan::epsilon)
        .def_readonly("budget_clamped", &SearchPlan::budget_clamped)
        .def("__repr__", [](const SearchPlan& p) {
            return "SearchPlan(k=" + std::to_string(p.k) +
                   ", probe_budget=" + std::to_string(p.probe_budget) +
                   ", tables=" + std::to_string(p.tables) +
                   ", replication=" + std::to_string(p.replication) + ")";
        });

    m.def("make_plan",
          [](std::uint64_t n, double c, double r, double D, double epsilon_grid,
             std::uint32_t tables, double probe_multiplier) {
              return make_plan(planner_input(n, c, r, D, epsilon_grid, tables,
                                             probe_multiplier));
          },
          py::arg("n"), py::arg("c") = 2.0, py::arg("r") = 1.0, py::arg("D") = 3.0,
          py::arg("epsilon_grid") = 0.1, py::arg("tables") = 1,
          py::arg("probe_multiplier") = 1.0);
    m.def("expanded_plan",
          [](std::uint64_t n, double c, double r, double D, double epsilon,
             double epsilon_grid, std::uint32_t tables) {
              const PlannerInput in = planner_input(n, c, r, D, epsilon_grid, tables, 1.0);
              const double eps = epsilon >= 0.0
                                     ? epsilon
                                     : default_expansion_epsilon(
                                           std::max<std::uint64_t>(n, 2), make_plan(in).rho);
              return expanded_plan(in, eps);
          },
          py::arg("n"), py::arg("c") = 2.0, py::arg("r") = 1.0, py::arg("D") = 3.0,
          py::arg("epsilon") = -1.0, py::arg("epsilon_grid") = 0.1, py::arg("tables") = 1,
          "Expanded-variant plan; epsilon < 0 picks the default (1-rho)^2/log2 n.");
    m.def("default_expansion_epsilon", &default_expansion_epsilon, py::arg("n"),
          py::arg("rho"));

    // ---- instance generation ----------------------------------------------
    m.def("gaussian_instance",
          [](std::uint64_t n, std::uint64_t d, double point_scale, double query_distance,
             std::uint64_t seed) {
              RandomInstanceSpec spec;
              spec.n = n;
              spec.d = d;
              spec.point_scale = point_scale;
              spec.query_distance = query_distance;
              Rng rng(seed);
              return array_from_points(gaussian_instance(spec, rng));
          },
          py::arg("n"), py::arg("d"), py::arg("point_scale") = 1.0,
          py::arg("query_distance") = 0.0, py::arg("seed") = 1);
    m.def("sphere_point",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& q,
             double r, std::uint64_t seed) {
              Rng rng(seed);
              const Point s = sphere_point(point_from_array(q), r, rng);
              return py::array_t<double>(static_cast<py::ssize_t>(s.size()), s.data());
          },
          py::arg("q"), py::arg("r"), py::arg("seed") = 1,
          "A uniform point at distance exactly r from q.");
    m.def("planted_query",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& p,
             double dist, std::uint64_t seed) {
              Rng rng(seed);
              const Point s = planted_query(point_from_array(p), dist, rng);
              return py::array_t<double>(static_cast<py::ssize_t>(s.size()), s.data());
          },
          py::arg("p"), py::arg("dist"), py::arg("seed") = 1);
    m.def("distance_grid", &distance_grid, py::arg("r_min"), py::arg("r_max"),
          py::arg("epsilon") = 0.1);

    // ---- index -------------------------------------------------------------
    py::class_<Index>(m, "Index")
        .def_property_readonly("n", [](const Index& i) { return i.n; })
        .def_property_readonly("d", [](const Index& i) { return i.d; })
        .def_property_readonly(
            "variant",
            [](const Index& i) {
                return i.variant == IndexVariant::near_linear ? "near-linear" : "expanded";
            })
        .def_property_readonly("plan", [](const Index& i) { return i.plan; })
        .def_property_readonly("tables",
                               [](const Index& i) { return i.tables.size(); })
        .def_property_readonly("entries", [](const Index& i) { return i.entries(); })
        .def_property_readonly("has_points", [](const Index& i) { return i.has_points; })
        .def_property_readonly("fingerprint_bits",
                               [](const Index& i) { return i.fingerprint_bits; })
        .def("__repr__", [](const Index& i) {
            return "Index(variant=" +
                   std::string(i.variant == IndexVariant::near_linear ? "near-linear"
                                                                      : "expanded") +
                   ", n=" + std::to_string(i.n) + ", d=" + std::to_string(i.d) +
                   ", tables=" + std::to_string(i.tables.size()) +
                   ", entries=" + std::to_string(i.entries()) + ")";
        });

    m.def("build_near_linear",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& pts,
             const SearchPlan& plan, std::uint32_t tables, std::uint64_t seed) {
              return build_near_linear(points_from_array(pts), plan, tables, Rng(seed));
          },
          py::arg("points"), py::arg("plan"), py::arg("tables") = 1, py::arg("seed") = 1);
    m.def("build_expanded",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& pts,
             const SearchPlan& plan, std::uint32_t tables, std::uint64_t seed,
             std::uint64_t memory_cap_bytes) {
              return build_expanded(points_from_array(pts), plan, tables, Rng(seed),
                                    memory_cap_bytes);
          },
          py::arg("points"), py::arg("plan"), py::arg("tables") = 1, py::arg("seed") = 1,
          py::arg("memory_cap_bytes") = std::uint64_t{4} << 30);
    m.def("add_fingerprints",
          [](Index& idx, std::uint32_t bits, std::uint64_t seed) {
              add_fingerprints(idx, bits, Rng(seed));
          },
          py::arg("index"), py::arg("bits"), py::arg("seed") = 1);
    m.def("save_index", &save_index, py::arg("index"), py::arg("path"));
    m.def("load_index", &load_index, py::arg("path"));

    // ---- search ------------------------------------------------------------
    py::class_<QueryReport>(m, "QueryReport")
        .def_readonly("query_id", &QueryReport::query_id)
        .def_property_readonly("found_id",
                               [](const QueryReport& r) { return r.found_id; })
        .def_property_readonly("found_distance",
                               [](const QueryReport& r) { return r.found_distance; })
        .def_readonly("probes_used", &QueryReport::probes_used)
        .def_readonly("points_scanned", &QueryReport::points_scanned)
        .def_readonly("far_points_scanned", &QueryReport::far_points_scanned)
        .def_readonly("success", &QueryReport::success)
        .def_readonly("tables_probed", &QueryReport::tables_probed)
        .def_readonly("max_table_probes", &QueryReport::max_table_probes)
        .def_readonly("max_table_far", &QueryReport::max_table_far)
        .def_readonly("max_bucket_scanned", &QueryReport::max_bucket_scanned)
        .def_readonly("prefiltered", &QueryReport::prefiltered)
        .def_readonly("fallback_used", &QueryReport::fallback_used)
        .def_readonly("grid_rung", &QueryReport::grid_rung)
        .def_readonly("seconds", &QueryReport::seconds)
        .def("__repr__", [](const QueryReport& r) {
            return "QueryReport(success=" + std::string(r.success ? "True" : "False") +
                   ", found_id=" +
                   (r.found_id ? std::to_string(*r.found_id) : std::string("None")) +
                   ", probes_used=" + std::to_string(r.probes_used) + ")";
        });

    m.def("entropy_probe_search",
          [](const Index& idx,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& q,
             double r, double c, const std::string& mode, std::uint64_t seed,
             double probe_multiplier, std::optional<std::uint64_t> probe_budget_override,
             bool brute_force_fallback, bool fingerprint_prefilter,
             double fingerprint_max_fraction) {
              return entropy_probe_search(
                  idx, point_from_array(q), r, c,
                  make_options(mode, seed, probe_multiplier, probe_budget_override,
                               brute_force_fallback, fingerprint_prefilter,
                               fingerprint_max_fraction));
          },
          py::arg("index"), py::arg("q"), py::arg("r"), py::arg("c"),
          py::arg("mode") = "optimize", py::arg("seed") = 0,
          py::arg("probe_multiplier") = 1.0, py::arg("probe_budget_override") = py::none(),
          py::arg("brute_force_fallback") = false, py::arg("fingerprint_prefilter") = false,
          py::arg("fingerprint_max_fraction") = 0.0);
    m.def("expanded_search",
          [](const Index& idx,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& q,
             const std::string& mode, std::uint64_t seed, bool brute_force_fallback) {
              return expanded_search(idx, point_from_array(q),
                                     make_options(mode, seed, 1.0, std::nullopt,
                                                  brute_force_fallback, false, 0.0));
          },
          py::arg("index"), py::arg("q"), py::arg("mode") = "optimize", py::arg("seed") = 0,
          py::arg("brute_force_fallback") = false);
    m.def("brute_force_nn",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& pts,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& q) {
              const PointSet p = points_from_array(pts);
              return brute_force_nn(p, point_from_array(q));
          },
          py::arg("points"), py::arg("q"), "Exact nearest neighbor: (id, distance).");

    // ---- dataset files -----------------------------------------------------
    m.def("save_points",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& pts,
             const std::string& path) { save_points(points_from_array(pts), path); },
          py::arg("points"), py::arg("path"));
    m.def("load_points",
          [](const std::string& path) { return array_from_points(load_points_any(path)); },
          py::arg("path"), "Reads the binary dataset format, or CSV by extension.");

    // ---- verification ------------------------------------------------------
    py::class_<CheckResult>(m, "CheckResult")
        .def_readonly("number", &CheckResult::number)
        .def_readonly("name", &CheckResult::name)
        .def_readonly("measured", &CheckResult::measured)
        .def_readonly("lo", &CheckResult::lo)
        .def_readonly("hi", &CheckResult::hi)
        .def_readonly("pass_", &CheckResult::pass)
        .def_readonly("detail", &CheckResult::detail)
        .def_readonly("seconds", &CheckResult::seconds)
        .def("__repr__", [](const CheckResult& c) {
            return "CheckResult(number=" + std::to_string(c.number) + ", name='" + c.name +
                   "', measured=" + std::to_string(c.measured) +
                   ", pass=" + (c.pass ? std::string("True") : std::string("False")) + ")";
        });

    m.def("verify_math", &verify_math, py::arg("seed") = 7);
    m.def("verify_hash", &verify_hash, py::arg("seed") = 7);
    m.def("verify_endtoend", &verify_endtoend, py::arg("seed") = 7);
    m.def("verify_all", &verify_all, py::arg("seed") = 7);
    m.def("run_check", &run_check, py::arg("number"), py::arg("seed") = 7);

    m.attr("__version__") = "0.1.0";
}
