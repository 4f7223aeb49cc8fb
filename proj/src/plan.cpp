#include "elsh/plan.hpp"

#include <algorithm>
#include <cmath>

#include "elsh/math.hpp"
#include "elsh/sampling.hpp"

namespace elsh {

namespace {

void validate(const PlannerInput& in) {
    if (in.n < 1) throw std::invalid_argument("planner: n must be >= 1");
    if (!(in.c > 1.0)) throw std::invalid_argument("planner: c must be > 1");
    if (!(in.r > 0.0)) throw std::invalid_argument("planner: r must be > 0");
    if (!(in.D > 0.0)) throw std::invalid_argument("planner: D must be > 0");
    if (!(in.epsilon_grid > 0.0) || !(in.epsilon_grid < 1.0))
        throw std::invalid_argument("planner: epsilon_grid must be in (0,1)");
    if (in.tables < 1) throw std::invalid_argument("planner: tables must be >= 1");
    if (in.probe_multiplier < 0.0)
        throw std::invalid_argument("planner: probe_multiplier must be >= 0");
}

SearchPlan base_plan(const PlannerInput& in) {
    SearchPlan plan;
    plan.g = far_collision_prob(in.D);
    plan.M = interval_hash_entropy(in.c, in.D, 1e-9).value;
    plan.rho = std::min(1.0, plan.M / (-std::log2(plan.g)));
    plan.c = in.c;
    plan.r = in.r;
    plan.D = in.D;
    plan.width = in.D * in.c * in.r;
    plan.tables = in.tables;
    plan.distance_grid = distance_grid(in.r, in.c * in.r, in.epsilon_grid);
    return plan;
}

}  // namespace

SearchPlan make_plan(const PlannerInput& in) {
    validate(in);
    SearchPlan plan = base_plan(in);

    const double log2n = std::log2(static_cast<double>(in.n));
    const double log2inv_g = -std::log2(plan.g);
    plan.k = (in.n == 1)
                 ? 1
                 : static_cast<std::uint32_t>(std::max(1.0, std::ceil(log2n / log2inv_g)));

    double raw = 1.0;
    if (in.n > 1) {
        const double exponent = plan.k * plan.M * (1.0 + 1.0 / log2n);
        raw = std::ceil(std::pow(2.0, exponent) * in.probe_multiplier);
    }
    const auto nd = static_cast<double>(in.n);
    if (!std::isfinite(raw) || raw > nd) {
        plan.probe_budget = in.n;
        plan.budget_clamped = true;
    } else {
        plan.probe_budget = static_cast<std::uint64_t>(std::max(1.0, raw));
    }
    plan.far_cap = std::max<std::uint64_t>(1, 2 * plan.probe_budget);
    return plan;
}

SearchPlan expanded_plan(const PlannerInput& in, double epsilon) {
    validate(in);
    if (epsilon < 0.0) throw std::invalid_argument("expanded_plan: epsilon must be >= 0");
    SearchPlan plan = base_plan(in);

    const double log2n = std::log2(static_cast<double>(std::max<std::uint64_t>(in.n, 2)));
    const double log2inv_g = -std::log2(plan.g);
    const double denom = log2inv_g - plan.M * (1.0 + epsilon);
    if (denom <= 0.0) {
        throw PlanInfeasible(
            "expanded index infeasible: log2(1/g) = " + std::to_string(log2inv_g) +
            " <= M*(1+epsilon) = " + std::to_string(plan.M * (1.0 + epsilon)) +
            " (rho*(1+epsilon) >= 1)");
    }
    plan.epsilon = epsilon;
    plan.k = static_cast<std::uint32_t>(std::max(1.0, std::ceil(log2n / denom)));

    const double rep = std::ceil(std::pow(2.0, plan.k * plan.M * (1.0 + epsilon)));
    if (!std::isfinite(rep) || rep > 1e15)
        throw PlanInfeasible("expanded index infeasible: replication count overflows");
    plan.replication = static_cast<std::uint64_t>(std::max(1.0, rep));
    plan.probe_budget = in.tables;  // one lookup (the query's own key) per table
    plan.bucket_scan_cap = 3;
    plan.far_cap = std::max<std::uint64_t>(1, 3ull * in.tables);
    return plan;
}

double default_expansion_epsilon(std::uint64_t n, double rho_value) {
    if (n < 2) throw std::invalid_argument("default_expansion_epsilon: n must be >= 2");
    const double one_minus = 1.0 - rho_value;
    return one_minus * one_minus / std::log2(static_cast<double>(n));
}

}  // namespace elsh
