#include "optbench/efficiency.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace optbench {

std::vector<std::string> validate_counters(const EfficiencyCounters& c) {
    std::vector<std::string> out;
    if (!c.logical_plans && !c.join_orderings && !c.physical_plans && !c.physical_join_plans)
        out.push_back("no efficiency counter present");
    for (auto [v, name] : {std::pair{c.logical_plans, "logical_plans"},
                           std::pair{c.join_orderings, "join_orderings"},
                           std::pair{c.physical_plans, "physical_plans"},
                           std::pair{c.physical_join_plans, "physical_join_plans"}})
        if (v && *v < 0) out.push_back(std::string(name) + " is negative");
    if (c.physical_plans && c.physical_join_plans && *c.physical_join_plans > *c.physical_plans)
        out.push_back("physical_join_plans exceeds physical_plans");
    if (c.logical_plans && c.join_orderings && *c.join_orderings > *c.logical_plans)
        out.push_back("join_orderings exceeds logical_plans");
    return out;
}

RegressionFit linear_regression(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("linear_regression: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("linear_regression: need at least 2 points");
    auto n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("linear_regression: x is constant");

    RegressionFit fit;
    fit.n_points = static_cast<std::int64_t>(x.size());
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy == 0) {
        fit.degenerate = true;
        fit.r_squared = 0;
        return fit;
    }
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r_squared = 1.0 - ss_res / syy;
    if (fit.r_squared < 0) fit.r_squared = 0;
    if (fit.r_squared > 1) fit.r_squared = 1;
    return fit;
}

std::vector<PhysicalPlan> strip_non_join(const std::vector<PhysicalPlan>& plans) {
    std::vector<PhysicalPlan> out;
    for (const auto& p : plans)
        if (!p.nodes.empty() && !p.nodes.front().is_leaf()) out.push_back(p);
    return out;
}

std::int64_t derive_logical(const std::vector<PhysicalPlan>& plans) {
    std::set<std::string> distinct;
    for (const auto& p : plans) distinct.insert(logical_fingerprint(p));
    return static_cast<std::int64_t>(distinct.size());
}

std::int64_t derive_join_orderings(const std::vector<PhysicalPlan>& plans) {
    std::set<std::string> distinct;
    for (const auto& p : plans) distinct.insert(ordering_fingerprint(p));
    return static_cast<std::int64_t>(distinct.size());
}

EfficiencyReport efficiency_report(const std::vector<QueryEfficiency>& results) {
    if (results.empty()) throw std::invalid_argument("efficiency_report: empty suite");
    for (const auto& q : results) {
        auto violations = validate_counters(q.counters);
        if (!violations.empty())
            throw std::invalid_argument("query '" + q.query_id + "': " + violations.front());
    }

    EfficiencyReport report;
    report.per_query = results;
    for (const auto& q : results) report.lower_bound |= q.counters.lower_bound;

    auto pick = [](const EfficiencyCounters& c,
                   const std::string& name) -> const std::optional<std::int64_t>& {
        if (name == "lp") return c.logical_plans;
        if (name == "jo") return c.join_orderings;
        if (name == "pp") return c.physical_plans;
        return c.physical_join_plans;
    };

    for (const char* name : {"lp", "jo", "pp", "pj"}) {
        CounterColumn col;
        col.name = name;
        std::vector<double> xs, ys;
        double sum = 0;
        for (const auto& q : results) {
            const auto& v = pick(q.counters, name);
            if (!v) continue;
            ++col.present;
            sum += static_cast<double>(*v);
            xs.push_back(static_cast<double>(*v));
            ys.push_back(q.counters.optimization_time);
        }
        if (col.present > 0) col.mean = sum / static_cast<double>(col.present);
        if (xs.size() < 2) {
            if (col.present > 0) col.fit_notice = "regression skipped: fewer than 2 points";
        } else {
            bool constant = true;
            for (double v : xs) constant &= v == xs.front();
            if (constant)
                col.fit_notice = "regression skipped: counter is constant";
            else
                col.fit = linear_regression(xs, ys);
        }
        report.columns.push_back(std::move(col));
    }
    return report;
}

}  // namespace optbench
