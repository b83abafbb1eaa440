#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optbench/core.hpp"

namespace optbench {

/// The four plan-space counters correlated with optimization time, plus
/// the optimization-time measurement itself. A backend exposes whatever
/// subset it can; at least one counter must be present.
struct EfficiencyCounters {
    std::optional<std::int64_t> logical_plans;        // #LP
    std::optional<std::int64_t> join_orderings;       // #JO
    std::optional<std::int64_t> physical_plans;       // #PP
    std::optional<std::int64_t> physical_join_plans;  // #PJ
    double optimization_time = 0;  // deterministic work units for the toy engine,
                                   // wall time for external backends
    /// Set when the probe reports only a subset of what the optimizer
    /// actually processed (pruned plans unreported).
    bool lower_bound = false;
};

/// Empty = valid. Checks presence and the #PJ <= #PP, #JO <= #LP order.
std::vector<std::string> validate_counters(const EfficiencyCounters& c);

/// Ordinary least squares y = slope * x + intercept.
struct RegressionFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
    std::int64_t n_points = 0;
    /// True when y is constant (SS_tot = 0); r_squared is reported as 0.
    bool degenerate = false;
};

/// Throws std::invalid_argument on length mismatch, fewer than two
/// points, or constant x.
RegressionFit linear_regression(const std::vector<double>& x, const std::vector<double>& y);

/// Keeps only plans whose root operator is a join.
std::vector<PhysicalPlan> strip_non_join(const std::vector<PhysicalPlan>& plans);

/// Distinct plans after erasing join algorithms and access methods
/// (tree shape, leaf tables and predicate placement retained).
std::int64_t derive_logical(const std::vector<PhysicalPlan>& plans);

/// Distinct (tree shape, leaf permutation) pairs after erasing every
/// operator annotation.
std::int64_t derive_join_orderings(const std::vector<PhysicalPlan>& plans);

/// One benchmarked query's counters.
struct QueryEfficiency {
    std::string query_id;
    EfficiencyCounters counters;
};

struct CounterColumn {
    std::string name;  // lp / jo / pp / pj
    std::int64_t present = 0;
    std::optional<double> mean;  // absent when no query exposes it
    std::optional<RegressionFit> fit;  // optimization_time vs counter; absent when
                                       // fewer than 2 points or constant x
    std::optional<std::string> fit_notice;
};

/// Table-shaped summary: per-counter means over the queries exposing
/// them plus an OLS fit of optimization time against each counter.
struct EfficiencyReport {
    std::vector<QueryEfficiency> per_query;
    std::vector<CounterColumn> columns;  // always lp, jo, pp, pj in order
    bool lower_bound = false;            // any query flagged
};

/// Throws std::invalid_argument on an empty suite or a query with no
/// counter at all.
EfficiencyReport efficiency_report(const std::vector<QueryEfficiency>& results);

}  // namespace optbench
