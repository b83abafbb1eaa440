#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "optbench/adapter.hpp"
#include "optbench/core.hpp"
#include "optbench/plan_sampler.hpp"

namespace optbench {

/// Point estimate and fixed-margin interval of the performance factor.
struct PerformanceFactor {
    double estimate = 0;
    double low = 0;   // clamped to [0, 1]
    double high = 0;  // clamped to [0, 1]
};

/// Proportion of sampled runtimes >= the chosen plan's runtime; ties
/// count toward the factor. The interval is the +-precision Wald margin
/// the sample size was derived for, clamped to [0, 1]. Throws
/// std::invalid_argument on an empty sample.
PerformanceFactor performance_factor(double chosen_runtime, const std::vector<double>& sample,
                                     double precision);

struct QueryEffectivenessResult {
    std::string query_id;
    double chosen_runtime = 0;
    std::string chosen_fingerprint;
    std::vector<double> sample_runtimes;  // timeout sentinel applied
    double pf_estimate = 0;
    double pf_low = 0;
    double pf_high = 0;
    bool relative_optimal = false;  // pf_estimate == 1
    double precision = 0;           // e behind the interval
    std::uint64_t seed = 0;
    std::int64_t sample_size = 0;
};

/// Fraction of queries with PF estimate exactly 1. A sample-based
/// estimate can only miss better plans, so this is an upper bound on
/// the true optimality frequency. Throws on an empty list.
double optimality_frequency(const std::vector<QueryEffectivenessResult>& results);

struct EffectivenessReport {
    std::vector<QueryEffectivenessResult> per_query;
    double optimality_frequency = 0;
    /// Mean PF over the queries that did not reach PF 1; absent when
    /// every query did.
    std::optional<double> avg_pf_suboptimal;

    /// Fraction of queries whose pf_estimate - precision exceeds tau
    /// (the "chosen plan beats tau of the space at full confidence"
    /// share).
    double threshold_share(double tau) const;
};

EffectivenessReport build_effectiveness_report(std::vector<QueryEffectivenessResult> results);

/// Split of the better-than-chosen plans into cost-model misses (the
/// optimizer costed them and still rejected them) and enumeration
/// misses (it never even considered them).
struct MissClassification {
    std::int64_t better_total = 0;
    std::int64_t costed_but_rejected = 0;
    std::int64_t never_enumerated = 0;
    /// Set when the considered set is only a lower bound, making
    /// costed_but_rejected a lower bound too.
    bool considered_lower_bound = false;
};

MissClassification classify_misses(const std::vector<PhysicalPlan>& better_plans,
                                   const std::set<std::string>& considered_fingerprints,
                                   bool considered_lower_bound = false);

// ---------------------------------------------------------------------------
// Workflow
// ---------------------------------------------------------------------------

struct BenchmarkOptions {
    SamplingConfig sampling;
    /// Per-plan timeout as a multiple of the chosen plan's runtime;
    /// values below 1 are clamped (a tighter cap would bias PF), <= 0
    /// disables the cap. Runtimes over the cap become +infinity.
    double timeout_factor = 10.0;
    std::uint64_t seed = 0;
};

/// The per-query effectiveness workflow: run the backend's chosen plan,
/// draw the plan sample, execute every sampled plan with cache resets
/// in between, and compute the performance factor. Deterministic given
/// the seed.
QueryEffectivenessResult benchmark_query(BackendAdapter& backend, const JoinGraph& g,
                                         const Catalog& cat, const BenchmarkOptions& options,
                                         TraceRecorder* trace = nullptr);

/// Whole-suite run; query i uses derive_seed(options.seed, i).
EffectivenessReport benchmark_suite(BackendAdapter& backend, const std::vector<JoinGraph>& queries,
                                    const Catalog& cat, const BenchmarkOptions& options,
                                    TraceRecorder* trace = nullptr);

}  // namespace optbench
