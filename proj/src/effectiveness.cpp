#include "optbench/effectiveness.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "optbench/rng.hpp"

namespace optbench {

PerformanceFactor performance_factor(double chosen_runtime, const std::vector<double>& sample,
                                     double precision) {
    if (sample.empty()) throw std::invalid_argument("performance_factor: empty sample");
    std::int64_t at_least = 0;
    for (double r : sample) at_least += r >= chosen_runtime;
    PerformanceFactor pf;
    pf.estimate = static_cast<double>(at_least) / static_cast<double>(sample.size());
    pf.low = std::max(0.0, pf.estimate - precision);
    pf.high = std::min(1.0, pf.estimate + precision);
    return pf;
}

double optimality_frequency(const std::vector<QueryEffectivenessResult>& results) {
    if (results.empty()) throw std::invalid_argument("optimality_frequency: empty result list");
    std::int64_t optimal = 0;
    for (const auto& r : results) optimal += r.relative_optimal;
    return static_cast<double>(optimal) / static_cast<double>(results.size());
}

double EffectivenessReport::threshold_share(double tau) const {
    if (per_query.empty()) return 0;
    std::int64_t above = 0;
    for (const auto& r : per_query) above += (r.pf_estimate - r.precision) > tau;
    return static_cast<double>(above) / static_cast<double>(per_query.size());
}

EffectivenessReport build_effectiveness_report(std::vector<QueryEffectivenessResult> results) {
    EffectivenessReport report;
    report.optimality_frequency = optimality_frequency(results);
    double sum = 0;
    std::int64_t suboptimal = 0;
    for (const auto& r : results) {
        if (r.relative_optimal) continue;
        sum += r.pf_estimate;
        ++suboptimal;
    }
    if (suboptimal > 0) report.avg_pf_suboptimal = sum / static_cast<double>(suboptimal);
    report.per_query = std::move(results);
    return report;
}

MissClassification classify_misses(const std::vector<PhysicalPlan>& better_plans,
                                   const std::set<std::string>& considered_fingerprints,
                                   bool considered_lower_bound) {
    MissClassification m;
    m.better_total = static_cast<std::int64_t>(better_plans.size());
    m.considered_lower_bound = considered_lower_bound;
    for (const auto& p : better_plans)
        considered_fingerprints.count(fingerprint(p)) ? ++m.costed_but_rejected
                                                      : ++m.never_enumerated;
    return m;
}

QueryEffectivenessResult benchmark_query(BackendAdapter& backend, const JoinGraph& g,
                                         const Catalog& cat, const BenchmarkOptions& options,
                                         TraceRecorder* trace) {
    backend.reset_cache();
    ChosenPlan chosen = backend.run_chosen(g);
    if (trace) {
        trace->begin_query(g.query_id, chosen.fingerprint, chosen.runtime);
        if (auto probe = backend.probe(g.query_id)) trace->record_probe(g.query_id, *probe);
    }

    PlanSample sample = sample_plans(g, options.sampling, backend.capabilities(), cat, options.seed);

    double timeout = std::numeric_limits<double>::infinity();
    if (options.timeout_factor > 0)
        timeout = std::max(1.0, options.timeout_factor) * chosen.runtime;

    std::vector<double> runtimes;
    runtimes.reserve(sample.plans.size());
    for (const auto& plan : sample.plans) {
        backend.reset_cache();
        double runtime = backend.run_plan(g, plan);
        if (trace) trace->record_plan(g.query_id, fingerprint(plan), runtime);
        runtimes.push_back(runtime > timeout ? std::numeric_limits<double>::infinity() : runtime);
    }

    PerformanceFactor pf = performance_factor(chosen.runtime, runtimes, options.sampling.precision);

    QueryEffectivenessResult result;
    result.query_id = g.query_id;
    result.chosen_runtime = chosen.runtime;
    result.chosen_fingerprint = chosen.fingerprint;
    result.sample_runtimes = std::move(runtimes);
    result.pf_estimate = pf.estimate;
    result.pf_low = pf.low;
    result.pf_high = pf.high;
    result.relative_optimal = pf.estimate == 1.0;
    result.precision = options.sampling.precision;
    result.seed = options.seed;
    result.sample_size = static_cast<std::int64_t>(sample.plans.size());
    return result;
}

EffectivenessReport benchmark_suite(BackendAdapter& backend, const std::vector<JoinGraph>& queries,
                                    const Catalog& cat, const BenchmarkOptions& options,
                                    TraceRecorder* trace) {
    if (queries.empty()) throw std::invalid_argument("benchmark_suite: empty query suite");
    std::vector<QueryEffectivenessResult> results;
    results.reserve(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        BenchmarkOptions per_query = options;
        per_query.seed = derive_seed(options.seed, i);
        results.push_back(benchmark_query(backend, queries[i], cat, per_query, trace));
    }
    return build_effectiveness_report(std::move(results));
}

}  // namespace optbench
