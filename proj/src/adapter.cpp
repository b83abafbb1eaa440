#include "optbench/adapter.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "optbench/error.hpp"

namespace optbench {

std::vector<std::string> validate_descriptor(const AdapterDescriptor& d) {
    std::vector<std::string> out;
    if (d.name.empty()) out.push_back("adapter name is empty");
    for (const auto& v : validate_capabilities(d.capabilities)) out.push_back(v);
    if (d.probe_support.empty() && !d.effectiveness_only)
        out.push_back("no probe support and not flagged effectiveness-only");
    for (const auto& c : d.probe_support)
        if (c != "lp" && c != "jo" && c != "pp" && c != "pj")
            out.push_back("unknown probe counter '" + c + "'");
    return out;
}

// ---------------------------------------------------------------------------
// ToyAdapter
// ---------------------------------------------------------------------------

ToyAdapter::ToyAdapter(std::shared_ptr<const ToyEngine> engine, ToyAdapterConfig config)
    : engine_(std::move(engine)), config_(std::move(config)) {
    if (config_.cost_model == "truthful")
        cost_model_ = std::make_unique<TruthfulCostModel>();
    else if (config_.cost_model == "noisy")
        cost_model_ = std::make_unique<NoisyCostModel>(config_.noise_seed, config_.noise_sigma);
    else
        throw ConfigurationError("unknown cost model '" + config_.cost_model + "'");

    descriptor_.name = "toy-" + strategy_name(config_.strategy) + "-" + cost_model_->name();
    descriptor_.capabilities = config_.capabilities;
    descriptor_.probe_support = {"lp", "jo", "pp", "pj"};
    descriptor_.isolation = Isolation::ParallelSafe;
    descriptor_.has_cache_reset = false;

    auto violations = validate_descriptor(descriptor_);
    if (!violations.empty()) throw ConfigurationError("toy adapter: " + violations.front());
}

ChosenPlan ToyAdapter::run_chosen(const JoinGraph& g) {
    OptimizeOptions options;
    options.seed = config_.optimizer_seed;
    options.record_considered = config_.record_considered;
    options.enumeration_bound = config_.enumeration_bound;
    OptimizeResult r =
        optimize(config_.strategy, g, *engine_, config_.capabilities, *cost_model_, options);

    ProbeResult probe;
    probe.counters = r.counters;
    probe.considered = std::move(r.considered);
    probe.considered_lower_bound = r.considered_lower_bound;
    probes_[g.query_id] = std::move(probe);

    ChosenPlan chosen;
    chosen.fingerprint = fingerprint(r.plan);
    chosen.runtime = static_cast<double>(engine_->execute(r.plan, g).work);
    chosen.plan = std::move(r.plan);
    return chosen;
}

double ToyAdapter::run_plan(const JoinGraph& g, const PhysicalPlan& p) {
    return static_cast<double>(engine_->execute(p, g).work);
}

std::optional<ProbeResult> ToyAdapter::probe(const std::string& query_id) const {
    auto it = probes_.find(query_id);
    if (it == probes_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// ReplayAdapter
// ---------------------------------------------------------------------------

std::vector<std::string> validate_replay_record(const ReplayRecord& r) {
    std::vector<std::string> out;
    if (r.query_id.empty()) out.push_back("record without query_id");
    if (r.chosen_fingerprint.empty()) out.push_back("record without chosen fingerprint");
    if (!r.runtimes.count(r.chosen_fingerprint))
        out.push_back("chosen fingerprint of '" + r.query_id + "' missing from the runtime map");
    if (r.counters) {
        for (const auto& v : validate_counters(*r.counters))
            out.push_back("'" + r.query_id + "': " + v);
    }
    return out;
}

ReplayAdapter::ReplayAdapter(AdapterDescriptor descriptor, std::vector<ReplayRecord> records,
                             UnknownPlanPolicy policy)
    : descriptor_(std::move(descriptor)), policy_(policy) {
    auto violations = validate_descriptor(descriptor_);
    if (!violations.empty()) throw ConfigurationError("replay adapter: " + violations.front());
    for (auto& r : records) {
        auto record_violations = validate_replay_record(r);
        if (!record_violations.empty())
            throw ConfigurationError("replay trace: " + record_violations.front());
        std::string id = r.query_id;
        if (!records_.emplace(std::move(id), std::move(r)).second)
            throw ConfigurationError("replay trace: duplicate query_id");
    }
}

const ReplayRecord& ReplayAdapter::record_for(const std::string& query_id) const {
    auto it = records_.find(query_id);
    if (it == records_.end())
        throw ConfigurationError("replay trace has no record for query '" + query_id + "'");
    return it->second;
}

ChosenPlan ReplayAdapter::run_chosen(const JoinGraph& g) {
    const ReplayRecord& r = record_for(g.query_id);
    ChosenPlan chosen;
    chosen.fingerprint = r.chosen_fingerprint;
    chosen.runtime = r.chosen_runtime;
    return chosen;
}

double ReplayAdapter::run_plan(const JoinGraph& g, const PhysicalPlan& p) {
    const ReplayRecord& r = record_for(g.query_id);
    auto it = r.runtimes.find(fingerprint(p));
    if (it != r.runtimes.end()) return it->second;
    if (policy_ == UnknownPlanPolicy::TimeoutSentinel)
        return std::numeric_limits<double>::infinity();
    throw ExecutionError("replay trace of query '" + g.query_id +
                         "' has no runtime for plan " + fingerprint(p));
}

std::optional<ProbeResult> ReplayAdapter::probe(const std::string& query_id) const {
    auto it = records_.find(query_id);
    if (it == records_.end() || !it->second.counters) return std::nullopt;
    ProbeResult probe;
    probe.counters = *it->second.counters;
    probe.considered = it->second.considered;
    probe.considered_lower_bound = it->second.considered_lower_bound;
    return probe;
}

// ---------------------------------------------------------------------------
// TraceRecorder
// ---------------------------------------------------------------------------

ReplayRecord& TraceRecorder::current(const std::string& query_id) {
    for (auto& r : records_)
        if (r.query_id == query_id) return r;
    throw std::logic_error("trace recorder: query '" + query_id + "' not begun");
}

void TraceRecorder::begin_query(const std::string& query_id, const std::string& chosen_fingerprint,
                                double chosen_runtime) {
    ReplayRecord r;
    r.query_id = query_id;
    r.chosen_fingerprint = chosen_fingerprint;
    r.chosen_runtime = chosen_runtime;
    r.runtimes[chosen_fingerprint] = chosen_runtime;
    records_.push_back(std::move(r));
}

void TraceRecorder::record_plan(const std::string& query_id, const std::string& fingerprint,
                                double runtime) {
    current(query_id).runtimes[fingerprint] = runtime;
}

void TraceRecorder::record_probe(const std::string& query_id, const ProbeResult& probe) {
    ReplayRecord& r = current(query_id);
    r.counters = probe.counters;
    r.considered = probe.considered;
    r.considered_lower_bound = probe.considered_lower_bound;
}

// ---------------------------------------------------------------------------
// Conformance
// ---------------------------------------------------------------------------

bool ConformanceReport::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

ConformanceReport adapter_conformance(BackendAdapter& adapter, const HintDialect* dialect,
                                      const JoinGraph* probe_query) {
    ConformanceReport report;
    auto add = [&](const std::string& name, bool passed, std::string detail = "") {
        report.checks.push_back({name, passed, std::move(detail)});
    };

    auto caps_violations = validate_capabilities(adapter.capabilities());
    add("capabilities", caps_violations.empty(),
        caps_violations.empty() ? "" : caps_violations.front());

    auto descriptor_violations = validate_descriptor(adapter.descriptor());
    add("descriptor", descriptor_violations.empty(),
        descriptor_violations.empty() ? "" : descriptor_violations.front());

    if (dialect) {
        auto dialect_violations = validate_dialect(*dialect);
        add("dialect", dialect_violations.empty(),
            dialect_violations.empty() ? "" : dialect_violations.front());
    } else if (!adapter.descriptor().dialect.empty()) {
        add("dialect", false, "descriptor names a dialect but none was supplied for validation");
    }

    try {
        adapter.reset_cache();
        add("cache_reset", true);
    } catch (const std::exception& e) {
        add("cache_reset", false, e.what());
    }

    if (probe_query) {
        try {
            ChosenPlan first = adapter.run_chosen(*probe_query);
            auto probe1 = adapter.probe(probe_query->query_id);
            ChosenPlan second = adapter.run_chosen(*probe_query);
            auto probe2 = adapter.probe(probe_query->query_id);
            bool deterministic = first.fingerprint == second.fingerprint &&
                                 first.runtime == second.runtime;
            if (probe1.has_value() != probe2.has_value()) deterministic = false;
            if (probe1 && probe2) {
                deterministic &= probe1->counters.logical_plans == probe2->counters.logical_plans &&
                                 probe1->counters.join_orderings == probe2->counters.join_orderings &&
                                 probe1->counters.physical_plans == probe2->counters.physical_plans &&
                                 probe1->counters.physical_join_plans ==
                                     probe2->counters.physical_join_plans &&
                                 probe1->counters.optimization_time ==
                                     probe2->counters.optimization_time;
            }
            add("probe_determinism", deterministic,
                deterministic ? "" : "repeated optimization disagreed");
            bool has_probe = probe1.has_value() || adapter.descriptor().effectiveness_only;
            add("probe_presence", has_probe,
                has_probe ? "" : "no probe output and not effectiveness-only");
        } catch (const std::exception& e) {
            add("probe_determinism", false, e.what());
        }
    }
    return report;
}

}  // namespace optbench
