#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "optbench/core.hpp"
#include "optbench/dialects.hpp"
#include "optbench/efficiency.hpp"
#include "optbench/toy_engine.hpp"

namespace optbench {

enum class Isolation { SequentialOnly, ParallelSafe };

/// Static description of a backend adapter.
struct AdapterDescriptor {
    std::string name;
    std::string dialect;  // hint dialect name; empty for plan-native backends
    BackendCapabilities capabilities;
    std::set<std::string> probe_support;  // subset of {lp, jo, pp, pj}
    Isolation isolation = Isolation::SequentialOnly;
    bool effectiveness_only = false;  // no probe: efficiency reporting disabled
    bool has_cache_reset = false;     // false = documented no-op
};

std::vector<std::string> validate_descriptor(const AdapterDescriptor& d);

/// What the backend's optimizer picked for a query. Plan-native
/// backends return the plan itself; replayed backends know only its
/// fingerprint.
struct ChosenPlan {
    std::optional<PhysicalPlan> plan;
    std::string fingerprint;
    double runtime = 0;
};

/// Efficiency probe output for one optimized query.
struct ProbeResult {
    EfficiencyCounters counters;
    std::vector<std::string> considered;  // fingerprints of plans the optimizer costed
    bool considered_lower_bound = false;
};

/// The contract every benchmarked backend implements. run_* runtimes
/// are work units for the toy engine and recorded/wall-clock values for
/// replay and live adapters; the benchmark never mixes units across
/// backends.
class BackendAdapter {
public:
    virtual ~BackendAdapter() = default;

    virtual const AdapterDescriptor& descriptor() const = 0;
    virtual BackendCapabilities capabilities() const = 0;
    /// Optimize and execute the backend's own choice for the query.
    virtual ChosenPlan run_chosen(const JoinGraph& g) = 0;
    /// Execute one forced plan.
    virtual double run_plan(const JoinGraph& g, const PhysicalPlan& p) = 0;
    virtual void reset_cache() = 0;
    /// Counters for the most recent run_chosen of this query, if the
    /// backend exposes any.
    virtual std::optional<ProbeResult> probe(const std::string& query_id) const = 0;
};

// ---------------------------------------------------------------------------
// Toy adapter
// ---------------------------------------------------------------------------

struct ToyAdapterConfig {
    Strategy strategy = Strategy::Exhaustive;
    std::string cost_model = "truthful";  // truthful | noisy
    double noise_sigma = 1.0;
    std::uint64_t noise_seed = 0;
    std::uint64_t optimizer_seed = 0;
    BackendCapabilities capabilities = default_toy_capabilities();
    bool record_considered = true;
    int enumeration_bound = kDefaultEnumerationBound;
};

class ToyAdapter final : public BackendAdapter {
public:
    ToyAdapter(std::shared_ptr<const ToyEngine> engine, ToyAdapterConfig config);

    const AdapterDescriptor& descriptor() const override { return descriptor_; }
    BackendCapabilities capabilities() const override { return config_.capabilities; }
    ChosenPlan run_chosen(const JoinGraph& g) override;
    double run_plan(const JoinGraph& g, const PhysicalPlan& p) override;
    void reset_cache() override {}  // stateless execution
    std::optional<ProbeResult> probe(const std::string& query_id) const override;

    const ToyEngine& engine() const { return *engine_; }

private:
    std::shared_ptr<const ToyEngine> engine_;
    ToyAdapterConfig config_;
    std::unique_ptr<CostModel> cost_model_;
    AdapterDescriptor descriptor_;
    std::map<std::string, ProbeResult> probes_;
};

// ---------------------------------------------------------------------------
// Replay adapter
// ---------------------------------------------------------------------------

enum class UnknownPlanPolicy { Error, TimeoutSentinel };

/// Recorded outcome of one query against some backend: the chosen
/// plan's fingerprint and runtime, runtimes of every forced plan, and
/// the probe output, all keyed for offline replay.
struct ReplayRecord {
    std::string query_id;
    std::string chosen_fingerprint;
    double chosen_runtime = 0;
    std::map<std::string, double> runtimes;  // fingerprint -> runtime
    std::optional<EfficiencyCounters> counters;
    std::vector<std::string> considered;
    bool considered_lower_bound = false;
};

std::vector<std::string> validate_replay_record(const ReplayRecord& r);

class ReplayAdapter final : public BackendAdapter {
public:
    ReplayAdapter(AdapterDescriptor descriptor, std::vector<ReplayRecord> records,
                  UnknownPlanPolicy policy);

    const AdapterDescriptor& descriptor() const override { return descriptor_; }
    BackendCapabilities capabilities() const override { return descriptor_.capabilities; }
    ChosenPlan run_chosen(const JoinGraph& g) override;
    double run_plan(const JoinGraph& g, const PhysicalPlan& p) override;
    void reset_cache() override {}
    std::optional<ProbeResult> probe(const std::string& query_id) const override;

private:
    const ReplayRecord& record_for(const std::string& query_id) const;

    AdapterDescriptor descriptor_;
    std::map<std::string, ReplayRecord> records_;
    UnknownPlanPolicy policy_;
};

/// Accumulates replay records while a benchmark runs, so any adapter's
/// session can be exported and replayed offline.
class TraceRecorder {
public:
    void begin_query(const std::string& query_id, const std::string& chosen_fingerprint,
                     double chosen_runtime);
    void record_plan(const std::string& query_id, const std::string& fingerprint, double runtime);
    void record_probe(const std::string& query_id, const ProbeResult& probe);

    const std::vector<ReplayRecord>& records() const { return records_; }

private:
    ReplayRecord& current(const std::string& query_id);

    std::vector<ReplayRecord> records_;
};

// ---------------------------------------------------------------------------
// Conformance
// ---------------------------------------------------------------------------

struct ConformanceCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ConformanceReport {
    std::vector<ConformanceCheck> checks;

    bool all_passed() const;
};

/// Probes the backend requirements: non-empty capabilities, a valid
/// dialect (when one is named), deterministic probe counters on a fixed
/// query, and an invocable cache reset. Never throws; failures land in
/// the report.
ConformanceReport adapter_conformance(BackendAdapter& adapter,
                                      const HintDialect* dialect = nullptr,
                                      const JoinGraph* probe_query = nullptr);

}  // namespace optbench
