#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "optbench/core.hpp"
#include "optbench/efficiency.hpp"
#include "optbench/rng.hpp"
#include "optbench/tree_sampler.hpp"

namespace optbench {

// ---------------------------------------------------------------------------
// Data
// ---------------------------------------------------------------------------

struct Relation {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;
};

/// Base tables keyed by catalog table name.
using Dataset = std::map<std::string, Relation>;

/// Join algorithm tokens the toy engine executes.
inline const std::string kNestedLoop = "NestedLoop";
inline const std::string kHashJoin = "Hash";
inline const std::string kMergeJoin = "Merge";

BackendCapabilities default_toy_capabilities();

/// Order-independent summary of an output multiset. Column order and
/// row order do not matter: relationally equivalent plans for the same
/// query produce equal digests.
struct Digest {
    std::uint64_t sum = 0;
    std::uint64_t mix = 0;
    std::int64_t rows = 0;

    bool operator==(const Digest&) const = default;
};

struct ExecutionResult {
    Digest digest;
    std::int64_t work = 0;                 // total work units
    std::vector<std::int64_t> node_work;   // per plan node, same indexing
    std::int64_t output_rows = 0;
};

// Work-unit accounting, shared by execution and the closed-form plan
// evaluator (the two must agree exactly; runtimes stay machine independent):
//   sequential scan        rows(T)
//   index scan, eq filter  1 + rows matching the equality
//   index scan otherwise   1 + rows(T)
//   nested loop / cross    |L| * |R|
//   hash join              |L| + 2|R| + matches   (build right, probe left)
//   merge join             sort(|L|) + sort(|R|) + |L| + |R| + matches,
//                          sort(n) = n * (floor(log2 n) + 1)
std::int64_t sort_work(std::int64_t n);
std::int64_t join_work(const std::string& algorithm, std::int64_t left_rows,
                       std::int64_t right_rows, std::int64_t matches);

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

/// In-memory deterministic executor over an immutable dataset. Hash
/// indexes for every catalog index are built up front. Stateless across
/// executions, so cache resets are no-ops.
class ToyEngine {
public:
    ToyEngine(Catalog catalog, Dataset data);

    const Catalog& catalog() const { return catalog_; }
    const Dataset& data() const { return data_; }

    /// Executes a physical plan. Throws ExecutionError on a missing
    /// table or index; the plan is otherwise assumed validated.
    ExecutionResult execute(const PhysicalPlan& p, const JoinGraph& g) const;

    /// Rows of `table` whose `column` equals `v`, via the prebuilt index.
    const std::vector<std::size_t>* index_lookup(const std::string& table,
                                                 const std::string& column, const Value& v) const;
    bool has_index(const std::string& table, const std::string& column) const;

private:
    struct ValueLess {
        bool operator()(const Value& a, const Value& b) const { return compare_values(a, b) < 0; }
    };
    using HashIndex = std::map<Value, std::vector<std::size_t>, ValueLess>;

    Catalog catalog_;
    Dataset data_;
    std::map<std::pair<std::string, std::string>, HashIndex> indexes_;
};

/// Per-query cardinality/work oracle. Caches the output cardinality of
/// every predicate-closed table subset (disconnected subsets factor into
/// the product of their components) and evaluates plan work units in
/// closed form, identical to what execution counts.
class QueryStats {
public:
    QueryStats(const ToyEngine& engine, const JoinGraph& g);

    std::uint32_t mask_of_table(const std::string& ref_name) const;
    /// Output rows of the subset after its selections and internal
    /// predicates.
    std::int64_t card(std::uint32_t mask);

    std::int64_t leaf_work(const PlanNode& leaf);
    std::int64_t plan_work(const PhysicalPlan& p);
    std::vector<std::int64_t> node_works(const PhysicalPlan& p);

    /// Minimum work over the whole plan space (ordering x algorithm x
    /// access), by dynamic programming over table subsets. Exact because
    /// node work depends only on the operand subsets.
    std::int64_t min_space_work(const BackendCapabilities& caps);

    const JoinGraph& graph() const { return graph_; }

private:
    std::int64_t materialize_connected_card(std::uint32_t mask);
    std::int64_t min_access_work(int table_index, const BackendCapabilities& caps);

    const ToyEngine& engine_;
    JoinGraph graph_;
    std::map<std::uint32_t, std::int64_t> card_cache_;
    std::map<std::string, std::uint32_t> table_bit_;
    std::vector<std::uint32_t> predicate_masks_;  // endpoint pair per predicate
};

// ---------------------------------------------------------------------------
// Plan-space enumeration (the brute-force oracle)
// ---------------------------------------------------------------------------

/// All tree shapes with n leaves, in deterministic order.
std::vector<TreeShape> enumerate_tree_shapes(int n);

inline constexpr int kDefaultEnumerationBound = 6;

/// Streams every join ordering (shape x permutation) in deterministic
/// order. Same bound rule as for_each_plan.
void for_each_ordering(const JoinGraph& g, const std::function<void(const JoinTree&)>& fn,
                       int bound = kDefaultEnumerationBound);

/// Streams every plan of the space (ordering x algorithm assignment x
/// access assignment) in deterministic order. Throws
/// EnumerationLimitError when the query has more than `bound` tables.
void for_each_plan(const JoinGraph& g, const BackendCapabilities& caps, const Catalog& cat,
                   const std::function<void(const PhysicalPlan&)>& fn,
                   int bound = kDefaultEnumerationBound);

/// Materialized plan space, deduplicated by fingerprint.
std::vector<PhysicalPlan> enumerate_plan_space(const JoinGraph& g,
                                               const BackendCapabilities& caps, const Catalog& cat,
                                               int bound = kDefaultEnumerationBound);

std::int64_t plan_space_size(const JoinGraph& g, const BackendCapabilities& caps,
                             const Catalog& cat, int bound = kDefaultEnumerationBound);

/// Exact proportion of the plan space whose work is >= the chosen
/// plan's work (the chosen plan is itself a member of the space).
double exact_performance_factor(const JoinGraph& g, const PhysicalPlan& chosen,
                                const ToyEngine& engine, const BackendCapabilities& caps,
                                int bound = kDefaultEnumerationBound);

/// Number of space plans tying the given plan's work exactly.
std::int64_t count_work_ties(const JoinGraph& g, const PhysicalPlan& plan, const ToyEngine& engine,
                             const BackendCapabilities& caps, int bound = kDefaultEnumerationBound);

// ---------------------------------------------------------------------------
// Cost models
// ---------------------------------------------------------------------------

class CostModel {
public:
    virtual ~CostModel() = default;
    virtual std::string name() const = 0;
    virtual double cost(const PhysicalPlan& p, QueryStats& stats) const = 0;
};

/// Cost equals execution work exactly.
class TruthfulCostModel final : public CostModel {
public:
    std::string name() const override { return "truthful"; }
    double cost(const PhysicalPlan& p, QueryStats& stats) const override;
};

/// Truthful per-node work scaled by a per-node-kind lognormal factor
/// (seeded). Exists to manufacture cost-model misses on purpose.
class NoisyCostModel final : public CostModel {
public:
    NoisyCostModel(std::uint64_t seed, double sigma);
    std::string name() const override { return "noisy"; }
    double cost(const PhysicalPlan& p, QueryStats& stats) const override;
    double factor(const std::string& node_kind) const;

private:
    std::uint64_t seed_;
    double sigma_;
    mutable std::map<std::string, double> factors_;
};

// ---------------------------------------------------------------------------
// Optimizers
// ---------------------------------------------------------------------------

enum class Strategy { Exhaustive, GreedyLeftDeep, UniformRandom, AdversarialWorst };

Strategy strategy_from_name(const std::string& name);
std::string strategy_name(Strategy s);

struct OptimizeOptions {
    std::uint64_t seed = 0;          // consumed by UniformRandom only
    bool record_considered = true;   // keep fingerprints of every plan costed
    int enumeration_bound = kDefaultEnumerationBound;
};

struct OptimizeResult {
    PhysicalPlan plan;
    EfficiencyCounters counters;
    std::vector<std::string> considered;  // fingerprints of plans costed
    bool considered_lower_bound = false;
};

/// Runs one optimization. Counters: #LP distinct logical plans
/// materialized, #JO distinct complete join orderings, #PP plans
/// costed, #PJ join-rooted plans costed. optimization_time is a
/// deterministic work counter (nodes touched while costing), never wall
/// clock.
OptimizeResult optimize(Strategy strategy, const JoinGraph& g, const ToyEngine& engine,
                        const BackendCapabilities& caps, const CostModel& cost,
                        const OptimizeOptions& options = {});

}  // namespace optbench
