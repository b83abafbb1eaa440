#pragma once

#include <memory>
#include <string>
#include <vector>

#include "optbench/adapter.hpp"
#include "optbench/effectiveness.hpp"
#include "optbench/efficiency.hpp"
#include "optbench/json_io.hpp"
#include "optbench/synthetic.hpp"

namespace optbench {

/// A parsed suite configuration with its adapter constructed and inputs
/// loaded. See docs/formats.md for the file schema.
struct LoadedSuite {
    Catalog catalog;
    std::vector<JoinGraph> queries;
    std::unique_ptr<BackendAdapter> adapter;
    std::shared_ptr<const HintDialect> dialect;  // may be null (plan-native adapter)
    SamplingConfig sampling;
    std::uint64_t seed = 0;
    double timeout_factor = 10.0;
    std::string out_json;
    std::string out_csv;
    std::string out_trace;
};

/// Loads and validates a suite config file. Relative input paths
/// resolve against the config file's directory, then OPTBENCH_INPUT_DIR
/// if set; relative output paths resolve against OPTBENCH_OUTPUT_DIR if
/// set. The seed is mandatory.
LoadedSuite load_suite(const std::string& config_path);

/// Builds a replay adapter from a trace file. The file's header
/// descriptor is used unless an override is given; a trace without a
/// header needs the override.
std::unique_ptr<ReplayAdapter> make_replay_adapter(
    const std::string& trace_path, UnknownPlanPolicy policy,
    const std::optional<AdapterDescriptor>& descriptor_override = std::nullopt);

/// Optimizes every query and gathers probe counters. Throws
/// ConfigurationError when the adapter exposes no probe and is not
/// flagged effectiveness-only.
std::vector<QueryEfficiency> collect_efficiency(BackendAdapter& adapter,
                                                const std::vector<JoinGraph>& queries);

// ---------------------------------------------------------------------------
// Complexity sweep
// ---------------------------------------------------------------------------

struct SweepOptions {
    int min_tables = 3;
    int max_tables = 6;
    int per_size = 20;
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::GreedyLeftDeep;
    std::string cost_model = "truthful";
    double noise_sigma = 1.0;
    BackendCapabilities capabilities = default_toy_capabilities();
    SyntheticQueryOptions query_options;
};

struct SweepRow {
    int tables = 0;
    double optimality_frequency = 0;
    int queries = 0;
};

/// Optimality frequency of a toy optimizer per table count, judged
/// against the exact minimum-work oracle over random chain/clique
/// micro-queries. Throws ConfigurationError when max < min.
std::vector<SweepRow> complexity_sweep(const SweepOptions& options);

}  // namespace optbench
