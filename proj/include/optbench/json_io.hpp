#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "optbench/adapter.hpp"
#include "optbench/core.hpp"
#include "optbench/dialects.hpp"
#include "optbench/effectiveness.hpp"
#include "optbench/efficiency.hpp"
#include "optbench/plan_sampler.hpp"
#include "optbench/synthetic.hpp"

namespace optbench {

// All file formats carry "schema": 1 at top level (trace files in the
// optional header line). Parsers throw ConfigurationError with the
// offending path/field on malformed input.

nlohmann::json catalog_to_json(const Catalog& cat);
Catalog catalog_from_json(const nlohmann::json& j);
Catalog load_catalog(const std::string& path);

std::vector<JoinGraph> queries_from_json(const nlohmann::json& j);
std::vector<JoinGraph> load_queries(const std::string& path);

nlohmann::json plan_to_json(const PhysicalPlan& p);
PhysicalPlan plan_from_json(const nlohmann::json& j);

nlohmann::json sampling_config_to_json(const SamplingConfig& c);
SamplingConfig sampling_config_from_json(const nlohmann::json& j);

GeneratorConfig generator_config_from_json(const nlohmann::json& j);
GeneratorConfig load_generator_config(const std::string& path);

DialectTemplates dialect_templates_from_json(const nlohmann::json& j);
DialectTemplates load_dialect_templates(const std::string& path);

/// CSV per table: <dir>/<table>.csv, first line is the header and must
/// match the catalog columns. Cells parse as integers when possible,
/// strings otherwise.
Dataset load_csv_dir(const Catalog& cat, const std::string& dir);

nlohmann::json counters_to_json(const EfficiencyCounters& c);
EfficiencyCounters counters_from_json(const nlohmann::json& j);

// Replay traces: JSON lines, one record per query, optionally preceded
// by a header line {"schema":1, "adapter":{...}} describing the
// recorded backend.
void save_replay_trace(const std::string& path, const AdapterDescriptor& descriptor,
                       const std::vector<ReplayRecord>& records);
std::pair<std::optional<AdapterDescriptor>, std::vector<ReplayRecord>> load_replay_trace(
    const std::string& path);

nlohmann::json descriptor_to_json(const AdapterDescriptor& d);
AdapterDescriptor descriptor_from_json(const nlohmann::json& j);

// Reports. The metadata object (timestamp, adapter name) is the only
// nondeterministic part; determinism checks erase it.
struct ReportContext {
    std::string adapter_name;
    SamplingConfig sampling;
    std::uint64_t seed = 0;
    double timeout_factor = 0;
};

nlohmann::json effectiveness_report_to_json(const EffectivenessReport& report,
                                            const ReportContext& context);
std::string effectiveness_report_to_csv(const EffectivenessReport& report);

nlohmann::json efficiency_report_to_json(const EfficiencyReport& report,
                                         const std::string& adapter_name);
std::string efficiency_report_to_csv(const EfficiencyReport& report,
                                     const std::string& adapter_name);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
nlohmann::json load_json_file(const std::string& path);

/// UTC timestamp for report metadata.
std::string iso_timestamp_now();

/// Compact deterministic decimal rendering for CSV cells.
std::string format_double(double v);

}  // namespace optbench
