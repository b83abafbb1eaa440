#include "optbench/json_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "optbench/error.hpp"

namespace optbench {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigurationError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigurationError("cannot write '" + path + "'");
    out << content;
}

json load_json_file(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigurationError("'" + path + "': " + e.what());
    }
}

std::string iso_timestamp_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.10g", v);
    return buffer;
}

namespace {

[[noreturn]] void fail(const std::string& what) { throw ConfigurationError(what); }

const json& require(const json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end()) fail(std::string(where) + ": missing field '" + key + "'");
    return *it;
}

Value value_from_json(const json& j, const char* where) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_string()) return j.get<std::string>();
    fail(std::string(where) + ": literal must be an integer or a string");
}

// "ref.column" -> (ref, column), split at the first dot.
std::pair<std::string, std::string> split_column(const std::string& qualified, const char* where) {
    auto dot = qualified.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == qualified.size())
        fail(std::string(where) + ": expected '<table>.<column>', got '" + qualified + "'");
    return {qualified.substr(0, dot), qualified.substr(dot + 1)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

json catalog_to_json(const Catalog& cat) {
    json tables = json::array();
    for (const auto& t : cat.tables) {
        json indexes = json::array();
        for (const auto& ix : t.indexes) indexes.push_back({{"name", ix.name}, {"column", ix.column}});
        tables.push_back({{"name", t.name},
                          {"columns", t.columns},
                          {"row_count", t.row_count},
                          {"indexes", indexes}});
    }
    return {{"schema", 1}, {"tables", tables}};
}

Catalog catalog_from_json(const json& j) {
    Catalog cat;
    for (const auto& tj : require(j, "tables", "catalog")) {
        TableInfo t;
        t.name = require(tj, "name", "catalog table").get<std::string>();
        t.columns = require(tj, "columns", "catalog table").get<std::vector<std::string>>();
        t.row_count = tj.value("row_count", std::int64_t{0});
        for (const auto& ij : tj.value("indexes", json::array())) {
            IndexInfo ix;
            ix.name = require(ij, "name", "index").get<std::string>();
            ix.column = require(ij, "column", "index").get<std::string>();
            ix.table = t.name;
            t.indexes.push_back(std::move(ix));
        }
        cat.tables.push_back(std::move(t));
    }
    auto violations = validate_catalog(cat);
    if (!violations.empty()) fail("catalog: " + violations.front());
    return cat;
}

Catalog load_catalog(const std::string& path) { return catalog_from_json(load_json_file(path)); }

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

std::vector<JoinGraph> queries_from_json(const json& j) {
    const json& arr = j.is_array() ? j : require(j, "queries", "queries file");
    std::vector<JoinGraph> out;
    for (const auto& qj : arr) {
        JoinGraph g;
        g.query_id = require(qj, "query_id", "query").get<std::string>();
        for (const auto& tj : require(qj, "tables", "query")) {
            TableRef ref;
            ref.table = require(tj, "table", "table reference").get<std::string>();
            ref.alias = tj.value("alias", std::string{});
            g.tables.push_back(std::move(ref));
        }
        for (const auto& pj : qj.value("predicates", json::array())) {
            auto [lt, lc] =
                split_column(require(pj, "left", "predicate").get<std::string>(), "predicate");
            auto [rt, rc] =
                split_column(require(pj, "right", "predicate").get<std::string>(), "predicate");
            g.predicates.push_back({lt, lc, rt, rc});
        }
        for (const auto& sj : qj.value("selections", json::array())) {
            SelectionFilter f;
            f.table = require(sj, "table", "selection").get<std::string>();
            f.column = require(sj, "column", "selection").get<std::string>();
            f.op = require(sj, "op", "selection").get<std::string>();
            f.value = value_from_json(require(sj, "value", "selection"), "selection");
            g.selections.push_back(std::move(f));
        }
        auto violations = validate_join_graph(g);
        if (!violations.empty()) fail("query '" + g.query_id + "': " + violations.front());
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<JoinGraph> load_queries(const std::string& path) {
    return queries_from_json(load_json_file(path));
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

json plan_to_json(const PhysicalPlan& p) {
    std::function<json(std::int32_t)> walk = [&](std::int32_t index) -> json {
        const PlanNode& n = p.nodes[static_cast<std::size_t>(index)];
        if (n.is_leaf()) {
            json leaf = {{"table", n.table}};
            leaf["access"] = n.access.is_index_scan() ? json{{"index", n.access.index}}
                                                      : json("seq");
            return leaf;
        }
        return {{"join", n.algorithm},
                {"predicates", n.predicates},
                {"left", walk(n.left)},
                {"right", walk(n.right)}};
    };
    return walk(0);
}

namespace {

PhysicalPlan plan_node_from_json(const json& j) {
    if (j.contains("table")) {
        AccessMethod access;
        const json& a = require(j, "access", "plan leaf");
        if (a.is_object()) access.index = require(a, "index", "plan access").get<std::string>();
        else if (a.get<std::string>() != "seq")
            fail("plan access must be \"seq\" or {\"index\": ...}");
        return PhysicalPlan::leaf(require(j, "table", "plan leaf").get<std::string>(), access);
    }
    PhysicalPlan left = plan_node_from_json(require(j, "left", "plan join"));
    PhysicalPlan right = plan_node_from_json(require(j, "right", "plan join"));
    return PhysicalPlan::join(require(j, "join", "plan join").get<std::string>(), std::move(left),
                              std::move(right),
                              j.value("predicates", std::vector<std::size_t>{}));
}

}  // namespace

PhysicalPlan plan_from_json(const json& j) { return plan_node_from_json(j); }

// ---------------------------------------------------------------------------
// Sampling / generator / dialect configs
// ---------------------------------------------------------------------------

json sampling_config_to_json(const SamplingConfig& c) {
    json j = {{"confidence_z", c.confidence_z}, {"precision", c.precision}, {"prior", c.prior}};
    j["population"] = c.population ? json(*c.population) : json(nullptr);
    return j;
}

SamplingConfig sampling_config_from_json(const json& j) {
    SamplingConfig c;
    c.confidence_z = j.value("confidence_z", c.confidence_z);
    c.precision = j.value("precision", c.precision);
    c.prior = j.value("prior", c.prior);
    if (j.contains("population") && !j["population"].is_null())
        c.population = j["population"].get<std::int64_t>();
    auto violations = validate_sampling_config(c);
    if (!violations.empty()) fail("sampling config: " + violations.front());
    return c;
}

GeneratorConfig generator_config_from_json(const json& j) {
    GeneratorConfig config;
    config.seed = require(j, "seed", "generator config").get<std::uint64_t>();
    for (const auto& tj : require(j, "tables", "generator config")) {
        TableSpec t;
        t.name = require(tj, "name", "generator table").get<std::string>();
        t.rows = require(tj, "rows", "generator table").get<std::int64_t>();
        for (const auto& cj : require(tj, "columns", "generator table")) {
            ColumnSpec c;
            c.name = require(cj, "name", "generator column").get<std::string>();
            std::string dist = cj.value("distribution", "uniform");
            if (dist == "uniform") c.dist = ColumnSpec::Dist::Uniform;
            else if (dist == "zipf") c.dist = ColumnSpec::Dist::Zipf;
            else fail("generator column: unknown distribution '" + dist + "'");
            c.min = cj.value("min", c.min);
            c.max = cj.value("max", c.max);
            c.skew = cj.value("skew", c.skew);
            c.values = cj.value("values", c.values);
            c.indexed = cj.value("indexed", false);
            t.columns.push_back(std::move(c));
        }
        config.tables.push_back(std::move(t));
    }
    return config;
}

GeneratorConfig load_generator_config(const std::string& path) {
    return generator_config_from_json(load_json_file(path));
}

DialectTemplates dialect_templates_from_json(const json& j) {
    DialectTemplates t;
    t.name = j.value("name", "custom");
    t.join_types = require(j, "join_types", "dialect").get<std::vector<std::string>>();
    t.index_hint = require(j, "index_hint", "dialect").get<std::string>();
    t.join_hint = require(j, "join_hint", "dialect").get<std::string>();
    t.cross_join = require(j, "cross_join", "dialect").get<std::string>();
    t.single_table = j.value("single_table", t.single_table);
    return t;
}

DialectTemplates load_dialect_templates(const std::string& path) {
    return dialect_templates_from_json(load_json_file(path));
}

// ---------------------------------------------------------------------------
// CSV datasets
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    return cells;
}

Value parse_cell(const std::string& cell) {
    if (!cell.empty()) {
        char* end = nullptr;
        long long v = std::strtoll(cell.c_str(), &end, 10);
        if (end && *end == '\0') return static_cast<std::int64_t>(v);
    }
    return cell;
}

}  // namespace

Dataset load_csv_dir(const Catalog& cat, const std::string& dir) {
    Dataset data;
    for (const auto& t : cat.tables) {
        std::string path = (std::filesystem::path(dir) / (t.name + ".csv")).string();
        std::istringstream in(read_file(path));
        std::string line;
        if (!std::getline(in, line)) fail("'" + path + "': empty file");
        auto header = split_csv_line(line);
        if (header != t.columns) fail("'" + path + "': header does not match catalog columns");
        Relation rel;
        rel.columns = t.columns;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto cells = split_csv_line(line);
            if (cells.size() != t.columns.size())
                fail("'" + path + "': row with " + std::to_string(cells.size()) + " cells");
            std::vector<Value> row;
            row.reserve(cells.size());
            for (const auto& cell : cells) row.push_back(parse_cell(cell));
            rel.rows.push_back(std::move(row));
        }
        if (static_cast<std::int64_t>(rel.rows.size()) != t.row_count)
            fail("'" + path + "': row count " + std::to_string(rel.rows.size()) +
                 " does not match catalog row_count " + std::to_string(t.row_count));
        data.emplace(t.name, std::move(rel));
    }
    return data;
}

// ---------------------------------------------------------------------------
// Counters / descriptors / replay traces
// ---------------------------------------------------------------------------

json counters_to_json(const EfficiencyCounters& c) {
    json j;
    j["lp"] = c.logical_plans ? json(*c.logical_plans) : json(nullptr);
    j["jo"] = c.join_orderings ? json(*c.join_orderings) : json(nullptr);
    j["pp"] = c.physical_plans ? json(*c.physical_plans) : json(nullptr);
    j["pj"] = c.physical_join_plans ? json(*c.physical_join_plans) : json(nullptr);
    j["optimization_time"] = c.optimization_time;
    j["lower_bound"] = c.lower_bound;
    return j;
}

EfficiencyCounters counters_from_json(const json& j) {
    EfficiencyCounters c;
    auto read = [&](const char* key) -> std::optional<std::int64_t> {
        if (!j.contains(key) || j[key].is_null()) return std::nullopt;
        return j[key].get<std::int64_t>();
    };
    c.logical_plans = read("lp");
    c.join_orderings = read("jo");
    c.physical_plans = read("pp");
    c.physical_join_plans = read("pj");
    c.optimization_time = j.value("optimization_time", 0.0);
    c.lower_bound = j.value("lower_bound", false);
    return c;
}

json descriptor_to_json(const AdapterDescriptor& d) {
    return {{"name", d.name},
            {"dialect", d.dialect},
            {"capabilities",
             {{"join_algorithms",
               std::vector<std::string>(d.capabilities.join_algorithms.begin(),
                                        d.capabilities.join_algorithms.end())},
              {"supports_index_scan", d.capabilities.supports_index_scan}}},
            {"probe_support", std::vector<std::string>(d.probe_support.begin(),
                                                       d.probe_support.end())},
            {"isolation", d.isolation == Isolation::ParallelSafe ? "parallel-safe"
                                                                 : "sequential-only"},
            {"effectiveness_only", d.effectiveness_only}};
}

AdapterDescriptor descriptor_from_json(const json& j) {
    AdapterDescriptor d;
    d.name = j.value("name", "replay");
    d.dialect = j.value("dialect", std::string{});
    const json& caps = require(j, "capabilities", "adapter descriptor");
    for (const auto& a : require(caps, "join_algorithms", "capabilities"))
        d.capabilities.join_algorithms.insert(a.get<std::string>());
    d.capabilities.supports_index_scan = caps.value("supports_index_scan", true);
    for (const auto& p : j.value("probe_support", std::vector<std::string>{}))
        d.probe_support.insert(p);
    d.isolation = j.value("isolation", "sequential-only") == "parallel-safe"
                      ? Isolation::ParallelSafe
                      : Isolation::SequentialOnly;
    d.effectiveness_only = j.value("effectiveness_only", false);
    return d;
}

void save_replay_trace(const std::string& path, const AdapterDescriptor& descriptor,
                       const std::vector<ReplayRecord>& records) {
    std::ostringstream out;
    out << json{{"schema", 1}, {"adapter", descriptor_to_json(descriptor)}}.dump() << '\n';
    for (const auto& r : records) {
        json rj;
        rj["query_id"] = r.query_id;
        rj["chosen"] = {{"fingerprint", r.chosen_fingerprint}, {"runtime", r.chosen_runtime}};
        json runtimes = json::object();
        for (const auto& [fp, rt] : r.runtimes) runtimes[fp] = rt;
        rj["runtimes"] = std::move(runtimes);
        if (r.counters) rj["counters"] = counters_to_json(*r.counters);
        if (!r.considered.empty()) rj["considered"] = r.considered;
        if (r.considered_lower_bound) rj["considered_lower_bound"] = true;
        out << rj.dump() << '\n';
    }
    write_file(path, out.str());
}

std::pair<std::optional<AdapterDescriptor>, std::vector<ReplayRecord>> load_replay_trace(
    const std::string& path) {
    std::istringstream in(read_file(path));
    std::optional<AdapterDescriptor> descriptor;
    std::vector<ReplayRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            fail("'" + path + "' line " + std::to_string(line_no) + ": " + e.what());
        }
        if (line_no == 1 && j.contains("adapter")) {
            descriptor = descriptor_from_json(j["adapter"]);
            continue;
        }
        ReplayRecord r;
        r.query_id = require(j, "query_id", "replay record").get<std::string>();
        const json& chosen = require(j, "chosen", "replay record");
        r.chosen_fingerprint = require(chosen, "fingerprint", "replay chosen").get<std::string>();
        r.chosen_runtime = require(chosen, "runtime", "replay chosen").get<double>();
        for (const auto& [fp, rt] : require(j, "runtimes", "replay record").items())
            r.runtimes[fp] = rt.get<double>();
        if (j.contains("counters")) r.counters = counters_from_json(j["counters"]);
        for (const auto& fp : j.value("considered", std::vector<std::string>{}))
            r.considered.push_back(fp);
        r.considered_lower_bound = j.value("considered_lower_bound", false);
        auto violations = validate_replay_record(r);
        if (!violations.empty())
            fail("'" + path + "' line " + std::to_string(line_no) + ": " + violations.front());
        records.push_back(std::move(r));
    }
    return {std::move(descriptor), std::move(records)};
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

json effectiveness_report_to_json(const EffectivenessReport& report,
                                  const ReportContext& context) {
    json queries = json::array();
    for (const auto& q : report.per_query) {
        queries.push_back({{"query_id", q.query_id},
                           {"pf", q.pf_estimate},
                           {"pf_low", q.pf_low},
                           {"pf_high", q.pf_high},
                           {"relative_optimal", q.relative_optimal},
                           {"chosen_runtime", q.chosen_runtime},
                           {"sample_size", q.sample_size},
                           {"seed", q.seed}});
    }
    json j;
    j["schema"] = 1;
    j["metadata"] = {{"generated_at", iso_timestamp_now()},
                     {"adapter", context.adapter_name},
                     {"note", "interval is the fixed +-precision Wald margin; "
                              "sample-based OF is an upper bound"}};
    j["sampling"] = sampling_config_to_json(context.sampling);
    j["seed"] = context.seed;
    j["timeout_factor"] = context.timeout_factor;
    j["optimality_frequency"] = report.optimality_frequency;
    j["avg_pf_suboptimal"] =
        report.avg_pf_suboptimal ? json(*report.avg_pf_suboptimal) : json(nullptr);
    j["share_pf_above_0.8"] = report.threshold_share(0.8);
    j["queries"] = std::move(queries);
    return j;
}

std::string effectiveness_report_to_csv(const EffectivenessReport& report) {
    std::ostringstream out;
    out << "query_id,pf,pf_low,pf_high,relative_optimal,chosen_runtime,sample_size,seed\n";
    for (const auto& q : report.per_query) {
        out << q.query_id << ',' << format_double(q.pf_estimate) << ',' << format_double(q.pf_low)
            << ',' << format_double(q.pf_high) << ',' << (q.relative_optimal ? "true" : "false")
            << ',' << format_double(q.chosen_runtime) << ',' << q.sample_size << ',' << q.seed
            << '\n';
    }
    return out.str();
}

json efficiency_report_to_json(const EfficiencyReport& report, const std::string& adapter_name) {
    json row;
    row["adapter"] = adapter_name;
    row["lower_bound"] = report.lower_bound;
    json regressions = json::object();
    for (const auto& col : report.columns) {
        row[col.name] = col.mean ? json(*col.mean) : json(nullptr);
        json fit;
        if (col.fit) {
            fit = {{"slope", col.fit->slope},
                   {"intercept", col.fit->intercept},
                   {"r_squared", col.fit->r_squared},
                   {"n_points", col.fit->n_points},
                   {"degenerate", col.fit->degenerate}};
        } else if (col.fit_notice) {
            fit = {{"notice", *col.fit_notice}};
        } else {
            fit = nullptr;
        }
        regressions[col.name] = std::move(fit);
    }
    json queries = json::array();
    for (const auto& q : report.per_query) {
        json qj = counters_to_json(q.counters);
        qj["query_id"] = q.query_id;
        queries.push_back(std::move(qj));
    }
    json j;
    j["schema"] = 1;
    j["metadata"] = {{"generated_at", iso_timestamp_now()}, {"adapter", adapter_name}};
    j["row"] = std::move(row);
    j["regressions"] = std::move(regressions);
    j["queries"] = std::move(queries);
    return j;
}

std::string efficiency_report_to_csv(const EfficiencyReport& report,
                                     const std::string& adapter_name) {
    std::ostringstream out;
    out << "adapter,lp,jo,pp,pj\n" << adapter_name;
    for (const auto& col : report.columns)
        out << ',' << (col.mean ? format_double(*col.mean) : "N/A");
    out << '\n';
    return out.str();
}

}  // namespace optbench
