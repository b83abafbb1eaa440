#include "optbench/harness.hpp"

#include <cstdlib>
#include <filesystem>

#include "optbench/error.hpp"
#include "optbench/rng.hpp"

namespace optbench {

using nlohmann::json;

namespace {

std::string resolve_input(const std::string& path, const std::filesystem::path& config_dir) {
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    if (std::filesystem::exists(config_dir / p)) return (config_dir / p).string();
    if (const char* base = std::getenv("OPTBENCH_INPUT_DIR"))
        return (std::filesystem::path(base) / p).string();
    return (config_dir / p).string();
}

std::string resolve_output(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    if (const char* base = std::getenv("OPTBENCH_OUTPUT_DIR"))
        return (std::filesystem::path(base) / p).string();
    return path;
}

BackendCapabilities capabilities_from_config(const json& adapter_config,
                                             const BackendCapabilities& fallback) {
    BackendCapabilities caps = fallback;
    if (adapter_config.contains("caps")) {
        caps.join_algorithms.clear();
        for (const auto& a : adapter_config["caps"]) caps.join_algorithms.insert(a.get<std::string>());
    }
    if (adapter_config.contains("supports_index_scan"))
        caps.supports_index_scan = adapter_config["supports_index_scan"].get<bool>();
    auto violations = validate_capabilities(caps);
    if (!violations.empty()) throw ConfigurationError("capabilities: " + violations.front());
    return caps;
}

}  // namespace

std::unique_ptr<ReplayAdapter> make_replay_adapter(
    const std::string& trace_path, UnknownPlanPolicy policy,
    const std::optional<AdapterDescriptor>& descriptor_override) {
    auto [header, records] = load_replay_trace(trace_path);
    std::optional<AdapterDescriptor> descriptor =
        descriptor_override ? descriptor_override : header;
    if (!descriptor)
        throw ConfigurationError("replay trace '" + trace_path +
                                 "' has no adapter header; supply capabilities in the config");
    return std::make_unique<ReplayAdapter>(*descriptor, std::move(records), policy);
}

LoadedSuite load_suite(const std::string& config_path) {
    json config = load_json_file(config_path);
    std::filesystem::path config_dir = std::filesystem::path(config_path).parent_path();

    LoadedSuite suite;
    if (!config.contains("seed"))
        throw ConfigurationError("suite config: 'seed' is mandatory (no implicit entropy)");
    suite.seed = config["seed"].get<std::uint64_t>();
    suite.timeout_factor = config.value("timeout_factor", 10.0);
    if (config.contains("sampling")) suite.sampling = sampling_config_from_json(config["sampling"]);

    if (!config.contains("queries")) throw ConfigurationError("suite config: missing 'queries'");
    suite.queries = load_queries(resolve_input(config["queries"].get<std::string>(), config_dir));
    if (suite.queries.empty()) throw ConfigurationError("suite config: query suite is empty");

    if (!config.contains("adapter")) throw ConfigurationError("suite config: missing 'adapter'");
    const json& aj = config["adapter"];
    std::string kind = aj.value("kind", "toy");

    bool have_catalog = false;
    if (kind == "toy") {
        ToyAdapterConfig toy;
        toy.strategy = strategy_from_name(aj.value("strategy", "exhaustive"));
        toy.cost_model = aj.value("cost_model", "truthful");
        toy.noise_sigma = aj.value("noise_sigma", 1.0);
        toy.noise_seed = aj.value("noise_seed", std::uint64_t{0});
        toy.optimizer_seed = aj.value("optimizer_seed", std::uint64_t{0});
        toy.record_considered = aj.value("record_considered", true);
        toy.enumeration_bound = aj.value("enumeration_bound", kDefaultEnumerationBound);
        toy.capabilities = capabilities_from_config(aj, default_toy_capabilities());

        if (!aj.contains("data")) throw ConfigurationError("toy adapter: missing 'data'");
        const json& dj = aj["data"];
        Dataset data;
        if (dj.contains("generator") || dj.contains("generator_file")) {
            GeneratorConfig gen =
                dj.contains("generator")
                    ? generator_config_from_json(dj["generator"])
                    : load_generator_config(
                          resolve_input(dj["generator_file"].get<std::string>(), config_dir));
            std::tie(suite.catalog, data) = generate_dataset(gen);
            have_catalog = true;
        } else if (dj.contains("csv_dir")) {
            if (!config.contains("catalog"))
                throw ConfigurationError("toy adapter with csv_dir needs a 'catalog' path");
            suite.catalog =
                load_catalog(resolve_input(config["catalog"].get<std::string>(), config_dir));
            have_catalog = true;
            data = load_csv_dir(suite.catalog,
                                resolve_input(dj["csv_dir"].get<std::string>(), config_dir));
        } else {
            throw ConfigurationError("toy adapter data: expected generator, generator_file or csv_dir");
        }
        auto engine = std::make_shared<ToyEngine>(suite.catalog, std::move(data));
        suite.adapter = std::make_unique<ToyAdapter>(std::move(engine), std::move(toy));
    } else if (kind == "replay") {
        if (!aj.contains("trace")) throw ConfigurationError("replay adapter: missing 'trace'");
        UnknownPlanPolicy policy = aj.value("unknown_plan", "error") == "timeout"
                                       ? UnknownPlanPolicy::TimeoutSentinel
                                       : UnknownPlanPolicy::Error;
        std::optional<AdapterDescriptor> forced_descriptor;
        if (aj.contains("descriptor")) forced_descriptor = descriptor_from_json(aj["descriptor"]);
        suite.adapter = make_replay_adapter(
            resolve_input(aj["trace"].get<std::string>(), config_dir), policy, forced_descriptor);
    } else {
        throw ConfigurationError("unknown adapter kind '" + kind + "'");
    }

    if (!have_catalog) {
        if (!config.contains("catalog")) throw ConfigurationError("suite config: missing 'catalog'");
        suite.catalog = load_catalog(resolve_input(config["catalog"].get<std::string>(), config_dir));
    }

    for (const auto& g : suite.queries) {
        auto violations = validate_join_graph(g, &suite.catalog);
        if (!violations.empty())
            throw ConfigurationError("query '" + g.query_id + "': " + violations.front());
    }

    if (!suite.adapter->descriptor().dialect.empty() || aj.contains("dialect")) {
        std::string dialect_name = aj.value("dialect", suite.adapter->descriptor().dialect);
        if (dialect_name.size() > 5 && dialect_name.substr(dialect_name.size() - 5) == ".json")
            suite.dialect = dialect_from_templates(
                load_dialect_templates(resolve_input(dialect_name, config_dir)));
        else
            suite.dialect = builtin_dialect(dialect_name);
    }

    const json out = config.value("output", json::object());
    if (out.contains("json")) suite.out_json = resolve_output(out["json"].get<std::string>());
    if (out.contains("csv")) suite.out_csv = resolve_output(out["csv"].get<std::string>());
    if (out.contains("trace")) suite.out_trace = resolve_output(out["trace"].get<std::string>());
    return suite;
}

std::vector<QueryEfficiency> collect_efficiency(BackendAdapter& adapter,
                                                const std::vector<JoinGraph>& queries) {
    if (adapter.descriptor().effectiveness_only)
        throw ConfigurationError("adapter '" + adapter.descriptor().name +
                                 "' is effectiveness-only; efficiency reporting is disabled");
    std::vector<QueryEfficiency> out;
    for (const auto& g : queries) {
        adapter.reset_cache();
        adapter.run_chosen(g);
        auto probe = adapter.probe(g.query_id);
        if (!probe)
            throw ConfigurationError("adapter exposes no probe output for query '" + g.query_id +
                                     "'");
        out.push_back({g.query_id, probe->counters});
    }
    return out;
}

std::vector<SweepRow> complexity_sweep(const SweepOptions& options) {
    if (options.max_tables < options.min_tables)
        throw ConfigurationError("complexity sweep: max_tables < min_tables");
    if (options.per_size < 1) throw ConfigurationError("complexity sweep: per_size must be >= 1");

    std::unique_ptr<CostModel> model;
    if (options.cost_model == "truthful")
        model = std::make_unique<TruthfulCostModel>();
    else if (options.cost_model == "noisy")
        model = std::make_unique<NoisyCostModel>(options.seed, options.noise_sigma);
    else
        throw ConfigurationError("unknown cost model '" + options.cost_model + "'");

    std::vector<SweepRow> rows;
    for (int size = options.min_tables; size <= options.max_tables; ++size) {
        int optimal = 0;
        for (int q = 0; q < options.per_size; ++q) {
            std::uint64_t seed =
                derive_seed(options.seed, static_cast<std::uint64_t>(size) * 1000 +
                                              static_cast<std::uint64_t>(q));
            Rng pick(seed);
            QueryShape shape = pick.next_unit() < 0.5 ? QueryShape::Chain : QueryShape::Clique;
            SyntheticQuery sq =
                make_synthetic_query(size, shape, derive_seed(seed, 1), options.query_options);
            sq.graph.query_id = "sweep-" + std::to_string(size) + "-" + std::to_string(q);

            ToyEngine engine(sq.catalog, sq.data);
            OptimizeOptions opt;
            opt.seed = derive_seed(seed, 2);
            opt.record_considered = false;
            OptimizeResult r =
                optimize(options.strategy, sq.graph, engine, options.capabilities, *model, opt);

            QueryStats stats(engine, sq.graph);
            optimal += stats.plan_work(r.plan) == stats.min_space_work(options.capabilities);
        }
        SweepRow row;
        row.tables = size;
        row.queries = options.per_size;
        row.optimality_frequency =
            static_cast<double>(optimal) / static_cast<double>(options.per_size);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace optbench
