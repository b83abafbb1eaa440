#include "optbench/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "optbench/error.hpp"
#include "optbench/rng.hpp"

namespace optbench {

namespace {

std::int64_t draw_column_value(const ColumnSpec& spec, Rng& rng) {
    if (spec.dist == ColumnSpec::Dist::Uniform) {
        if (spec.max < spec.min) throw std::invalid_argument("uniform column: max < min");
        auto width = static_cast<std::uint64_t>(spec.max - spec.min) + 1;
        return spec.min + static_cast<std::int64_t>(rng.next_below(width));
    }
    // Zipf over [0, values): inverse CDF on precomputed cumulative weights.
    if (spec.values < 1) throw std::invalid_argument("zipf column: values must be >= 1");
    std::vector<double> cumulative(static_cast<std::size_t>(spec.values));
    double total = 0;
    for (std::int64_t k = 0; k < spec.values; ++k) {
        total += 1.0 / std::pow(static_cast<double>(k + 1), spec.skew);
        cumulative[static_cast<std::size_t>(k)] = total;
    }
    double u = rng.next_unit() * total;
    for (std::int64_t k = 0; k < spec.values; ++k)
        if (u <= cumulative[static_cast<std::size_t>(k)]) return k;
    return spec.values - 1;
}

}  // namespace

std::pair<Catalog, Dataset> generate_dataset(const GeneratorConfig& config) {
    Catalog catalog;
    Dataset data;
    Rng rng(config.seed);
    for (const auto& spec : config.tables) {
        TableInfo info;
        info.name = spec.name;
        info.row_count = spec.rows;
        Relation rel;
        for (const auto& col : spec.columns) {
            info.columns.push_back(col.name);
            rel.columns.push_back(col.name);
            if (col.indexed)
                info.indexes.push_back({"ix_" + spec.name + "_" + col.name, spec.name, col.name});
        }
        for (std::int64_t r = 0; r < spec.rows; ++r) {
            std::vector<Value> row;
            row.reserve(spec.columns.size());
            for (const auto& col : spec.columns) row.emplace_back(draw_column_value(col, rng));
            rel.rows.push_back(std::move(row));
        }
        data.emplace(spec.name, std::move(rel));
        catalog.tables.push_back(std::move(info));
    }
    auto violations = validate_catalog(catalog);
    if (!violations.empty()) throw std::invalid_argument("generated catalog: " + violations.front());
    return {std::move(catalog), std::move(data)};
}

QueryShape query_shape_from_name(const std::string& name) {
    if (name == "chain") return QueryShape::Chain;
    if (name == "clique") return QueryShape::Clique;
    if (name == "star") return QueryShape::Star;
    throw ConfigurationError("unknown query shape '" + name + "'");
}

SyntheticQuery make_synthetic_query(int table_count, QueryShape shape, std::uint64_t seed,
                                    const SyntheticQueryOptions& options) {
    if (table_count < 1) throw std::invalid_argument("make_synthetic_query: need >= 1 table");
    Rng rng(seed);

    GeneratorConfig gen;
    gen.seed = derive_seed(seed, 1);
    for (int i = 0; i < table_count; ++i) {
        TableSpec table;
        table.name = "t" + std::to_string(i);
        auto span = static_cast<std::uint64_t>(options.max_rows - options.min_rows) + 1;
        table.rows = options.min_rows + static_cast<std::int64_t>(rng.next_below(span));
        // Two join columns and one payload column per table.
        for (const char* col : {"a", "b"}) {
            ColumnSpec c;
            c.name = col;
            c.min = 0;
            c.max = options.value_domain - 1;
            c.indexed = rng.next_unit() < options.index_probability;
            table.columns.push_back(c);
        }
        ColumnSpec payload;
        payload.name = "v";
        payload.dist = ColumnSpec::Dist::Zipf;
        payload.skew = 1.1;
        payload.values = options.value_domain;
        table.columns.push_back(payload);
        gen.tables.push_back(std::move(table));
    }

    SyntheticQuery q;
    std::tie(q.catalog, q.data) = generate_dataset(gen);
    q.graph.query_id = "synthetic";
    for (int i = 0; i < table_count; ++i) q.graph.tables.push_back({"t" + std::to_string(i), ""});

    auto add_pred = [&](int i, int j) {
        // Alternate endpoint columns so multiple predicates per table pair
        // of columns stay plausible.
        const char* lc = (i + j) % 2 == 0 ? "a" : "b";
        const char* rc = (i + j) % 2 == 0 ? "b" : "a";
        q.graph.predicates.push_back(
            {"t" + std::to_string(i), lc, "t" + std::to_string(j), rc});
    };
    switch (shape) {
        case QueryShape::Chain:
            for (int i = 0; i + 1 < table_count; ++i) add_pred(i, i + 1);
            break;
        case QueryShape::Clique:
            for (int i = 0; i < table_count; ++i)
                for (int j = i + 1; j < table_count; ++j) add_pred(i, j);
            break;
        case QueryShape::Star:
            for (int i = 1; i < table_count; ++i) add_pred(0, i);
            break;
    }

    for (int i = 0; i < table_count; ++i) {
        if (rng.next_unit() >= options.selection_probability) continue;
        SelectionFilter f;
        f.table = "t" + std::to_string(i);
        f.column = "v";
        f.op = rng.next_unit() < 0.5 ? "<" : "=";
        f.value = static_cast<std::int64_t>(rng.next_below(
            static_cast<std::uint64_t>(options.value_domain)));
        q.graph.selections.push_back(std::move(f));
    }

    auto violations = validate_join_graph(q.graph, &q.catalog);
    if (!violations.empty())
        throw std::logic_error("synthetic query invalid: " + violations.front());
    return q;
}

}  // namespace optbench
