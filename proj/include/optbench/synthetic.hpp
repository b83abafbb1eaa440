#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optbench/core.hpp"
#include "optbench/toy_engine.hpp"

namespace optbench {

/// Column value distribution over non-negative integers.
struct ColumnSpec {
    std::string name;
    enum class Dist { Uniform, Zipf } dist = Dist::Uniform;
    std::int64_t min = 0;   // uniform
    std::int64_t max = 9;   // uniform, inclusive
    double skew = 1.0;      // zipf exponent
    std::int64_t values = 10;  // zipf support size, drawn from [0, values)
    bool indexed = false;
};

struct TableSpec {
    std::string name;
    std::int64_t rows = 0;
    std::vector<ColumnSpec> columns;
};

struct GeneratorConfig {
    std::uint64_t seed = 0;
    std::vector<TableSpec> tables;
};

/// Deterministic dataset from a seed. Index names are ix_<table>_<column>.
std::pair<Catalog, Dataset> generate_dataset(const GeneratorConfig& config);

// ---------------------------------------------------------------------------
// Micro-benchmark queries (used by sweeps and by the oracle test suites)
// ---------------------------------------------------------------------------

enum class QueryShape { Chain, Clique, Star };

QueryShape query_shape_from_name(const std::string& name);

struct SyntheticQueryOptions {
    std::int64_t min_rows = 4;
    std::int64_t max_rows = 12;
    std::int64_t value_domain = 8;  // join-column values drawn from [0, domain)
    double index_probability = 0.5;
    double selection_probability = 0.3;
};

/// A self-contained query: catalog + data + join graph, all derived
/// from the seed.
struct SyntheticQuery {
    Catalog catalog;
    Dataset data;
    JoinGraph graph;
};

SyntheticQuery make_synthetic_query(int table_count, QueryShape shape, std::uint64_t seed,
                                    const SyntheticQueryOptions& options = {});

}  // namespace optbench
