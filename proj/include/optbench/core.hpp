#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace optbench {

/// Scalar cell value. Integers and strings cover the synthetic and CSV
/// datasets; mixed-type comparison orders by type first.
using Value = std::variant<std::int64_t, std::string>;

/// Three-way comparison: <0, 0, >0.
int compare_values(const Value& a, const Value& b);

std::string value_to_string(const Value& v);

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

struct IndexInfo {
    std::string name;
    std::string table;
    std::string column;
};

struct TableInfo {
    std::string name;
    std::vector<std::string> columns;
    std::int64_t row_count = 0;
    std::vector<IndexInfo> indexes;

    bool has_column(const std::string& c) const;
};

struct Catalog {
    std::vector<TableInfo> tables;

    const TableInfo* find_table(const std::string& name) const;
    /// Throws std::invalid_argument if absent.
    const TableInfo& table(const std::string& name) const;
};

/// Structural checks: unique table names, unique columns per table,
/// indexes referencing existing columns, non-negative row counts.
std::vector<std::string> validate_catalog(const Catalog& cat);

// ---------------------------------------------------------------------------
// Join graph (a query)
// ---------------------------------------------------------------------------

/// A table occurrence in a query. Self-joins need distinct aliases; the
/// reference name (alias if present, else table name) identifies the
/// occurrence everywhere else in the toolkit.
struct TableRef {
    std::string table;
    std::string alias;  // optional

    const std::string& name() const { return alias.empty() ? table : alias; }
};

/// Equi-join predicate between two table references.
struct JoinPredicate {
    std::string left_table;  // reference name, not base table
    std::string left_column;
    std::string right_table;
    std::string right_column;
};

/// Per-table filter: <ref>.<column> <op> <literal>.
struct SelectionFilter {
    std::string table;  // reference name
    std::string column;
    std::string op;  // = != < <= > >=
    Value value;
};

struct JoinGraph {
    std::string query_id;
    std::vector<TableRef> tables;
    std::vector<JoinPredicate> predicates;
    std::vector<SelectionFilter> selections;

    int table_count() const { return static_cast<int>(tables.size()); }
    const TableRef* find_ref(const std::string& name) const;
};

/// Checks reference integrity; with a catalog also checks that base
/// tables and all referenced columns exist.
std::vector<std::string> validate_join_graph(const JoinGraph& g, const Catalog* cat = nullptr);

bool filter_matches(const SelectionFilter& f, const Value& v);

// ---------------------------------------------------------------------------
// Join trees and physical plans
// ---------------------------------------------------------------------------

/// Binary join tree: internal nodes are joins, leaves are table
/// references. Nodes are stored in preorder with the root at index 0;
/// child links are indices into the same vector. Immutable once built.
struct JoinTree {
    struct Node {
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::string table;  // leaves only

        bool is_leaf() const { return left < 0; }
    };

    std::vector<Node> nodes;

    static JoinTree leaf(std::string table);
    static JoinTree join(JoinTree left, JoinTree right);

    int leaf_count() const;
};

/// Join algorithm token reserved for nodes with no connecting predicate.
inline const std::string kCrossJoin = "CROSS";

/// Leaf access method; empty index means sequential scan.
struct AccessMethod {
    std::string index;

    bool is_index_scan() const { return !index.empty(); }
};

/// One node of a physical plan. Leaves carry a table reference and an
/// access method; internal nodes carry a join algorithm token and the
/// indices of the JoinGraph predicates they apply.
struct PlanNode {
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::string table;
    AccessMethod access;
    std::string algorithm;
    std::vector<std::size_t> predicates;

    bool is_leaf() const { return left < 0; }
};

/// Full binary operator tree, preorder storage, root at index 0.
struct PhysicalPlan {
    std::vector<PlanNode> nodes;

    static PhysicalPlan leaf(std::string table, AccessMethod access = {});
    static PhysicalPlan join(std::string algorithm, PhysicalPlan left, PhysicalPlan right,
                             std::vector<std::size_t> predicates = {});

    int leaf_count() const;
    int internal_count() const;
};

/// What the benchmarked engine can run.
struct BackendCapabilities {
    std::set<std::string> join_algorithms;
    bool supports_index_scan = true;
};

std::vector<std::string> validate_capabilities(const BackendCapabilities& caps);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Leaf table-reference set of the subtree rooted at `node`.
std::set<std::string> tables_of(const JoinTree& t, std::int32_t node);
std::set<std::string> tables_of(const PhysicalPlan& p, std::int32_t node);

/// Indices of predicates with one endpoint in each set. Empty result
/// signals a forced cross join. Throws std::invalid_argument if the
/// sets overlap.
std::vector<std::size_t> predicate_indices_between(const JoinGraph& g,
                                                   const std::set<std::string>& left,
                                                   const std::set<std::string>& right);

std::vector<JoinPredicate> predicates_between(const JoinGraph& g,
                                              const std::set<std::string>& left,
                                              const std::set<std::string>& right);

/// Plan skeleton for a join ordering: tables placed, each predicate
/// assigned to the lowest node separating its endpoints, cross nodes
/// tagged kCrossJoin. Join algorithms at non-cross nodes are left empty
/// and access methods default to sequential scan; samplers and
/// enumerators fill those in.
PhysicalPlan plan_skeleton(const JoinTree& t, const JoinGraph& g);

/// Indexes on base-table columns that appear in a join predicate or a
/// selection filter of this table reference.
std::vector<IndexInfo> applicable_indexes(const JoinGraph& g, const Catalog& cat,
                                          const TableRef& ref);

/// Full invariant check; returns human-readable violations, empty = ok.
/// Never throws.
std::vector<std::string> validate_plan(const PhysicalPlan& p, const JoinGraph& g,
                                       const BackendCapabilities& caps, const Catalog& cat);

/// Canonical plan serialization: tree shape, leaf tables, per-node join
/// algorithm, per-leaf access method. Left/right order is significant.
/// This string is the plan identity used by replay files and
/// miss-classification.
std::string fingerprint(const PhysicalPlan& p);

/// Fingerprint with algorithms and access methods erased; predicate
/// placement retained.
std::string logical_fingerprint(const PhysicalPlan& p);

/// Fingerprint with every operator annotation erased: tree shape plus
/// leaf permutation only.
std::string ordering_fingerprint(const PhysicalPlan& p);

}  // namespace optbench
