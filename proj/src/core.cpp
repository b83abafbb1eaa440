#include "optbench/core.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace optbench {

int compare_values(const Value& a, const Value& b) {
    if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
    if (std::holds_alternative<std::int64_t>(a)) {
        auto x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
        return x < y ? -1 : (x == y ? 0 : 1);
    }
    const auto& x = std::get<std::string>(a);
    const auto& y = std::get<std::string>(b);
    return x < y ? -1 : (x == y ? 0 : 1);
}

std::string value_to_string(const Value& v) {
    if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
    return std::get<std::string>(v);
}

bool TableInfo::has_column(const std::string& c) const {
    return std::find(columns.begin(), columns.end(), c) != columns.end();
}

const TableInfo* Catalog::find_table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return &t;
    return nullptr;
}

const TableInfo& Catalog::table(const std::string& name) const {
    const TableInfo* t = find_table(name);
    if (!t) throw std::invalid_argument("unknown table '" + name + "'");
    return *t;
}

std::vector<std::string> validate_catalog(const Catalog& cat) {
    std::vector<std::string> out;
    std::unordered_set<std::string> names;
    for (const auto& t : cat.tables) {
        if (!names.insert(t.name).second) out.push_back("duplicate table name '" + t.name + "'");
        if (t.row_count < 0) out.push_back("negative row_count for table '" + t.name + "'");
        std::unordered_set<std::string> cols;
        for (const auto& c : t.columns)
            if (!cols.insert(c).second)
                out.push_back("duplicate column '" + c + "' in table '" + t.name + "'");
        std::unordered_set<std::string> idx_names;
        for (const auto& ix : t.indexes) {
            if (!idx_names.insert(ix.name).second)
                out.push_back("duplicate index name '" + ix.name + "' on table '" + t.name + "'");
            if (!cols.count(ix.column))
                out.push_back("index '" + ix.name + "' references missing column '" + ix.column +
                              "' of table '" + t.name + "'");
            if (!ix.table.empty() && ix.table != t.name)
                out.push_back("index '" + ix.name + "' names foreign table '" + ix.table + "'");
        }
    }
    return out;
}

const TableRef* JoinGraph::find_ref(const std::string& name) const {
    for (const auto& r : tables)
        if (r.name() == name) return &r;
    return nullptr;
}

std::vector<std::string> validate_join_graph(const JoinGraph& g, const Catalog* cat) {
    std::vector<std::string> out;
    if (g.tables.empty()) out.push_back("query '" + g.query_id + "' has no tables");
    std::unordered_set<std::string> refs;
    for (const auto& r : g.tables) {
        if (!refs.insert(r.name()).second)
            out.push_back("duplicate table reference '" + r.name() + "' (self-joins need aliases)");
        if (cat && !cat->find_table(r.table))
            out.push_back("reference '" + r.name() + "' names unknown table '" + r.table + "'");
    }
    auto check_endpoint = [&](const std::string& ref, const std::string& col, const char* what) {
        if (!refs.count(ref)) {
            out.push_back(std::string(what) + " references unknown table '" + ref + "'");
            return;
        }
        if (cat) {
            const TableRef* r = g.find_ref(ref);
            const TableInfo* t = r ? cat->find_table(r->table) : nullptr;
            if (t && !t->has_column(col))
                out.push_back(std::string(what) + " references missing column '" + ref + "." + col + "'");
        }
    };
    for (const auto& p : g.predicates) {
        check_endpoint(p.left_table, p.left_column, "predicate");
        check_endpoint(p.right_table, p.right_column, "predicate");
        if (p.left_table == p.right_table)
            out.push_back("predicate joins table '" + p.left_table + "' with itself");
    }
    for (const auto& s : g.selections) check_endpoint(s.table, s.column, "selection");
    return out;
}

bool filter_matches(const SelectionFilter& f, const Value& v) {
    int c = compare_values(v, f.value);
    if (f.op == "=") return c == 0;
    if (f.op == "!=") return c != 0;
    if (f.op == "<") return c < 0;
    if (f.op == "<=") return c <= 0;
    if (f.op == ">") return c > 0;
    if (f.op == ">=") return c >= 0;
    throw std::invalid_argument("unknown comparison operator '" + f.op + "'");
}

// ---------------------------------------------------------------------------
// Trees
// ---------------------------------------------------------------------------

namespace {

// Appends `src` under a new root being assembled; returns index shift.
template <typename Node>
void append_shifted(std::vector<Node>& dst, const std::vector<Node>& src) {
    auto shift = static_cast<std::int32_t>(dst.size());
    for (const Node& n : src) {
        Node copy = n;
        if (copy.left >= 0) copy.left += shift;
        if (copy.right >= 0) copy.right += shift;
        dst.push_back(std::move(copy));
    }
}

}  // namespace

JoinTree JoinTree::leaf(std::string table) {
    JoinTree t;
    Node n;
    n.table = std::move(table);
    t.nodes.push_back(std::move(n));
    return t;
}

JoinTree JoinTree::join(JoinTree left, JoinTree right) {
    JoinTree t;
    Node root;
    root.left = 1;
    root.right = static_cast<std::int32_t>(1 + left.nodes.size());
    t.nodes.push_back(std::move(root));
    append_shifted(t.nodes, left.nodes);
    append_shifted(t.nodes, right.nodes);
    return t;
}

int JoinTree::leaf_count() const {
    int n = 0;
    for (const auto& node : nodes) n += node.is_leaf();
    return n;
}

PhysicalPlan PhysicalPlan::leaf(std::string table, AccessMethod access) {
    PhysicalPlan p;
    PlanNode n;
    n.table = std::move(table);
    n.access = std::move(access);
    p.nodes.push_back(std::move(n));
    return p;
}

PhysicalPlan PhysicalPlan::join(std::string algorithm, PhysicalPlan left, PhysicalPlan right,
                                std::vector<std::size_t> predicates) {
    PhysicalPlan p;
    PlanNode root;
    root.algorithm = std::move(algorithm);
    root.predicates = std::move(predicates);
    root.left = 1;
    root.right = static_cast<std::int32_t>(1 + left.nodes.size());
    p.nodes.push_back(std::move(root));
    append_shifted(p.nodes, left.nodes);
    append_shifted(p.nodes, right.nodes);
    return p;
}

int PhysicalPlan::leaf_count() const {
    int n = 0;
    for (const auto& node : nodes) n += node.is_leaf();
    return n;
}

int PhysicalPlan::internal_count() const {
    return static_cast<int>(nodes.size()) - leaf_count();
}

std::vector<std::string> validate_capabilities(const BackendCapabilities& caps) {
    std::vector<std::string> out;
    if (caps.join_algorithms.empty()) out.push_back("capabilities list no join algorithm");
    if (caps.join_algorithms.count(kCrossJoin))
        out.push_back("capabilities must not list the reserved cross-join token");
    return out;
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

namespace {

template <typename Tree>
void collect_tables(const Tree& t, std::int32_t node, std::set<std::string>& out) {
    const auto& n = t.nodes.at(static_cast<std::size_t>(node));
    if (n.is_leaf()) {
        out.insert(n.table);
        return;
    }
    collect_tables(t, n.left, out);
    collect_tables(t, n.right, out);
}

}  // namespace

std::set<std::string> tables_of(const JoinTree& t, std::int32_t node) {
    std::set<std::string> out;
    collect_tables(t, node, out);
    return out;
}

std::set<std::string> tables_of(const PhysicalPlan& p, std::int32_t node) {
    std::set<std::string> out;
    collect_tables(p, node, out);
    return out;
}

std::vector<std::size_t> predicate_indices_between(const JoinGraph& g,
                                                   const std::set<std::string>& left,
                                                   const std::set<std::string>& right) {
    for (const auto& name : left)
        if (right.count(name))
            throw std::invalid_argument("predicate_indices_between: sets overlap on '" + name + "'");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < g.predicates.size(); ++i) {
        const auto& p = g.predicates[i];
        bool fwd = left.count(p.left_table) && right.count(p.right_table);
        bool rev = left.count(p.right_table) && right.count(p.left_table);
        if (fwd || rev) out.push_back(i);
    }
    return out;
}

std::vector<JoinPredicate> predicates_between(const JoinGraph& g,
                                              const std::set<std::string>& left,
                                              const std::set<std::string>& right) {
    std::vector<JoinPredicate> out;
    for (std::size_t i : predicate_indices_between(g, left, right)) out.push_back(g.predicates[i]);
    return out;
}

namespace {

// Fills algorithm/predicates for the subtree rooted at `node`; returns its
// table set.
std::set<std::string> annotate_skeleton(PhysicalPlan& p, std::int32_t node, const JoinGraph& g) {
    auto& n = p.nodes[static_cast<std::size_t>(node)];
    if (n.is_leaf()) return {n.table};
    std::set<std::string> left = annotate_skeleton(p, n.left, g);
    std::set<std::string> right = annotate_skeleton(p, n.right, g);
    n.predicates = predicate_indices_between(g, left, right);
    n.algorithm = n.predicates.empty() ? kCrossJoin : std::string{};
    left.insert(right.begin(), right.end());
    return left;
}

}  // namespace

PhysicalPlan plan_skeleton(const JoinTree& t, const JoinGraph& g) {
    PhysicalPlan p;
    p.nodes.reserve(t.nodes.size());
    for (const auto& n : t.nodes) {
        PlanNode pn;
        pn.left = n.left;
        pn.right = n.right;
        pn.table = n.table;
        p.nodes.push_back(std::move(pn));
    }
    if (!p.nodes.empty()) annotate_skeleton(p, 0, g);
    return p;
}

std::vector<IndexInfo> applicable_indexes(const JoinGraph& g, const Catalog& cat,
                                          const TableRef& ref) {
    const TableInfo* t = cat.find_table(ref.table);
    if (!t) return {};
    std::set<std::string> hinted_columns;
    for (const auto& p : g.predicates) {
        if (p.left_table == ref.name()) hinted_columns.insert(p.left_column);
        if (p.right_table == ref.name()) hinted_columns.insert(p.right_column);
    }
    for (const auto& s : g.selections)
        if (s.table == ref.name()) hinted_columns.insert(s.column);
    std::vector<IndexInfo> out;
    for (const auto& ix : t->indexes)
        if (hinted_columns.count(ix.column)) out.push_back(ix);
    return out;
}

std::vector<std::string> validate_plan(const PhysicalPlan& p, const JoinGraph& g,
                                       const BackendCapabilities& caps, const Catalog& cat) {
    std::vector<std::string> out;
    if (p.nodes.empty()) return {"empty plan"};

    // Structural sanity before walking.
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        const auto& n = p.nodes[i];
        if ((n.left < 0) != (n.right < 0)) {
            out.push_back("node " + std::to_string(i) + " has exactly one child");
            return out;
        }
        if (!n.is_leaf() && (n.left >= static_cast<std::int32_t>(p.nodes.size()) ||
                             n.right >= static_cast<std::int32_t>(p.nodes.size()))) {
            out.push_back("node " + std::to_string(i) + " has an out-of-range child");
            return out;
        }
    }

    // Leaf multiset must be exactly the query's table references.
    std::vector<std::string> leaves;
    for (const auto& n : p.nodes)
        if (n.is_leaf()) leaves.push_back(n.table);
    std::set<std::string> leaf_set(leaves.begin(), leaves.end());
    if (leaf_set.size() != leaves.size()) out.push_back("a table appears in more than one leaf");
    for (const auto& r : g.tables)
        if (!leaf_set.count(r.name())) out.push_back("table '" + r.name() + "' missing from plan");
    for (const auto& name : leaf_set)
        if (!g.find_ref(name)) out.push_back("leaf '" + name + "' is not a table of the query");
    if (!out.empty()) return out;

    std::set<std::size_t> assigned;
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        const auto& n = p.nodes[i];
        if (n.is_leaf()) {
            if (n.access.is_index_scan()) {
                if (!caps.supports_index_scan)
                    out.push_back("index scan on '" + n.table + "' but backend has none");
                const TableRef* ref = g.find_ref(n.table);
                const TableInfo* t = ref ? cat.find_table(ref->table) : nullptr;
                bool found = false;
                if (t)
                    for (const auto& ix : t->indexes) found |= ix.name == n.access.index;
                if (!found)
                    out.push_back("leaf '" + n.table + "' names unknown index '" + n.access.index + "'");
            }
            continue;
        }
        auto left = tables_of(p, n.left);
        auto right = tables_of(p, n.right);
        auto expected = predicate_indices_between(g, left, right);
        bool connected = !expected.empty();
        if (n.algorithm == kCrossJoin) {
            if (connected)
                out.push_back("node " + std::to_string(i) + " is a cross join over connected subtrees");
            if (!n.predicates.empty())
                out.push_back("cross join node " + std::to_string(i) + " carries predicates");
        } else {
            if (!connected)
                out.push_back("node " + std::to_string(i) +
                              " joins disconnected subtrees: missing predicate");
            if (!caps.join_algorithms.count(n.algorithm))
                out.push_back("unsupported algorithm '" + n.algorithm + "' at node " +
                              std::to_string(i));
            std::vector<std::size_t> got = n.predicates;
            std::sort(got.begin(), got.end());
            if (got != expected)
                out.push_back("node " + std::to_string(i) +
                              " does not carry exactly its separating predicates");
        }
        for (std::size_t ix : n.predicates)
            if (!assigned.insert(ix).second)
                out.push_back("predicate " + std::to_string(ix) + " assigned twice");
    }
    for (std::size_t i = 0; i < g.predicates.size(); ++i)
        if (!assigned.count(i)) out.push_back("predicate " + std::to_string(i) + " never applied");
    return out;
}

// ---------------------------------------------------------------------------
// Fingerprints
// ---------------------------------------------------------------------------

namespace {

enum class FpMode { Physical, Logical, Ordering };

void fingerprint_walk(const PhysicalPlan& p, std::int32_t node, FpMode mode, std::string& out) {
    const auto& n = p.nodes[static_cast<std::size_t>(node)];
    if (n.is_leaf()) {
        out += "T(";
        out += n.table;
        if (mode == FpMode::Physical) {
            out += n.access.is_index_scan() ? ":ix:" + n.access.index : ":seq";
        }
        out += ')';
        return;
    }
    out += "J(";
    if (mode == FpMode::Physical) {
        out += n.algorithm;
    } else if (mode == FpMode::Logical) {
        std::vector<std::size_t> preds = n.predicates;
        std::sort(preds.begin(), preds.end());
        out += 'p';
        for (std::size_t ix : preds) {
            out += std::to_string(ix);
            out += ',';
        }
    }
    out += ';';
    fingerprint_walk(p, n.left, mode, out);
    out += ';';
    fingerprint_walk(p, n.right, mode, out);
    out += ')';
}

std::string fingerprint_impl(const PhysicalPlan& p, FpMode mode) {
    std::string out;
    out.reserve(p.nodes.size() * 12);
    if (!p.nodes.empty()) fingerprint_walk(p, 0, mode, out);
    return out;
}

}  // namespace

std::string fingerprint(const PhysicalPlan& p) { return fingerprint_impl(p, FpMode::Physical); }

std::string logical_fingerprint(const PhysicalPlan& p) {
    return fingerprint_impl(p, FpMode::Logical);
}

std::string ordering_fingerprint(const PhysicalPlan& p) {
    return fingerprint_impl(p, FpMode::Ordering);
}

}  // namespace optbench
