#include "optbench/toy_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string_view>

#include "optbench/error.hpp"
#include "optbench/plan_sampler.hpp"
#include "optbench/tree_sampler.hpp"

namespace optbench {

BackendCapabilities default_toy_capabilities() {
    return BackendCapabilities{{kNestedLoop, kHashJoin, kMergeJoin}, true};
}

// ---------------------------------------------------------------------------
// Work units
// ---------------------------------------------------------------------------

namespace {

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) return std::numeric_limits<std::int64_t>::max();
    return r;
}

std::int64_t sat_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) return std::numeric_limits<std::int64_t>::max();
    return r;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::int64_t sort_work(std::int64_t n) {
    if (n <= 0) return 0;
    std::int64_t levels = 1;
    while ((std::int64_t{1} << levels) <= n) ++levels;  // floor(log2 n) + 1
    return sat_mul(n, levels);
}

std::int64_t join_work(const std::string& algorithm, std::int64_t left_rows,
                       std::int64_t right_rows, std::int64_t matches) {
    if (algorithm == kHashJoin)
        return sat_add(sat_add(left_rows, sat_mul(2, right_rows)), matches);
    if (algorithm == kMergeJoin)
        return sat_add(sat_add(sat_add(sort_work(left_rows), sort_work(right_rows)),
                               sat_add(left_rows, right_rows)),
                       matches);
    // Nested loop and cross join probe every pair.
    return sat_mul(left_rows, right_rows);
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

ToyEngine::ToyEngine(Catalog catalog, Dataset data)
    : catalog_(std::move(catalog)), data_(std::move(data)) {
    auto violations = validate_catalog(catalog_);
    if (!violations.empty()) throw std::invalid_argument("catalog: " + violations.front());
    for (const auto& t : catalog_.tables) {
        auto it = data_.find(t.name);
        if (it == data_.end()) throw ExecutionError("no data loaded for table '" + t.name + "'");
        const Relation& rel = it->second;
        if (rel.columns != t.columns)
            throw ExecutionError("column mismatch between catalog and data for '" + t.name + "'");
        if (static_cast<std::int64_t>(rel.rows.size()) != t.row_count)
            throw ExecutionError("row_count mismatch for '" + t.name + "'");
        for (const auto& ix : t.indexes) {
            auto col = std::find(t.columns.begin(), t.columns.end(), ix.column);
            auto col_idx = static_cast<std::size_t>(col - t.columns.begin());
            HashIndex& index = indexes_[{t.name, ix.column}];
            for (std::size_t r = 0; r < rel.rows.size(); ++r)
                index[rel.rows[r][col_idx]].push_back(r);
        }
    }
}

const std::vector<std::size_t>* ToyEngine::index_lookup(const std::string& table,
                                                        const std::string& column,
                                                        const Value& v) const {
    auto it = indexes_.find({table, column});
    if (it == indexes_.end()) throw ExecutionError("no index on " + table + "." + column);
    auto bucket = it->second.find(v);
    return bucket == it->second.end() ? nullptr : &bucket->second;
}

bool ToyEngine::has_index(const std::string& table, const std::string& column) const {
    return indexes_.count({table, column}) > 0;
}

namespace {

struct EvalOutput {
    std::vector<std::string> columns;  // qualified ref.column
    std::vector<std::vector<Value>> rows;
};

std::size_t column_index(const std::vector<std::string>& columns, const std::string& qualified) {
    auto it = std::find(columns.begin(), columns.end(), qualified);
    if (it == columns.end()) throw ExecutionError("unresolved column '" + qualified + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

struct VectorValueLess {
    bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
        for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
            int c = compare_values(a[i], b[i]);
            if (c != 0) return c < 0;
        }
        return a.size() < b.size();
    }
};

class PlanExecutor {
public:
    PlanExecutor(const ToyEngine& engine, const PhysicalPlan& plan, const JoinGraph& graph)
        : engine_(engine), plan_(plan), graph_(graph) {
        node_work_.assign(plan.nodes.size(), 0);
    }

    ExecutionResult run() {
        EvalOutput out = eval(0);
        ExecutionResult result;
        result.node_work = node_work_;
        for (std::int64_t w : node_work_) result.work = sat_add(result.work, w);
        result.output_rows = static_cast<std::int64_t>(out.rows.size());
        result.digest = digest_of(out);
        return result;
    }

private:
    EvalOutput eval(std::int32_t node_index) {
        const PlanNode& node = plan_.nodes[static_cast<std::size_t>(node_index)];
        return node.is_leaf() ? eval_leaf(node_index, node) : eval_join(node_index, node);
    }

    EvalOutput eval_leaf(std::int32_t node_index, const PlanNode& node) {
        const TableRef* ref = graph_.find_ref(node.table);
        if (!ref) throw ExecutionError("leaf '" + node.table + "' not in the query");
        auto data_it = engine_.data().find(ref->table);
        if (data_it == engine_.data().end())
            throw ExecutionError("missing table '" + ref->table + "'");
        const Relation& base = data_it->second;

        EvalOutput out;
        out.columns.reserve(base.columns.size());
        for (const auto& c : base.columns) out.columns.push_back(ref->name() + "." + c);

        // Selections bound to this reference, as (column index, filter).
        std::vector<std::pair<std::size_t, const SelectionFilter*>> filters;
        for (const auto& s : graph_.selections)
            if (s.table == ref->name())
                filters.emplace_back(column_index(out.columns, s.table + "." + s.column), &s);
        auto passes = [&](const std::vector<Value>& row) {
            for (auto& [idx, f] : filters)
                if (!filter_matches(*f, row[idx])) return false;
            return true;
        };

        std::int64_t base_rows = static_cast<std::int64_t>(base.rows.size());
        auto& work = node_work_[static_cast<std::size_t>(node_index)];
        if (!node.access.is_index_scan()) {
            for (const auto& row : base.rows)
                if (passes(row)) out.rows.push_back(row);
            work = base_rows;
            return out;
        }

        const TableInfo& info = engine_.catalog().table(ref->table);
        const IndexInfo* ix = nullptr;
        for (const auto& candidate : info.indexes)
            if (candidate.name == node.access.index) ix = &candidate;
        if (!ix) throw ExecutionError("unknown index '" + node.access.index + "'");

        // An equality selection on the indexed column turns the scan into a
        // single bucket lookup; otherwise the index degrades to a full pass.
        const SelectionFilter* eq = nullptr;
        for (const auto& s : graph_.selections)
            if (s.table == ref->name() && s.column == ix->column && s.op == "=") eq = &s;
        if (eq) {
            const auto* bucket = engine_.index_lookup(ref->table, ix->column, eq->value);
            std::int64_t bucket_rows = bucket ? static_cast<std::int64_t>(bucket->size()) : 0;
            if (bucket)
                for (std::size_t r : *bucket)
                    if (passes(base.rows[r])) out.rows.push_back(base.rows[r]);
            work = 1 + bucket_rows;
        } else {
            for (const auto& row : base.rows)
                if (passes(row)) out.rows.push_back(row);
            work = 1 + base_rows;
        }
        return out;
    }

    EvalOutput eval_join(std::int32_t node_index, const PlanNode& node) {
        EvalOutput left = eval(node.left);
        EvalOutput right = eval(node.right);

        // (left column index, right column index) per assigned predicate,
        // flipped so the first endpoint is on the left side.
        std::vector<std::pair<std::size_t, std::size_t>> keys;
        for (std::size_t pi : node.predicates) {
            const JoinPredicate& p = graph_.predicates[pi];
            std::string lq = p.left_table + "." + p.left_column;
            std::string rq = p.right_table + "." + p.right_column;
            bool left_holds_left =
                std::find(left.columns.begin(), left.columns.end(), lq) != left.columns.end();
            if (left_holds_left)
                keys.emplace_back(column_index(left.columns, lq), column_index(right.columns, rq));
            else
                keys.emplace_back(column_index(left.columns, rq), column_index(right.columns, lq));
        }

        EvalOutput out;
        out.columns = left.columns;
        out.columns.insert(out.columns.end(), right.columns.begin(), right.columns.end());

        auto l = static_cast<std::int64_t>(left.rows.size());
        auto r = static_cast<std::int64_t>(right.rows.size());
        auto emit = [&](const std::vector<Value>& lr, const std::vector<Value>& rr) {
            std::vector<Value> row = lr;
            row.insert(row.end(), rr.begin(), rr.end());
            out.rows.push_back(std::move(row));
        };

        if (node.algorithm == kHashJoin) {
            std::map<std::vector<Value>, std::vector<std::size_t>, VectorValueLess> table;
            for (std::size_t i = 0; i < right.rows.size(); ++i) {
                std::vector<Value> key;
                for (auto& [lk, rk] : keys) key.push_back(right.rows[i][rk]);
                table[std::move(key)].push_back(i);
            }
            for (const auto& lr : left.rows) {
                std::vector<Value> key;
                for (auto& [lk, rk] : keys) key.push_back(lr[lk]);
                auto bucket = table.find(key);
                if (bucket == table.end()) continue;
                for (std::size_t i : bucket->second) emit(lr, right.rows[i]);
            }
        } else if (node.algorithm == kMergeJoin) {
            auto key_less = [&](bool left_side) {
                return [&, left_side](const std::vector<Value>& a, const std::vector<Value>& b) {
                    for (auto& [lk, rk] : keys) {
                        std::size_t k = left_side ? lk : rk;
                        int c = compare_values(a[k], b[k]);
                        if (c != 0) return c < 0;
                    }
                    return false;
                };
            };
            std::sort(left.rows.begin(), left.rows.end(), key_less(true));
            std::sort(right.rows.begin(), right.rows.end(), key_less(false));
            auto key_compare = [&](const std::vector<Value>& a, const std::vector<Value>& b) {
                for (auto& [lk, rk] : keys) {
                    int c = compare_values(a[lk], b[rk]);
                    if (c != 0) return c;
                }
                return 0;
            };
            std::size_t i = 0, j = 0;
            while (i < left.rows.size() && j < right.rows.size()) {
                int c = key_compare(left.rows[i], right.rows[j]);
                if (c < 0) {
                    ++i;
                } else if (c > 0) {
                    ++j;
                } else {
                    // Equal-key block on both sides.
                    std::size_t i_end = i, j_end = j;
                    while (i_end < left.rows.size() &&
                           key_compare(left.rows[i_end], right.rows[j]) == 0)
                        ++i_end;
                    while (j_end < right.rows.size() &&
                           key_compare(left.rows[i], right.rows[j_end]) == 0)
                        ++j_end;
                    for (std::size_t a = i; a < i_end; ++a)
                        for (std::size_t b = j; b < j_end; ++b) emit(left.rows[a], right.rows[b]);
                    i = i_end;
                    j = j_end;
                }
            }
        } else {
            // Nested loop; cross join is the no-predicate case.
            for (const auto& lr : left.rows) {
                for (const auto& rr : right.rows) {
                    bool match = true;
                    for (auto& [lk, rk] : keys) match &= compare_values(lr[lk], rr[rk]) == 0;
                    if (match) emit(lr, rr);
                }
            }
        }

        auto matches = static_cast<std::int64_t>(out.rows.size());
        node_work_[static_cast<std::size_t>(node_index)] = join_work(node.algorithm, l, r, matches);
        return out;
    }

    Digest digest_of(const EvalOutput& out) {
        // Column order varies across plans: hash (name, value) pairs sorted
        // by qualified name so every equivalent plan digests identically.
        std::vector<std::size_t> order(out.columns.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return out.columns[a] < out.columns[b]; });
        Digest d;
        std::string buffer;
        for (const auto& row : out.rows) {
            buffer.clear();
            for (std::size_t i : order) {
                buffer += out.columns[i];
                buffer += '=';
                buffer += value_to_string(row[i]);
                buffer += ';';
            }
            std::uint64_t h = fnv1a(buffer);
            d.sum += h;
            d.mix += h * h;
        }
        d.rows = static_cast<std::int64_t>(out.rows.size());
        return d;
    }

    const ToyEngine& engine_;
    const PhysicalPlan& plan_;
    const JoinGraph& graph_;
    std::vector<std::int64_t> node_work_;
};

}  // namespace

ExecutionResult ToyEngine::execute(const PhysicalPlan& p, const JoinGraph& g) const {
    if (p.nodes.empty()) throw ExecutionError("empty plan");
    return PlanExecutor(*this, p, g).run();
}

// ---------------------------------------------------------------------------
// QueryStats
// ---------------------------------------------------------------------------

QueryStats::QueryStats(const ToyEngine& engine, const JoinGraph& g) : engine_(engine), graph_(g) {
    if (g.tables.size() > 31) throw std::invalid_argument("QueryStats: too many tables");
    for (std::size_t i = 0; i < g.tables.size(); ++i)
        table_bit_[g.tables[i].name()] = 1u << i;
    for (const auto& p : g.predicates)
        predicate_masks_.push_back(table_bit_.at(p.left_table) | table_bit_.at(p.right_table));
}

std::uint32_t QueryStats::mask_of_table(const std::string& ref_name) const {
    return table_bit_.at(ref_name);
}

namespace {

// Filtered base rows of one reference, qualified columns omitted (we
// only ever look up columns by unqualified name + ref here).
std::vector<std::vector<Value>> filtered_rows(const ToyEngine& engine, const JoinGraph& g,
                                              const TableRef& ref) {
    const Relation& base = engine.data().at(ref.table);
    std::vector<std::pair<std::size_t, const SelectionFilter*>> filters;
    for (const auto& s : g.selections) {
        if (s.table != ref.name()) continue;
        auto it = std::find(base.columns.begin(), base.columns.end(), s.column);
        if (it == base.columns.end())
            throw ExecutionError("selection on missing column '" + s.column + "'");
        filters.emplace_back(static_cast<std::size_t>(it - base.columns.begin()), &s);
    }
    std::vector<std::vector<Value>> out;
    for (const auto& row : base.rows) {
        bool ok = true;
        for (auto& [idx, f] : filters) ok &= filter_matches(*f, row[idx]);
        if (ok) out.push_back(row);
    }
    return out;
}

}  // namespace

std::int64_t QueryStats::materialize_connected_card(std::uint32_t mask) {
    // Incremental nested-loop join over the subset, pulling in one
    // connected table at a time; every predicate internal to the subset
    // gets applied exactly once.
    std::vector<int> members;
    for (std::size_t i = 0; i < graph_.tables.size(); ++i)
        if (mask & (1u << i)) members.push_back(static_cast<int>(i));

    struct Bound {
        std::vector<std::string> columns;  // qualified
        std::vector<std::vector<Value>> rows;
    };
    auto bind = [&](int t) {
        Bound b;
        const TableRef& ref = graph_.tables[static_cast<std::size_t>(t)];
        const Relation& base = engine_.data().at(ref.table);
        for (const auto& c : base.columns) b.columns.push_back(ref.name() + "." + c);
        b.rows = filtered_rows(engine_, graph_, ref);
        return b;
    };

    Bound acc = bind(members.front());
    std::uint32_t joined = 1u << members.front();
    while (joined != mask) {
        int next = -1;
        for (int t : members) {
            if (joined & (1u << t)) continue;
            for (std::size_t pi = 0; pi < predicate_masks_.size(); ++pi) {
                std::uint32_t pm = predicate_masks_[pi];
                if ((pm & joined) && (pm & (1u << t))) {
                    next = t;
                    break;
                }
            }
            if (next >= 0) break;
        }
        if (next < 0) throw std::logic_error("materialize_connected_card: subset not connected");

        Bound rhs = bind(next);
        std::vector<std::pair<std::size_t, std::size_t>> keys;
        for (std::size_t pi = 0; pi < graph_.predicates.size(); ++pi) {
            std::uint32_t pm = predicate_masks_[pi];
            if (!((pm & joined) && (pm & (1u << next)))) continue;
            const JoinPredicate& p = graph_.predicates[pi];
            std::string lq = p.left_table + "." + p.left_column;
            std::string rq = p.right_table + "." + p.right_column;
            bool acc_holds_left =
                std::find(acc.columns.begin(), acc.columns.end(), lq) != acc.columns.end();
            const std::string& aq = acc_holds_left ? lq : rq;
            const std::string& bq = acc_holds_left ? rq : lq;
            keys.emplace_back(column_index(acc.columns, aq), column_index(rhs.columns, bq));
        }

        Bound merged;
        merged.columns = acc.columns;
        merged.columns.insert(merged.columns.end(), rhs.columns.begin(), rhs.columns.end());
        for (const auto& ar : acc.rows) {
            for (const auto& br : rhs.rows) {
                bool match = true;
                for (auto& [ak, bk] : keys) match &= compare_values(ar[ak], br[bk]) == 0;
                if (!match) continue;
                std::vector<Value> row = ar;
                row.insert(row.end(), br.begin(), br.end());
                merged.rows.push_back(std::move(row));
            }
        }
        acc = std::move(merged);
        joined |= 1u << next;
    }
    return static_cast<std::int64_t>(acc.rows.size());
}

std::int64_t QueryStats::card(std::uint32_t mask) {
    if (mask == 0) return 1;
    auto it = card_cache_.find(mask);
    if (it != card_cache_.end()) return it->second;

    std::int64_t result;
    int bits = __builtin_popcount(mask);
    if (bits == 1) {
        int t = __builtin_ctz(mask);
        result = static_cast<std::int64_t>(
            filtered_rows(engine_, graph_, graph_.tables[static_cast<std::size_t>(t)]).size());
    } else {
        // Split off the connected component of the lowest member; a
        // disconnected subset factors into a product.
        std::uint32_t component = 1u << __builtin_ctz(mask);
        for (;;) {
            std::uint32_t grown = component;
            for (std::uint32_t pm : predicate_masks_)
                if ((pm & component) && (pm & mask)) grown |= pm & mask;
            if (grown == component) break;
            component = grown;
        }
        if (component == mask)
            result = materialize_connected_card(mask);
        else
            result = sat_mul(card(component), card(mask & ~component));
    }
    card_cache_.emplace(mask, result);
    return result;
}

std::int64_t QueryStats::leaf_work(const PlanNode& leaf) {
    const TableRef* ref = graph_.find_ref(leaf.table);
    if (!ref) throw ExecutionError("leaf '" + leaf.table + "' not in the query");
    auto base_rows =
        static_cast<std::int64_t>(engine_.data().at(ref->table).rows.size());
    if (!leaf.access.is_index_scan()) return base_rows;

    const TableInfo& info = engine_.catalog().table(ref->table);
    const IndexInfo* ix = nullptr;
    for (const auto& candidate : info.indexes)
        if (candidate.name == leaf.access.index) ix = &candidate;
    if (!ix) throw ExecutionError("unknown index '" + leaf.access.index + "'");
    for (const auto& s : graph_.selections) {
        if (s.table == ref->name() && s.column == ix->column && s.op == "=") {
            const auto* bucket = engine_.index_lookup(ref->table, ix->column, s.value);
            return 1 + (bucket ? static_cast<std::int64_t>(bucket->size()) : 0);
        }
    }
    return 1 + base_rows;
}

namespace {

struct WorkWalk {
    QueryStats& stats;
    const PhysicalPlan& plan;
    std::vector<std::int64_t>& works;

    std::uint32_t visit(std::int32_t index) {
        const PlanNode& n = plan.nodes[static_cast<std::size_t>(index)];
        if (n.is_leaf()) {
            works[static_cast<std::size_t>(index)] = stats.leaf_work(n);
            return stats.mask_of_table(n.table);
        }
        std::uint32_t lm = visit(n.left);
        std::uint32_t rm = visit(n.right);
        std::int64_t matches = stats.card(lm | rm);
        works[static_cast<std::size_t>(index)] =
            join_work(n.algorithm, stats.card(lm), stats.card(rm), matches);
        return lm | rm;
    }
};

}  // namespace

std::vector<std::int64_t> QueryStats::node_works(const PhysicalPlan& p) {
    std::vector<std::int64_t> works(p.nodes.size(), 0);
    if (!p.nodes.empty()) WorkWalk{*this, p, works}.visit(0);
    return works;
}

std::int64_t QueryStats::plan_work(const PhysicalPlan& p) {
    std::int64_t total = 0;
    for (std::int64_t w : node_works(p)) total = sat_add(total, w);
    return total;
}

std::int64_t QueryStats::min_access_work(int table_index, const BackendCapabilities& caps) {
    const TableRef& ref = graph_.tables[static_cast<std::size_t>(table_index)];
    PlanNode leaf;
    leaf.table = ref.name();
    std::int64_t best = leaf_work(leaf);  // sequential scan
    if (caps.supports_index_scan) {
        for (const auto& ix : applicable_indexes(graph_, engine_.catalog(), ref)) {
            leaf.access.index = ix.name;
            best = std::min(best, leaf_work(leaf));
        }
    }
    return best;
}

std::int64_t QueryStats::min_space_work(const BackendCapabilities& caps) {
    int n = graph_.table_count();
    auto full = static_cast<std::uint32_t>((1u << n) - 1);
    std::vector<std::int64_t> dp(full + 1, std::numeric_limits<std::int64_t>::max());
    for (int t = 0; t < n; ++t) dp[1u << t] = min_access_work(t, caps);

    std::vector<std::string> algorithms(caps.join_algorithms.begin(), caps.join_algorithms.end());
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        if (__builtin_popcount(mask) < 2) continue;
        std::int64_t matches = card(mask);
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        // Every ordered (left, right) split shows up because submask
        // enumeration visits both a subset and its complement.
        for (std::uint32_t left = (mask - 1) & mask; left; left = (left - 1) & mask) {
            std::uint32_t right = mask & ~left;
            bool connected = false;
            for (std::uint32_t pm : predicate_masks_)
                if ((pm & left) && (pm & right)) connected = true;
            std::int64_t lc = card(left), rc = card(right);
            std::int64_t children = sat_add(dp[left], dp[right]);
            if (connected) {
                for (const auto& algo : algorithms)
                    best = std::min(best, sat_add(children, join_work(algo, lc, rc, matches)));
            } else {
                best = std::min(best, sat_add(children, join_work(kCrossJoin, lc, rc, matches)));
            }
        }
        dp[mask] = best;
    }
    return dp[full];
}

// ---------------------------------------------------------------------------
// Plan-space enumeration
// ---------------------------------------------------------------------------

namespace {

TreeShape compose_shapes(const TreeShape& left, const TreeShape& right) {
    TreeShape t;
    TreeShape::Node root;
    root.left = 1;
    root.right = static_cast<std::int32_t>(1 + left.nodes.size());
    t.nodes.push_back(root);
    std::int32_t left_leaves = left.leaf_count();
    auto append = [&t](const TreeShape& src, std::int32_t index_shift, std::int32_t slot_shift) {
        for (auto n : src.nodes) {
            if (n.left >= 0) n.left += index_shift;
            if (n.right >= 0) n.right += index_shift;
            if (n.leaf_slot >= 0) n.leaf_slot += slot_shift;
            t.nodes.push_back(n);
        }
    };
    append(left, 1, 0);
    append(right, static_cast<std::int32_t>(1 + left.nodes.size()), left_leaves);
    return t;
}

}  // namespace

std::vector<TreeShape> enumerate_tree_shapes(int n) {
    if (n < 1) throw std::invalid_argument("enumerate_tree_shapes: n must be >= 1");
    std::vector<std::vector<TreeShape>> memo(static_cast<std::size_t>(n) + 1);
    TreeShape leaf;
    leaf.nodes.push_back(TreeShape::Node{-1, -1, 0});
    memo[1].push_back(leaf);
    for (int size = 2; size <= n; ++size)
        for (int left = 1; left < size; ++left)
            for (const auto& ls : memo[static_cast<std::size_t>(left)])
                for (const auto& rs : memo[static_cast<std::size_t>(size - left)])
                    memo[static_cast<std::size_t>(size)].push_back(compose_shapes(ls, rs));
    return memo[static_cast<std::size_t>(n)];
}

namespace {

// Option lists for every free choice in a skeleton, in node order.
struct ChoicePoint {
    std::size_t node;
    std::vector<std::string> options;  // algorithm tokens, or index names ("" = seq scan)
    bool is_access = false;
};

void expand_physical(PhysicalPlan& skeleton, const std::vector<ChoicePoint>& points,
                     std::size_t depth, const std::function<void(const PhysicalPlan&)>& fn) {
    if (depth == points.size()) {
        fn(skeleton);
        return;
    }
    const ChoicePoint& cp = points[depth];
    for (const auto& option : cp.options) {
        if (cp.is_access)
            skeleton.nodes[cp.node].access.index = option;
        else
            skeleton.nodes[cp.node].algorithm = option;
        expand_physical(skeleton, points, depth + 1, fn);
    }
}

}  // namespace

void for_each_ordering(const JoinGraph& g, const std::function<void(const JoinTree&)>& fn,
                       int bound) {
    int n = g.table_count();
    if (n > bound)
        throw EnumerationLimitError("plan space enumeration refused: " + std::to_string(n) +
                                    " tables exceeds bound " + std::to_string(bound));
    if (n < 1) throw std::invalid_argument("query has no tables");
    auto shapes = enumerate_tree_shapes(n);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (const auto& shape : shapes) {
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        do {
            std::vector<TableRef> permutation;
            permutation.reserve(static_cast<std::size_t>(n));
            for (int i : order) permutation.push_back(g.tables[static_cast<std::size_t>(i)]);
            fn(fill_leaves(shape, permutation));
        } while (std::next_permutation(order.begin(), order.end()));
    }
}

void for_each_plan(const JoinGraph& g, const BackendCapabilities& caps, const Catalog& cat,
                   const std::function<void(const PhysicalPlan&)>& fn, int bound) {
    std::vector<std::string> algorithms(caps.join_algorithms.begin(), caps.join_algorithms.end());
    std::map<std::string, std::vector<std::string>> access_options;
    for (const auto& ref : g.tables) {
        std::vector<std::string> options{""};
        if (caps.supports_index_scan)
            for (const auto& ix : applicable_indexes(g, cat, ref)) options.push_back(ix.name);
        access_options[ref.name()] = std::move(options);
    }

    for_each_ordering(
        g,
        [&](const JoinTree& tree) {
            PhysicalPlan skeleton = plan_skeleton(tree, g);
            std::vector<ChoicePoint> points;
            for (std::size_t i = 0; i < skeleton.nodes.size(); ++i) {
                const PlanNode& node = skeleton.nodes[i];
                if (node.is_leaf()) {
                    const auto& options = access_options.at(node.table);
                    if (options.size() > 1) points.push_back({i, options, true});
                } else if (node.algorithm.empty()) {
                    points.push_back({i, algorithms, false});
                }
            }
            expand_physical(skeleton, points, 0, fn);
        },
        bound);
}

std::vector<PhysicalPlan> enumerate_plan_space(const JoinGraph& g, const BackendCapabilities& caps,
                                               const Catalog& cat, int bound) {
    std::vector<PhysicalPlan> out;
    std::set<std::string> seen;
    for_each_plan(
        g, caps, cat,
        [&](const PhysicalPlan& p) {
            if (seen.insert(fingerprint(p)).second) out.push_back(p);
        },
        bound);
    return out;
}

std::int64_t plan_space_size(const JoinGraph& g, const BackendCapabilities& caps,
                             const Catalog& cat, int bound) {
    std::int64_t count = 0;
    for_each_plan(g, caps, cat, [&](const PhysicalPlan&) { ++count; }, bound);
    return count;
}

double exact_performance_factor(const JoinGraph& g, const PhysicalPlan& chosen,
                                const ToyEngine& engine, const BackendCapabilities& caps,
                                int bound) {
    QueryStats stats(engine, g);
    std::int64_t chosen_work = stats.plan_work(chosen);
    std::int64_t total = 0, at_least = 0;
    for_each_plan(
        g, caps, engine.catalog(),
        [&](const PhysicalPlan& p) {
            ++total;
            if (stats.plan_work(p) >= chosen_work) ++at_least;
        },
        bound);
    return static_cast<double>(at_least) / static_cast<double>(total);
}

std::int64_t count_work_ties(const JoinGraph& g, const PhysicalPlan& plan, const ToyEngine& engine,
                             const BackendCapabilities& caps, int bound) {
    QueryStats stats(engine, g);
    std::int64_t target = stats.plan_work(plan);
    std::int64_t ties = 0;
    for_each_plan(
        g, caps, engine.catalog(),
        [&](const PhysicalPlan& p) { ties += stats.plan_work(p) == target; }, bound);
    return ties;
}

// ---------------------------------------------------------------------------
// Cost models
// ---------------------------------------------------------------------------

double TruthfulCostModel::cost(const PhysicalPlan& p, QueryStats& stats) const {
    return static_cast<double>(stats.plan_work(p));
}

NoisyCostModel::NoisyCostModel(std::uint64_t seed, double sigma) : seed_(seed), sigma_(sigma) {}

double NoisyCostModel::factor(const std::string& node_kind) const {
    auto it = factors_.find(node_kind);
    if (it != factors_.end()) return it->second;
    Rng rng(derive_seed(seed_, fnv1a(node_kind)));
    double u1 = 1.0 - rng.next_unit();  // (0, 1]
    double u2 = rng.next_unit();
    double gauss = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    double f = std::exp(sigma_ * gauss);
    factors_.emplace(node_kind, f);
    return f;
}

double NoisyCostModel::cost(const PhysicalPlan& p, QueryStats& stats) const {
    std::vector<std::int64_t> works = stats.node_works(p);
    double total = 0;
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        const PlanNode& n = p.nodes[i];
        const std::string kind =
            n.is_leaf() ? (n.access.is_index_scan() ? "IndexScan" : "SeqScan") : n.algorithm;
        total += static_cast<double>(works[i]) * factor(kind);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Optimizers
// ---------------------------------------------------------------------------

Strategy strategy_from_name(const std::string& name) {
    if (name == "exhaustive") return Strategy::Exhaustive;
    if (name == "greedy") return Strategy::GreedyLeftDeep;
    if (name == "random") return Strategy::UniformRandom;
    if (name == "adversarial") return Strategy::AdversarialWorst;
    throw ConfigurationError("unknown optimizer strategy '" + name + "'");
}

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Exhaustive: return "exhaustive";
        case Strategy::GreedyLeftDeep: return "greedy";
        case Strategy::UniformRandom: return "random";
        case Strategy::AdversarialWorst: return "adversarial";
    }
    return "?";
}

namespace {

struct CostingScope {
    OptimizeResult& result;
    QueryStats& stats;
    const CostModel& model;
    const OptimizeOptions& options;
    double work = 0;
    bool track_logical = false;  // greedy derives #LP from the costed set
    std::set<std::string> logical_seen;

    double cost_plan(const PhysicalPlan& p) {
        double c = model.cost(p, stats);
        *result.counters.physical_plans += 1;
        if (!p.nodes.front().is_leaf()) *result.counters.physical_join_plans += 1;
        if (track_logical) logical_seen.insert(logical_fingerprint(p));
        work += static_cast<double>(p.nodes.size());
        if (options.record_considered) result.considered.push_back(fingerprint(p));
        return c;
    }
};

std::vector<std::string> access_alternatives(const JoinGraph& g, const Catalog& cat,
                                             const BackendCapabilities& caps,
                                             const TableRef& ref) {
    std::vector<std::string> options{""};
    if (caps.supports_index_scan)
        for (const auto& ix : applicable_indexes(g, cat, ref)) options.push_back(ix.name);
    return options;
}

void optimize_full_scan(bool pick_max, const JoinGraph& g, const ToyEngine& engine,
                        const BackendCapabilities& caps, CostingScope& scope,
                        OptimizeResult& result, int bound) {
    bool have = false;
    double best_cost = 0;
    for_each_ordering(
        g,
        [&](const JoinTree& tree) {
            *result.counters.join_orderings += 1;
            *result.counters.logical_plans += 1;  // one logical plan per ordering:
                                                  // predicate placement is determined
            scope.work += static_cast<double>(tree.nodes.size());
            PhysicalPlan skeleton = plan_skeleton(tree, g);
            std::vector<ChoicePoint> points;
            std::vector<std::string> algorithms(caps.join_algorithms.begin(),
                                                caps.join_algorithms.end());
            for (std::size_t i = 0; i < skeleton.nodes.size(); ++i) {
                const PlanNode& node = skeleton.nodes[i];
                if (node.is_leaf()) {
                    auto options =
                        access_alternatives(g, engine.catalog(), caps, *g.find_ref(node.table));
                    if (options.size() > 1) points.push_back({i, options, true});
                } else if (node.algorithm.empty()) {
                    points.push_back({i, algorithms, false});
                }
            }
            expand_physical(skeleton, points, 0, [&](const PhysicalPlan& p) {
                double c = scope.cost_plan(p);
                bool better = !have || (pick_max ? c > best_cost : c < best_cost);
                if (better) {
                    best_cost = c;
                    result.plan = p;
                    have = true;
                }
            });
        },
        bound);
}

void optimize_greedy(const JoinGraph& g, const ToyEngine& engine, const BackendCapabilities& caps,
                     CostingScope& scope, OptimizeResult& result) {
    int n = g.table_count();
    const Catalog& cat = engine.catalog();

    auto leaf_plan = [&](int t, const std::string& index) {
        AccessMethod am;
        am.index = index;
        return PhysicalPlan::leaf(g.tables[static_cast<std::size_t>(t)].name(), am);
    };

    if (n == 1) {
        bool have = false;
        double best = 0;
        for (const auto& option : access_alternatives(g, cat, caps, g.tables[0])) {
            PhysicalPlan candidate = leaf_plan(0, option);
            double c = scope.cost_plan(candidate);
            if (!have || c < best) {
                best = c;
                result.plan = candidate;
                have = true;
            }
        }
        *result.counters.join_orderings += 1;
        return;
    }

    std::vector<std::string> algorithms(caps.join_algorithms.begin(), caps.join_algorithms.end());
    auto join_options = [&](const std::set<std::string>& left, const std::set<std::string>& right)
        -> std::pair<std::vector<std::size_t>, std::vector<std::string>> {
        auto preds = predicate_indices_between(g, left, right);
        if (preds.empty()) return {preds, {kCrossJoin}};
        return {preds, algorithms};
    };

    PhysicalPlan current;
    std::set<std::string> covered;
    bool have = false;
    double best = 0;

    // Seed pair: every ordered pair of tables with every access/algorithm choice.
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            std::set<std::string> li{g.tables[static_cast<std::size_t>(i)].name()};
            std::set<std::string> rj{g.tables[static_cast<std::size_t>(j)].name()};
            auto [preds, algos] = join_options(li, rj);
            for (const auto& ai : access_alternatives(g, cat, caps, g.tables[static_cast<std::size_t>(i)]))
                for (const auto& aj :
                     access_alternatives(g, cat, caps, g.tables[static_cast<std::size_t>(j)]))
                    for (const auto& algo : algos) {
                        PhysicalPlan candidate =
                            PhysicalPlan::join(algo, leaf_plan(i, ai), leaf_plan(j, aj), preds);
                        double c = scope.cost_plan(candidate);
                        if (!have || c < best) {
                            best = c;
                            current = candidate;
                            covered = {*li.begin(), *rj.begin()};
                            have = true;
                        }
                    }
        }
    }

    while (static_cast<int>(covered.size()) < n) {
        bool step_have = false;
        double step_best = 0;
        PhysicalPlan step_plan;
        std::string step_table;
        for (int u = 0; u < n; ++u) {
            const std::string& name = g.tables[static_cast<std::size_t>(u)].name();
            if (covered.count(name)) continue;
            auto [preds, algos] = join_options(covered, {name});
            for (const auto& au : access_alternatives(g, cat, caps, g.tables[static_cast<std::size_t>(u)]))
                for (const auto& algo : algos) {
                    PhysicalPlan candidate = PhysicalPlan::join(algo, current, leaf_plan(u, au), preds);
                    double c = scope.cost_plan(candidate);
                    if (!step_have || c < step_best) {
                        step_best = c;
                        step_plan = candidate;
                        step_table = name;
                        step_have = true;
                    }
                }
        }
        current = std::move(step_plan);
        covered.insert(step_table);
    }
    result.plan = std::move(current);
    *result.counters.join_orderings += 1;  // the one completed ordering
}

}  // namespace

OptimizeResult optimize(Strategy strategy, const JoinGraph& g, const ToyEngine& engine,
                        const BackendCapabilities& caps, const CostModel& cost,
                        const OptimizeOptions& options) {
    auto caps_violations = validate_capabilities(caps);
    if (!caps_violations.empty())
        throw std::invalid_argument("capabilities: " + caps_violations.front());

    OptimizeResult result;
    result.counters.logical_plans = 0;
    result.counters.join_orderings = 0;
    result.counters.physical_plans = 0;
    result.counters.physical_join_plans = 0;

    QueryStats stats(engine, g);
    CostingScope scope{.result = result, .stats = stats, .model = cost, .options = options};

    switch (strategy) {
        case Strategy::Exhaustive:
            optimize_full_scan(false, g, engine, caps, scope, result, options.enumeration_bound);
            break;
        case Strategy::AdversarialWorst:
            optimize_full_scan(true, g, engine, caps, scope, result, options.enumeration_bound);
            break;
        case Strategy::GreedyLeftDeep:
            scope.track_logical = true;
            optimize_greedy(g, engine, caps, scope, result);
            result.counters.logical_plans =
                static_cast<std::int64_t>(scope.logical_seen.size());
            break;
        case Strategy::UniformRandom: {
            Rng rng(options.seed);
            JoinTree tree = sample_join_ordering(g, rng);
            result.plan = randomize_physical(tree, g, caps, engine.catalog(), rng);
            scope.cost_plan(result.plan);
            *result.counters.join_orderings += 1;
            *result.counters.logical_plans += 1;
            break;
        }
    }
    result.counters.optimization_time = scope.work;
    return result;
}

}  // namespace optbench
