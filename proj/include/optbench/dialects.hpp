#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "optbench/core.hpp"

namespace optbench {

/// System-specific hint syntax: the join-type tokens the engine accepts
/// in hints, the index-scan hint fragment, and the two-way join-hint
/// form (whose table terms may be base tables or aliased subqueries).
/// Implementations must be pure functions of their inputs.
class HintDialect {
public:
    virtual ~HintDialect() = default;

    virtual std::string name() const = 0;
    virtual std::set<std::string> join_types() const = 0;
    virtual std::string index_hint(const std::string& table, const std::string& index) const = 0;
    virtual std::string join_hint(const std::string& t1, const std::string& alias1,
                                  const std::string& index1, const std::string& t2,
                                  const std::string& alias2, const std::string& index2,
                                  const std::string& join, const std::string& clause) const = 0;
    /// Two-way join with no predicate between the sides.
    virtual std::string cross_join(const std::string& t1, const std::string& alias1,
                                   const std::string& index1, const std::string& t2,
                                   const std::string& alias2,
                                   const std::string& index2) const = 0;
    /// Degenerate single-table query form.
    virtual std::string single_table(const std::string& table, const std::string& index) const = 0;
};

/// Token set and format templates driving a dialect. Placeholders:
/// index_hint {table} {index}; join_hint {t1} {al1} {idx1} {t2} {al2}
/// {idx2} {join} {clause}; cross_join the same minus {join}/{clause};
/// single_table {table} {index}. Rendered strings are whitespace
/// normalized (runs of blanks collapse, ends trimmed), so optional
/// fragments can simply render empty.
struct DialectTemplates {
    std::string name;
    std::vector<std::string> join_types;
    std::string index_hint;
    std::string join_hint;
    std::string cross_join;
    std::string single_table = "SELECT * FROM {table} {index}";
};

std::shared_ptr<const HintDialect> dialect_from_templates(DialectTemplates templates);

/// style-x, style-y or mysql, transcribed hint syntaxes of the three
/// reference systems.
std::shared_ptr<const HintDialect> builtin_dialect(const std::string& style);

/// Non-empty join_types; the rendering functions produce non-empty,
/// deterministic strings on probe inputs. Empty = ok.
std::vector<std::string> validate_dialect(const HintDialect& d);

struct HintedQuery {
    std::string text;
    PhysicalPlan plan;
};

/// Bottom-up compilation of a physical plan into one hinted query
/// string: leaves render as table terms with optional index-hint
/// fragments, each internal node applies join_hint (or the cross-join
/// form) to its children, join children become subqueries aliased j<k>
/// by preorder position, and the query's selection filters land in the
/// outermost WHERE clause. Throws ConfigurationError when a plan node
/// uses a join token the dialect does not list.
HintedQuery compile_plan(const PhysicalPlan& p, const JoinGraph& g, const HintDialect& d);

/// Collapses whitespace runs and trims; the canonical form of every
/// rendered hint string.
std::string normalize_spaces(const std::string& s);

}  // namespace optbench
