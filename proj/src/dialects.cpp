#include "optbench/dialects.hpp"

#include <algorithm>
#include <stdexcept>

#include "optbench/error.hpp"

namespace optbench {

std::string normalize_spaces(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool pending = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n') {
            pending = !out.empty();
            continue;
        }
        if (pending) out.push_back(' ');
        pending = false;
        out.push_back(c);
    }
    return out;
}

namespace {

std::string substitute(std::string text, const std::vector<std::pair<std::string, std::string>>& args) {
    for (const auto& [key, value] : args) {
        std::string token = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = text.find(token, pos)) != std::string::npos) {
            text.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    return text;
}

class TemplateDialect final : public HintDialect {
public:
    explicit TemplateDialect(DialectTemplates t) : t_(std::move(t)) {}

    std::string name() const override { return t_.name; }

    std::set<std::string> join_types() const override {
        return {t_.join_types.begin(), t_.join_types.end()};
    }

    std::string index_hint(const std::string& table, const std::string& index) const override {
        return normalize_spaces(substitute(t_.index_hint, {{"table", table}, {"index", index}}));
    }

    std::string join_hint(const std::string& t1, const std::string& alias1,
                          const std::string& index1, const std::string& t2,
                          const std::string& alias2, const std::string& index2,
                          const std::string& join, const std::string& clause) const override {
        return normalize_spaces(substitute(
            t_.join_hint, {{"t1", t1}, {"al1", alias1}, {"idx1", index1}, {"t2", t2},
                           {"al2", alias2}, {"idx2", index2}, {"join", join}, {"clause", clause}}));
    }

    std::string cross_join(const std::string& t1, const std::string& alias1,
                           const std::string& index1, const std::string& t2,
                           const std::string& alias2, const std::string& index2) const override {
        return normalize_spaces(substitute(t_.cross_join,
                                           {{"t1", t1}, {"al1", alias1}, {"idx1", index1},
                                            {"t2", t2}, {"al2", alias2}, {"idx2", index2}}));
    }

    std::string single_table(const std::string& table, const std::string& index) const override {
        return normalize_spaces(substitute(t_.single_table, {{"table", table}, {"index", index}}));
    }

private:
    DialectTemplates t_;
};

}  // namespace

std::shared_ptr<const HintDialect> dialect_from_templates(DialectTemplates templates) {
    return std::make_shared<TemplateDialect>(std::move(templates));
}

std::shared_ptr<const HintDialect> builtin_dialect(const std::string& style) {
    DialectTemplates t;
    t.name = style;
    if (style == "style-x") {
        t.join_types = {"HASH", "MERGE", "LOOP"};
        t.index_hint = "WITH (INDEX({index}))";
        t.join_hint = "SELECT * FROM {t1} {idx1} INNER {join} JOIN {t2} {idx2} ON {clause}";
        t.cross_join = "SELECT * FROM {t1} {idx1} CROSS JOIN {t2} {idx2}";
    } else if (style == "style-y") {
        t.join_types = {"USE_HASH", "USE_MERGE", "USE_NL"};
        t.index_hint = "INDEX({table} {index})";
        t.join_hint =
            "SELECT /*+ ORDERED {join}({al1}, {al2}) {idx1} {idx2} */ * FROM {t1}, {t2} WHERE "
            "{clause}";
        t.cross_join = "SELECT /*+ ORDERED */ * FROM {t1}, {t2}";
    } else if (style == "mysql") {
        t.join_types = {"LOOP"};
        t.index_hint = "USE INDEX({index})";
        t.join_hint = "SELECT STRAIGHT_JOIN * FROM {t1} {idx1}, {t2} {idx2} WHERE {clause}";
        t.cross_join = "SELECT STRAIGHT_JOIN * FROM {t1} {idx1}, {t2} {idx2}";
    } else {
        throw ConfigurationError("unknown builtin dialect '" + style +
                                 "' (expected style-x, style-y or mysql)");
    }
    return dialect_from_templates(std::move(t));
}

std::vector<std::string> validate_dialect(const HintDialect& d) {
    std::vector<std::string> out;
    if (d.join_types().empty()) out.push_back("join_types() is empty");

    auto probe_twice = [&](const std::string& what, auto&& render) {
        std::string first = render();
        std::string second = render();
        if (first.empty()) out.push_back(what + " renders an empty string");
        if (first != second) out.push_back(what + " is not deterministic");
    };
    probe_twice("index_hint", [&] { return d.index_hint("T", "I"); });
    std::string token = d.join_types().empty() ? "JOIN" : *d.join_types().begin();
    probe_twice("join_hint", [&] {
        return d.join_hint("T1", "T1", d.index_hint("T1", "I1"), "T2", "T2", "", token,
                           "T1.a = T2.b");
    });
    probe_twice("cross_join", [&] { return d.cross_join("T1", "T1", "", "T2", "T2", ""); });
    probe_twice("single_table", [&] { return d.single_table("T", ""); });
    return out;
}

namespace {

std::string render_literal(const Value& v) {
    if (std::holds_alternative<std::int64_t>(v)) return value_to_string(v);
    return "'" + std::get<std::string>(v) + "'";
}

struct RenderedTerm {
    std::string term;   // table name, "base alias", or "(subquery) j<k>"
    std::string alias;  // reference name or subquery alias
    std::string index;  // index-hint fragment, may be empty
};

class PlanCompiler {
public:
    PlanCompiler(const PhysicalPlan& plan, const JoinGraph& graph, const HintDialect& dialect)
        : plan_(plan), graph_(graph), dialect_(dialect) {
        // Preorder numbering of internal nodes; node storage is preorder.
        int next = 0;
        for (const auto& n : plan_.nodes) join_number_.push_back(n.is_leaf() ? 0 : ++next);
    }

    std::string compile() {
        const PlanNode& root = plan_.nodes.front();
        std::string query;
        if (root.is_leaf()) {
            RenderedTerm t = leaf_term(root);
            query = dialect_.single_table(t.term, t.index);
        } else {
            query = join_query(0);
        }
        std::string filters = filter_clause();
        if (!filters.empty()) {
            bool has_where = query.find(" WHERE ") != std::string::npos;
            query += has_where ? " AND " + filters : " WHERE " + filters;
        }
        return normalize_spaces(query);
    }

private:
    RenderedTerm leaf_term(const PlanNode& n) const {
        const TableRef& ref = *graph_.find_ref(n.table);
        RenderedTerm t;
        t.alias = ref.name();
        t.term = ref.alias.empty() || ref.alias == ref.table ? ref.table
                                                             : ref.table + " " + ref.alias;
        if (n.access.is_index_scan()) t.index = dialect_.index_hint(ref.name(), n.access.index);
        return t;
    }

    RenderedTerm child_term(std::int32_t index) {
        const PlanNode& n = plan_.nodes[static_cast<std::size_t>(index)];
        if (n.is_leaf()) return leaf_term(n);
        RenderedTerm t;
        t.alias = "j" + std::to_string(join_number_[static_cast<std::size_t>(index)]);
        t.term = "(" + join_query(index) + ") " + t.alias;
        return t;
    }

    std::string join_query(std::int32_t index) {
        const PlanNode& n = plan_.nodes[static_cast<std::size_t>(index)];
        RenderedTerm left = child_term(n.left);
        RenderedTerm right = child_term(n.right);
        if (n.algorithm == kCrossJoin)
            return dialect_.cross_join(left.term, left.alias, left.index, right.term, right.alias,
                                       right.index);
        if (!dialect_.join_types().count(n.algorithm))
            throw ConfigurationError("dialect '" + dialect_.name() +
                                     "' does not hint join algorithm '" + n.algorithm + "'");
        return dialect_.join_hint(left.term, left.alias, left.index, right.term, right.alias,
                                  right.index, n.algorithm, clause_for(index));
    }

    std::string clause_for(std::int32_t index) const {
        const PlanNode& n = plan_.nodes[static_cast<std::size_t>(index)];
        auto left_tables = tables_of(plan_, n.left);
        std::string clause;
        for (std::size_t pi : n.predicates) {
            const JoinPredicate& p = graph_.predicates[pi];
            // Render the left-subtree endpoint first.
            bool stored_left_on_left = left_tables.count(p.left_table) > 0;
            const std::string& lt = stored_left_on_left ? p.left_table : p.right_table;
            const std::string& lc = stored_left_on_left ? p.left_column : p.right_column;
            const std::string& rt = stored_left_on_left ? p.right_table : p.left_table;
            const std::string& rc = stored_left_on_left ? p.right_column : p.left_column;
            if (!clause.empty()) clause += " AND ";
            clause += lt + "." + lc + " = " + rt + "." + rc;
        }
        return clause;
    }

    std::string filter_clause() const {
        std::string out;
        for (const auto& s : graph_.selections) {
            if (!out.empty()) out += " AND ";
            out += s.table + "." + s.column + " " + s.op + " " + render_literal(s.value);
        }
        return out;
    }

    const PhysicalPlan& plan_;
    const JoinGraph& graph_;
    const HintDialect& dialect_;
    std::vector<int> join_number_;
};

}  // namespace

HintedQuery compile_plan(const PhysicalPlan& p, const JoinGraph& g, const HintDialect& d) {
    if (p.nodes.empty()) throw std::invalid_argument("compile_plan: empty plan");
    HintedQuery out;
    out.plan = p;
    out.text = PlanCompiler(p, g, d).compile();
    return out;
}

}  // namespace optbench
