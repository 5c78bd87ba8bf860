#include "sketchsci/constraints.hpp"

#include "sketchsci/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>

namespace sketchsci::constraints {

namespace {

    using Cells = std::vector<CellValue>;

    std::size_t catalog_rank(const std::string& name)
    {
        const auto& names = catalog();
        return static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
    }

    bool instance_less(const ConstraintInstance& a, const ConstraintInstance& b)
    {
        auto ra = catalog_rank(a.name), rb = catalog_rank(b.name);
        if (ra != rb)
            return ra < rb;
        return a.args < b.args;
    }

    bool values_equal(const CellValue& a, const CellValue& b)
    {
        if (a.is_number() && b.is_number())
            return nearly_equal(a.number(), b.number());
        return a == b;
    }

    /// The operands' value at position i; nullopt when any is unobserved or
    /// not a number.
    std::optional<double> aggregate(const std::string& name, const std::vector<const Cells*>& operands, std::size_t i)
    {
        std::vector<double> xs;
        for (const auto* v : operands) {
            const auto& cell = (*v)[i];
            if (!cell.is_number())
                return std::nullopt;
            xs.push_back(cell.number());
        }
        if (name == "ROW_SUM")
            return std::accumulate(xs.begin(), xs.end(), 0.0);
        if (name == "MAX")
            return *std::max_element(xs.begin(), xs.end());
        if (name == "MIN")
            return *std::min_element(xs.begin(), xs.end());
        if (name == "AVERAGE")
            return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
        if (name == "DIFFERENCE")
            return xs[0] - xs[1];
        if (name == "PRODUCT")
            return xs[0] * xs[1];
        return std::nullopt;
    }

    /// Does the template hold on these argument cells? `support` counts the
    /// positions (or values) it was judged on.
    bool holds(const std::string& name, const std::vector<const Cells*>& args, std::size_t& support)
    {
        support = 0;
        if (name == "ASCENDING") {
            std::optional<double> last;
            for (const auto& cell : *args[0]) {
                if (!cell.is_observed())
                    continue;
                if (!cell.is_number())
                    return false;
                if (last && cell.number() < *last && !nearly_equal(cell.number(), *last))
                    return false;
                last = cell.number();
                ++support;
            }
            return true;
        }
        if (name == "ALLDIFFERENT") {
            std::set<CellValue> seen;
            for (const auto& cell : *args[0]) {
                if (!cell.is_observed())
                    continue;
                if (!seen.insert(cell).second)
                    return false;
                ++support;
            }
            return true;
        }
        if (name == "FOREIGNKEY") {
            std::set<CellValue> keys;
            for (const auto& cell : *args[1])
                if (cell.is_observed() && !keys.insert(cell).second)
                    return false;
            if (keys.size() < 2)
                return false;
            for (const auto& cell : *args[0]) {
                if (!cell.is_observed())
                    continue;
                if (!keys.count(cell))
                    return false;
                ++support;
            }
            return true;
        }

        // Parallel templates: judged position by position.
        const auto n = args[0]->size();
        for (const auto* v : args)
            if (v->size() != n)
                return false;
        std::vector<const Cells*> operands(args.begin() + 1, args.end());
        for (std::size_t i = 0; i < n; ++i) {
            bool observed = std::all_of(args.begin(), args.end(), [&](const Cells* v) { return (*v)[i].is_observed(); });
            if (!observed)
                continue;
            ++support;
            const auto& target = (*args[0])[i];
            if (name == "EQUAL") {
                if (!values_equal(target, (*args[1])[i]))
                    return false;
                continue;
            }
            auto value = aggregate(name, operands, i);
            if (!value || !target.is_number() || !nearly_equal(target.number(), *value))
                return false;
        }
        return true;
    }

    Cells resolve(const VectorRef& ref, const Workbook& workbook)
    {
        const auto* table = workbook.find(ref.table);
        if (!table)
            throw Error(ErrorCode::stale_reference, "constraint refers to a missing table", ref.table);
        bool column = ref.orientation == Orientation::column;
        std::size_t extent = column ? table->col_count() : table->row_count();
        std::size_t span = column ? table->row_count() : table->col_count();
        if (ref.index >= extent)
            throw Error(ErrorCode::stale_reference, "constraint refers to a missing vector", ref.table + " " + ref.name);
        Cells out;
        for (auto p : ref.positions) {
            if (p >= span)
                throw Error(ErrorCode::stale_reference, "constraint refers to a missing cell",
                    ref.table + " " + ref.name + " position " + std::to_string(p + 1));
            out.push_back(column ? table->at(p, ref.index) : table->at(ref.index, p));
        }
        return out;
    }

    std::string qualified(const VectorRef& ref) { return ref.table + "." + ref.name; }

    Vector make_vector(const Table& table, Orientation orientation, std::size_t index, std::vector<std::size_t> positions)
    {
        Vector v;
        v.ref.table = table.name();
        v.ref.orientation = orientation;
        v.ref.index = index;
        v.ref.name = orientation == Orientation::column ? table.header()[index] : "row " + std::to_string(index + 1);
        for (auto p : positions)
            v.cells.push_back(orientation == Orientation::column ? table.at(p, index) : table.at(index, p));
        v.ref.positions = std::move(positions);
        return v;
    }

} // namespace

const std::vector<std::string>& catalog()
{
    static const std::vector<std::string> names = {"ROW_SUM", "MAX", "MIN", "AVERAGE", "DIFFERENCE", "PRODUCT", "EQUAL",
        "ASCENDING", "ALLDIFFERENT", "FOREIGNKEY"};
    return names;
}

bool is_formula(const std::string& name)
{
    static const std::set<std::string> formulas = {"ROW_SUM", "MAX", "MIN", "AVERAGE", "DIFFERENCE", "PRODUCT", "EQUAL"};
    return formulas.count(name) > 0;
}

bool nearly_equal(double a, double b)
{
    return std::abs(a - b) <= 1e-6 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string render(const ConstraintInstance& c)
{
    const auto names = [&](std::size_t from) {
        std::string out;
        for (std::size_t i = from; i < c.args.size(); ++i)
            out += (i > from ? ", " : "") + c.args[i].name;
        return out;
    };
    if (c.name == "ROW_SUM")
        return c.args[0].name + " = SUM(" + names(1) + ")";
    if (c.name == "MAX" || c.name == "MIN" || c.name == "AVERAGE")
        return c.args[0].name + " = " + c.name + "(" + names(1) + ")";
    if (c.name == "DIFFERENCE")
        return c.args[0].name + " = " + c.args[1].name + " - " + c.args[2].name;
    if (c.name == "PRODUCT")
        return c.args[0].name + " = " + c.args[1].name + " * " + c.args[2].name;
    if (c.name == "EQUAL")
        return c.args[0].name + " = " + c.args[1].name;
    if (c.name == "FOREIGNKEY")
        return "FOREIGNKEY(" + qualified(c.args[0]) + ", " + qualified(c.args[1]) + ")";
    return c.name + "(" + names(0) + ")";
}

TableView full_view(const Table& table)
{
    TableView view{table.name(), {}, {}};
    for (std::size_t r = 0; r < table.row_count(); ++r)
        view.rows.push_back(r);
    for (std::size_t c = 0; c < table.col_count(); ++c)
        view.cols.push_back(c);
    return view;
}

std::vector<Block> partition_blocks(const Table& table) { return partition_blocks(table, full_view(table)); }

std::vector<Block> partition_blocks(const Table& table, const TableView& view)
{
    std::vector<Block> out;
    for (auto orientation : {Orientation::column, Orientation::row}) {
        bool column = orientation == Orientation::column;
        const auto& indices = column ? view.cols : view.rows;
        const auto& positions = column ? view.rows : view.cols;
        // a one-cell vector carries no relation worth learning
        if (positions.size() < 2)
            continue;

        Block current;
        std::optional<std::size_t> previous;
        const auto flush = [&] {
            if (!current.vectors.empty())
                out.push_back(std::move(current));
            current = Block{};
        };
        for (auto index : indices) {
            // type consistency is judged on the whole original vector
            auto whole = column ? table.column(index) : table.rows()[index];
            bool observed = std::any_of(whole.begin(), whole.end(), [](const CellValue& c) { return c.is_observed(); });
            TypeTag type = infer_type(whole);
            if (!observed || type == TypeTag::mixed) {
                flush();
                previous.reset();
                continue;
            }
            bool adjacent = previous && *previous + 1 == index;
            if (!adjacent || current.vectors.empty() || current.vectors.back().type != type)
                flush();
            auto v = make_vector(table, orientation, index, positions);
            v.type = type;
            current.vectors.push_back(std::move(v));
            previous = index;
        }
        flush();
    }
    return out;
}

std::vector<TableView> restrict_by_sketch(const Workbook& workbook, const Sketch& sketch)
{
    require_roles(sketch, {Role::input, Role::target, Role::exclude}, "learn_constraints");
    std::map<std::string, std::set<std::size_t>> colored_rows, colored_cols, excluded_rows;
    for (const auto& coloring : sketch.colorings)
        for (const auto& cell : coloring.cells) {
            if (coloring.role == Role::exclude) {
                excluded_rows[cell.table].insert(cell.row);
            } else {
                colored_rows[cell.table].insert(cell.row);
                colored_cols[cell.table].insert(cell.col);
            }
        }

    std::vector<TableView> out;
    for (const auto& table : workbook.tables()) {
        TableView view{table.name(), {}, {}};
        const auto& excluded = excluded_rows[table.name()];
        if (colored_rows.empty()) {
            view = full_view(table);
        } else if (colored_rows.count(table.name())) {
            view.rows.assign(colored_rows[table.name()].begin(), colored_rows[table.name()].end());
            view.cols.assign(colored_cols[table.name()].begin(), colored_cols[table.name()].end());
        }
        std::erase_if(view.rows, [&](std::size_t r) { return excluded.count(r) > 0; });
        if (!view.rows.empty() && !view.cols.empty())
            out.push_back(std::move(view));
    }
    if (out.empty())
        throw Error(ErrorCode::empty_selection, "the sketch leaves no cells to learn from");
    return out;
}

std::vector<ConstraintInstance> find_constraints(const std::vector<Block>& blocks, const DiscoveryConfig& cfg)
{
    std::set<ConstraintInstance> found;
    const auto consider = [&](const std::string& name, std::vector<const Vector*> args) {
        std::vector<const Cells*> cells;
        for (const auto* v : args)
            cells.push_back(&v->cells);
        std::size_t support = 0;
        if (!holds(name, cells, support) || support < cfg.min_support)
            return;
        ConstraintInstance instance{name, {}};
        for (const auto* v : args)
            instance.args.push_back(v->ref);
        found.insert(std::move(instance));
    };

    // Parallel vectors: one table, one orientation, equal length.
    using GroupKey = std::pair<std::string, Orientation>;
    std::map<GroupKey, std::vector<const Vector*>> groups;
    std::map<GroupKey, std::vector<const Block*>> group_blocks;
    for (const auto& block : blocks) {
        if (block.vectors.empty())
            continue;
        GroupKey key{block.vectors.front().ref.table, block.vectors.front().ref.orientation};
        group_blocks[key].push_back(&block);
        for (const auto& v : block.vectors)
            groups[key].push_back(&v);
    }
    const auto parallel = [](const Vector* a, const Vector* b) { return a->cells.size() == b->cells.size(); };
    const auto numeric = [](const Vector* v) { return v->type == TypeTag::numeric; };

    for (const auto& [key, vectors] : groups) {
        for (const auto* block : group_blocks[key]) {
            if (block->vectors.front().type != TypeTag::numeric)
                continue;
            const auto& run_source = block->vectors;
            for (std::size_t length = 2; length <= cfg.max_addends; ++length)
                for (std::size_t start = 0; start + length <= run_source.size(); ++start) {
                    std::vector<const Vector*> run;
                    for (std::size_t i = start; i < start + length; ++i)
                        run.push_back(&run_source[i]);
                    for (const auto* v : vectors) {
                        if (!numeric(v) || !parallel(v, run.front())
                            || std::find(run.begin(), run.end(), v) != run.end())
                            continue;
                        std::vector<const Vector*> args{v};
                        args.insert(args.end(), run.begin(), run.end());
                        for (const char* name : {"ROW_SUM", "MAX", "MIN", "AVERAGE"})
                            consider(name, args);
                    }
                }
        }

        for (const auto* a : vectors)
            for (const auto* b : vectors)
                for (const auto* c : vectors) {
                    if (a == b || a == c || b == c || !numeric(a) || !numeric(b) || !numeric(c) || !parallel(a, b)
                        || !parallel(a, c))
                        continue;
                    consider("DIFFERENCE", {a, b, c});
                    if (b->ref < c->ref)
                        consider("PRODUCT", {a, b, c});
                }

        for (const auto* a : vectors) {
            for (const auto* b : vectors)
                if (a->ref < b->ref && a->type == b->type && parallel(a, b))
                    consider("EQUAL", {a, b});
            if (numeric(a))
                consider("ASCENDING", {a});
            consider("ALLDIFFERENT", {a});
        }
    }

    std::vector<const Vector*> columns;
    for (const auto& [key, vectors] : groups)
        if (key.second == Orientation::column)
            columns.insert(columns.end(), vectors.begin(), vectors.end());
    for (const auto* a : columns)
        for (const auto* b : columns)
            if (a != b && a->type == b->type)
                consider("FOREIGNKEY", {a, b});

    std::vector<ConstraintInstance> out(found.begin(), found.end());
    std::stable_sort(out.begin(), out.end(), instance_less);
    return out;
}

std::vector<ConstraintInstance> learn_constraints(const Workbook& workbook, const Sketch& sketch, const DiscoveryConfig& cfg)
{
    std::vector<Block> blocks;
    for (const auto& view : restrict_by_sketch(workbook, sketch)) {
        auto more = partition_blocks(workbook.table(view.table), view);
        blocks.insert(blocks.end(), more.begin(), more.end());
    }
    return find_constraints(blocks, cfg);
}

bool check_constraint(const ConstraintInstance& constraint, const Workbook& workbook)
{
    if (catalog_rank(constraint.name) == catalog().size())
        throw Error(ErrorCode::invalid_arguments, "unknown constraint template", constraint.name);
    std::vector<Cells> cells;
    for (const auto& ref : constraint.args)
        cells.push_back(resolve(ref, workbook));
    std::vector<const Cells*> args;
    for (const auto& c : cells)
        args.push_back(&c);
    std::size_t support = 0;
    return holds(constraint.name, args, support);
}

std::optional<CellValue> evaluate_formula(
    const ConstraintInstance& constraint, const Workbook& workbook, std::size_t position)
{
    if (!is_formula(constraint.name))
        return std::nullopt;
    std::vector<Cells> cells;
    for (std::size_t i = 1; i < constraint.args.size(); ++i) {
        VectorRef ref = constraint.args[i];
        ref.positions = {position};
        cells.push_back(resolve(ref, workbook));
    }
    if (constraint.name == "EQUAL") {
        if (!cells[0][0].is_observed())
            return std::nullopt;
        return cells[0][0];
    }
    std::vector<const Cells*> operands;
    for (const auto& c : cells)
        operands.push_back(&c);
    auto value = aggregate(constraint.name, operands, 0);
    if (!value)
        return std::nullopt;
    return CellValue(*value);
}

ConstraintInstance widen(const ConstraintInstance& constraint, const Workbook& workbook)
{
    ConstraintInstance out = constraint;
    for (auto& ref : out.args) {
        const auto* table = workbook.find(ref.table);
        if (!table)
            throw Error(ErrorCode::stale_reference, "constraint refers to a missing table", ref.table);
        std::size_t span = ref.orientation == Orientation::column ? table->row_count() : table->col_count();
        ref.positions.clear();
        for (std::size_t p = 0; p < span; ++p)
            ref.positions.push_back(p);
    }
    return out;
}

CellRef cell_at(const VectorRef& ref, std::size_t position)
{
    return ref.orientation == Orientation::column ? CellRef{ref.table, position, ref.index}
                                                  : CellRef{ref.table, ref.index, position};
}

} // namespace sketchsci::constraints
