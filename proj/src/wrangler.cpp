#include "sketchsci/wrangler.hpp"

#include "sketchsci/error.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

namespace sketchsci::wrangle {

namespace {

    using Origins = std::vector<CellRef>;

    std::size_t kind_rank(const Transform& t) { return t.index(); }

    std::vector<std::size_t> columns_of(const Transform& t)
    {
        return std::visit(
            [](const auto& step) -> std::vector<std::size_t> {
                using T = std::decay_t<decltype(step)>;
                if constexpr (std::is_same_v<T, Split> || std::is_same_v<T, ForwardFill>)
                    return {step.col};
                else if constexpr (std::is_same_v<T, Pivot>)
                    return {step.key, step.value};
                else
                    return {};
            },
            t);
    }

    void require_column(const ProvenancedGrid& grid, std::size_t col, std::string_view op)
    {
        if (col >= grid.cols())
            throw Error(ErrorCode::invalid_arguments,
                std::string(op) + ": column " + std::to_string(col + 1) + " out of range (grid has "
                    + std::to_string(grid.cols()) + " columns)");
    }

    Origins merge_origins(Origins a, const Origins& b)
    {
        a.insert(a.end(), b.begin(), b.end());
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        return a;
    }

    ProvenancedGrid apply_split(const ProvenancedGrid& grid, std::size_t col)
    {
        require_column(grid, col, "split");
        ProvenancedGrid out;
        out.header_row = grid.header_row;
        for (std::size_t r = 0; r < grid.rows(); ++r) {
            const auto& row = grid.cells[r];
            const auto& origin = grid.origins[r];
            bool right_empty = std::all_of(row.begin() + static_cast<std::ptrdiff_t>(col) + 1, row.end(),
                [](const CellValue& cell) { return cell.is_empty(); });

            std::vector<CellValue> cells(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(col));
            std::vector<Origins> origins(origin.begin(), origin.begin() + static_cast<std::ptrdiff_t>(col));
            // Values with data to their right stay first; lone labels move to the new column.
            if (!right_empty) {
                cells.push_back(row[col]);
                origins.push_back(origin[col]);
                cells.emplace_back();
                origins.emplace_back();
            } else {
                cells.emplace_back();
                origins.emplace_back();
                cells.push_back(row[col]);
                origins.push_back(origin[col]);
            }
            cells.insert(cells.end(), row.begin() + static_cast<std::ptrdiff_t>(col) + 1, row.end());
            origins.insert(origins.end(), origin.begin() + static_cast<std::ptrdiff_t>(col) + 1, origin.end());
            out.cells.push_back(std::move(cells));
            out.origins.push_back(std::move(origins));
        }
        return out;
    }

    ProvenancedGrid apply_forward_fill(const ProvenancedGrid& grid, std::size_t col)
    {
        require_column(grid, col, "forward fill");
        ProvenancedGrid out = grid;
        const CellValue* last = nullptr;
        const Origins* last_origin = nullptr;
        for (std::size_t r = 0; r < out.rows(); ++r) {
            if (out.header_row == r)
                continue;
            auto& cell = out.cells[r][col];
            if (cell.is_empty()) {
                if (last) {
                    cell = *last;
                    out.origins[r][col] = *last_origin;
                }
            } else {
                last = &grid.cells[r][col];
                last_origin = &grid.origins[r][col];
            }
        }
        return out;
    }

    ProvenancedGrid apply_pivot(const ProvenancedGrid& grid, std::size_t key, std::size_t value)
    {
        require_column(grid, key, "pivot");
        require_column(grid, value, "pivot");
        if (key == value)
            throw Error(ErrorCode::invalid_arguments, "pivot key and value columns must differ");

        std::vector<std::size_t> kept;
        for (std::size_t c = 0; c < grid.cols(); ++c)
            if (c != key && c != value)
                kept.push_back(c);

        struct Group {
            std::size_t first_row;
            std::map<CellValue, std::pair<CellValue, Origins>> values;
        };
        std::vector<std::vector<CellValue>> group_keys;
        std::vector<Group> groups;
        std::vector<CellValue> new_columns;
        std::map<CellValue, Origins> header_origins;

        for (std::size_t r = 0; r < grid.rows(); ++r) {
            if (grid.header_row == r)
                continue;
            const auto& row = grid.cells[r];
            if (row[key].is_empty())
                continue;
            std::vector<CellValue> group_key;
            for (auto c : kept)
                group_key.push_back(row[c]);
            auto found = std::find(group_keys.begin(), group_keys.end(), group_key);
            std::size_t g = static_cast<std::size_t>(found - group_keys.begin());
            if (found == group_keys.end()) {
                group_keys.push_back(std::move(group_key));
                groups.push_back(Group{r, {}});
            }
            if (std::find(new_columns.begin(), new_columns.end(), row[key]) == new_columns.end())
                new_columns.push_back(row[key]);
            header_origins[row[key]] = merge_origins(header_origins[row[key]], grid.origins[r][key]);
            groups[g].values[row[key]] = {row[value], grid.origins[r][value]};
        }

        ProvenancedGrid out;
        out.header_row = 0;
        std::vector<CellValue> header(kept.size());
        std::vector<Origins> header_origin(kept.size());
        for (const auto& name : new_columns) {
            header.push_back(name);
            header_origin.push_back(header_origins[name]);
        }
        out.cells.push_back(std::move(header));
        out.origins.push_back(std::move(header_origin));

        for (const auto& group : groups) {
            std::vector<CellValue> cells;
            std::vector<Origins> origins;
            for (auto c : kept) {
                cells.push_back(grid.cells[group.first_row][c]);
                origins.push_back(grid.origins[group.first_row][c]);
            }
            for (const auto& name : new_columns) {
                auto it = group.values.find(name);
                if (it == group.values.end()) {
                    cells.emplace_back();
                    origins.emplace_back();
                } else {
                    cells.push_back(it->second.first);
                    origins.push_back(it->second.second);
                }
            }
            out.cells.push_back(std::move(cells));
            out.origins.push_back(std::move(origins));
        }
        return out;
    }

    bool row_is_empty(const std::vector<CellValue>& row)
    {
        return std::all_of(row.begin(), row.end(), [](const CellValue& cell) { return cell.is_empty(); });
    }

    bool column_is_empty(const ProvenancedGrid& grid, std::size_t col)
    {
        return std::all_of(
            grid.cells.begin(), grid.cells.end(), [col](const auto& row) { return row[col].is_empty(); });
    }

    ProvenancedGrid apply_drop_rows(const ProvenancedGrid& grid)
    {
        ProvenancedGrid out;
        for (std::size_t r = 0; r < grid.rows(); ++r) {
            if (row_is_empty(grid.cells[r]))
                continue;
            if (grid.header_row == r)
                out.header_row = out.rows();
            out.cells.push_back(grid.cells[r]);
            out.origins.push_back(grid.origins[r]);
        }
        return out;
    }

    ProvenancedGrid apply_drop_columns(const ProvenancedGrid& grid)
    {
        std::vector<std::size_t> kept;
        for (std::size_t c = 0; c < grid.cols(); ++c)
            if (!column_is_empty(grid, c))
                kept.push_back(c);
        ProvenancedGrid out;
        out.header_row = grid.header_row;
        for (std::size_t r = 0; r < grid.rows(); ++r) {
            std::vector<CellValue> cells;
            std::vector<Origins> origins;
            for (auto c : kept) {
                cells.push_back(grid.cells[r][c]);
                origins.push_back(grid.origins[r][c]);
            }
            out.cells.push_back(std::move(cells));
            out.origins.push_back(std::move(origins));
        }
        return out;
    }

} // namespace

std::string describe(const Transform& t)
{
    return std::visit(
        [](const auto& step) -> std::string {
            using T = std::decay_t<decltype(step)>;
            if constexpr (std::is_same_v<T, Split>)
                return "Split(" + std::to_string(step.col + 1) + ")";
            else if constexpr (std::is_same_v<T, ForwardFill>)
                return "ForwardFill(" + std::to_string(step.col + 1) + ")";
            else if constexpr (std::is_same_v<T, Pivot>)
                return "Pivot(" + std::to_string(step.key + 1) + "," + std::to_string(step.value + 1) + ")";
            else if constexpr (std::is_same_v<T, DropEmptyRows>)
                return "DropEmptyRows";
            else
                return "DropEmptyColumns";
        },
        t);
}

bool transform_less(const Transform& a, const Transform& b)
{
    if (kind_rank(a) != kind_rank(b))
        return kind_rank(a) < kind_rank(b);
    return columns_of(a) < columns_of(b);
}

ProvenancedGrid grid_from_table(const Table& table)
{
    ProvenancedGrid grid;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        grid.cells.push_back(table.rows()[r]);
        std::vector<Origins> origins;
        for (std::size_t c = 0; c < table.col_count(); ++c)
            origins.push_back({CellRef{table.name(), r, c}});
        grid.origins.push_back(std::move(origins));
    }
    return grid;
}

Table table_from_grid(const ProvenancedGrid& grid, const std::string& name)
{
    std::vector<std::string> header;
    std::vector<Row> rows;
    for (std::size_t c = 0; c < grid.cols(); ++c) {
        std::string label;
        if (grid.header_row)
            label = grid.cells[*grid.header_row][c].display();
        header.push_back(label.empty() ? "Column" + std::to_string(c + 1) : label);
    }
    for (std::size_t r = 0; r < grid.rows(); ++r)
        if (grid.header_row != r)
            rows.push_back(grid.cells[r]);
    return Table(name, std::move(header), std::move(rows));
}

WranglingSketch wrangling_sketch(const Sketch& sketch, const std::string& table)
{
    WranglingSketch out;
    for (const auto& coloring : sketch.colorings) {
        if (coloring.role != Role::group)
            continue;
        for (const auto& cell : coloring.cells)
            if (cell.table == table)
                out[coloring.color].insert(cell);
    }
    return out;
}

ProvenancedGrid apply_transform(const ProvenancedGrid& grid, const Transform& t)
{
    return std::visit(
        [&](const auto& step) -> ProvenancedGrid {
            using T = std::decay_t<decltype(step)>;
            if constexpr (std::is_same_v<T, Split>)
                return apply_split(grid, step.col);
            else if constexpr (std::is_same_v<T, ForwardFill>)
                return apply_forward_fill(grid, step.col);
            else if constexpr (std::is_same_v<T, Pivot>)
                return apply_pivot(grid, step.key, step.value);
            else if constexpr (std::is_same_v<T, DropEmptyRows>)
                return apply_drop_rows(grid);
            else
                return apply_drop_columns(grid);
        },
        t);
}

ProvenancedGrid apply_program(const ProvenancedGrid& grid, const TransformProgram& program)
{
    ProvenancedGrid current = grid;
    for (const auto& step : program.steps)
        current = apply_transform(current, step);
    return current;
}

SketchCheck check_sketch(const ProvenancedGrid& grid, const WranglingSketch& sketch)
{
    std::map<CellRef, std::size_t> color_of;
    std::size_t color_index = 0;
    for (const auto& [color, cells] : sketch) {
        for (const auto& cell : cells)
            color_of.emplace(cell, color_index);
        ++color_index;
    }
    if (color_of.empty())
        return {};

    std::set<CellRef> survived;
    // per color: row -> number of cells carrying that color
    std::vector<std::map<std::size_t, std::size_t>> per_color(sketch.size());
    std::map<std::size_t, std::map<std::size_t, std::size_t>> per_row;
    for (std::size_t r = 0; r < grid.rows(); ++r) {
        for (std::size_t c = 0; c < grid.cols(); ++c) {
            std::set<std::size_t> colors_here;
            for (const auto& origin : grid.origins[r][c]) {
                auto it = color_of.find(origin);
                if (it == color_of.end())
                    continue;
                survived.insert(origin);
                colors_here.insert(it->second);
            }
            for (auto color : colors_here) {
                ++per_color[color][r];
                ++per_row[r][color];
            }
        }
    }

    std::size_t violations = color_of.size() - survived.size();
    for (const auto& rows : per_color) {
        std::size_t total = 0, modal = 0;
        for (const auto& [row, count] : rows) {
            total += count;
            modal = std::max(modal, count);
        }
        violations += total - modal;
    }
    for (const auto& [row, colors] : per_row) {
        if (colors.size() < 2)
            continue;
        std::size_t total = 0, dominant = 0;
        for (const auto& [color, count] : colors) {
            total += count;
            dominant = std::max(dominant, count);
        }
        violations += total - dominant;
    }
    return SketchCheck{violations == 0, violations};
}

double score_candidate(const ProvenancedGrid& grid, const WranglingSketch& sketch)
{
    auto check = check_sketch(grid, sketch);
    std::size_t total = grid.rows() * grid.cols();
    std::size_t empty = 0;
    for (const auto& row : grid.cells)
        empty += static_cast<std::size_t>(
            std::count_if(row.begin(), row.end(), [](const CellValue& cell) { return cell.is_empty(); }));
    double empty_fraction = total == 0 ? 0.0 : static_cast<double>(empty) / static_cast<double>(total);

    std::size_t mixed = 0;
    for (std::size_t c = 0; c < grid.cols(); ++c) {
        std::vector<CellValue> body;
        for (std::size_t r = 0; r < grid.rows(); ++r)
            if (grid.header_row != r)
                body.push_back(grid.cells[r][c]);
        if (infer_type(body) == TypeTag::mixed)
            ++mixed;
    }
    double type_inconsistency = grid.cols() == 0 ? 0.0 : static_cast<double>(mixed) / static_cast<double>(grid.cols());
    return 10.0 * static_cast<double>(check.violations) + empty_fraction + type_inconsistency;
}

namespace {

    std::optional<std::string> color_at(
        const ProvenancedGrid& grid, std::size_t r, std::size_t c, const std::map<CellRef, std::string>& color_of)
    {
        for (const auto& origin : grid.origins[r][c])
            if (auto it = color_of.find(origin); it != color_of.end())
                return it->second;
        return std::nullopt;
    }

    /// Longest vertical run of cells sharing one color in a column.
    std::size_t longest_color_run(
        const ProvenancedGrid& grid, std::size_t col, const std::map<CellRef, std::string>& color_of)
    {
        std::size_t best = 0, run = 0;
        std::optional<std::string> previous;
        for (std::size_t r = 0; r < grid.rows(); ++r) {
            auto color = color_at(grid, r, col, color_of);
            if (color && color == previous)
                ++run;
            else
                run = color ? 1 : 0;
            previous = color;
            best = std::max(best, run);
        }
        return best;
    }

} // namespace

std::vector<Transform> propose_transforms(const ProvenancedGrid& grid, const WranglingSketch& sketch)
{
    std::map<CellRef, std::string> color_of;
    for (const auto& [color, cells] : sketch)
        for (const auto& cell : cells)
            color_of.emplace(cell, color);

    std::vector<Transform> out;
    const std::size_t cols = grid.cols();

    // Two consecutive columns with equally long same-color vertical runs.
    std::vector<Transform> other_pivots;
    for (std::size_t c = 0; c + 1 < cols; ++c) {
        auto left = longest_color_run(grid, c, color_of);
        auto right = longest_color_run(grid, c + 1, color_of);
        if (left >= 2 && left == right)
            out.push_back(Pivot{c, c + 1});
        else
            other_pivots.push_back(Pivot{c, c + 1});
    }
    // Any other key column with at least two values is still worth a try.
    std::erase_if(other_pivots, [&](const Transform& t) {
        std::size_t key = std::get<Pivot>(t).key, values = 0;
        for (std::size_t r = 0; r < grid.rows(); ++r)
            if (grid.header_row != r && !grid.cells[r][key].is_empty())
                ++values;
        return values < 2;
    });
    out.insert(out.end(), other_pivots.begin(), other_pivots.end());

    for (std::size_t c = 0; c + 1 < cols; ++c) {
        bool stays = false, moves = false;
        for (std::size_t r = 0; r < grid.rows(); ++r) {
            if (grid.header_row == r || grid.cells[r][c].is_empty())
                continue;
            bool right_empty = std::all_of(grid.cells[r].begin() + static_cast<std::ptrdiff_t>(c) + 1,
                grid.cells[r].end(), [](const CellValue& cell) { return cell.is_empty(); });
            (right_empty ? stays : moves) = true;
        }
        if (stays && moves)
            out.push_back(Split{c});
    }

    for (std::size_t c = 0; c < cols; ++c) {
        bool seen_value = false, fillable = false;
        for (std::size_t r = 0; r < grid.rows() && !fillable; ++r) {
            if (grid.header_row == r)
                continue;
            if (!grid.cells[r][c].is_empty())
                seen_value = true;
            else if (seen_value)
                fillable = true;
        }
        if (fillable)
            out.push_back(ForwardFill{c});
    }

    if (std::any_of(grid.cells.begin(), grid.cells.end(), [](const auto& row) { return row_is_empty(row); }))
        out.push_back(DropEmptyRows{});
    for (std::size_t c = 0; c < cols; ++c) {
        if (column_is_empty(grid, c)) {
            out.push_back(DropEmptyColumns{});
            break;
        }
    }
    return out;
}

std::vector<Transform> all_transforms(std::size_t cols)
{
    std::vector<Transform> out;
    for (std::size_t c = 0; c < cols; ++c)
        out.push_back(Split{c});
    for (std::size_t c = 0; c < cols; ++c)
        out.push_back(ForwardFill{c});
    for (std::size_t k = 0; k < cols; ++k)
        for (std::size_t v = 0; v < cols; ++v)
            if (k != v)
                out.push_back(Pivot{k, v});
    out.push_back(DropEmptyRows{});
    out.push_back(DropEmptyColumns{});
    return out;
}

namespace {

    struct Candidate {
        TransformProgram program;
        ProvenancedGrid grid;
        double score = 0.0;
        bool satisfied = false;
        // score after the best cue-matching pivot, or `score` if none helps
        double priority = 0.0;
    };

    bool program_less(const TransformProgram& a, const TransformProgram& b)
    {
        if (a.steps.size() != b.steps.size())
            return a.steps.size() < b.steps.size();
        return std::lexicographical_compare(
            a.steps.begin(), a.steps.end(), b.steps.begin(), b.steps.end(), transform_less);
    }

    bool candidate_less(const Candidate& a, const Candidate& b)
    {
        if (a.score != b.score)
            return a.score < b.score;
        return program_less(a.program, b.program);
    }

    bool beam_less(const Candidate& a, const Candidate& b)
    {
        if (a.priority != b.priority)
            return a.priority < b.priority;
        return candidate_less(a, b);
    }

    std::string grid_signature(const ProvenancedGrid& grid)
    {
        std::ostringstream out;
        out << grid.header_row.value_or(static_cast<std::size_t>(-1)) << '|' << grid.cols() << '|';
        for (std::size_t r = 0; r < grid.rows(); ++r) {
            for (std::size_t c = 0; c < grid.cols(); ++c) {
                const auto& cell = grid.cells[r][c];
                out << static_cast<int>(cell.type()) << (cell.is_empty() ? "E" : cell.is_missing() ? "M" : "V") << cell.display()
                    << '{';
                for (const auto& origin : grid.origins[r][c])
                    out << origin.table << ':' << origin.row << ':' << origin.col << ';';
                out << '}';
            }
            out << '\n';
        }
        return out.str();
    }

    Candidate evaluate(TransformProgram program, ProvenancedGrid grid, const WranglingSketch& sketch)
    {
        Candidate candidate{std::move(program), std::move(grid), 0.0, false, 0.0};
        candidate.score = score_candidate(candidate.grid, sketch);
        candidate.satisfied = check_sketch(candidate.grid, sketch).satisfied;
        candidate.priority = candidate.score;
        return candidate;
    }

    std::string describe_program(const TransformProgram& program)
    {
        std::string out;
        for (const auto& step : program.steps)
            out += (out.empty() ? "" : "; ") + describe(step);
        return out.empty() ? "<identity>" : out;
    }

} // namespace

SynthesisResult synthesize_program(const Table& input, const WranglingSketch& sketch, const SynthesisConfig& cfg)
{
    for (const auto& [color, cells] : sketch)
        for (const auto& cell : cells)
            if (cell.table != input.name() || cell.row >= input.row_count() || cell.col >= input.col_count())
                throw Error(ErrorCode::validation, "wrangling sketch color '" + color + "' references a cell outside '"
                        + input.name() + "'");

    std::optional<Candidate> best_satisfying;
    std::optional<Candidate> best_any;
    const auto consider = [&](const Candidate& candidate) {
        if (candidate.satisfied && (!best_satisfying || candidate_less(candidate, *best_satisfying)))
            best_satisfying = candidate;
        if (!best_any || candidate_less(candidate, *best_any))
            best_any = candidate;
    };

    // Intermediate states (a forward fill that copies a colored label down) can
    // look worse than their parent even though the pivot that follows collapses
    // them. Beam entries are ranked by what one pivot would achieve.
    const auto look_ahead = [&](Candidate& node, std::size_t depth) {
        if (depth >= cfg.max_depth)
            return;
        for (const auto& step : propose_transforms(node.grid, sketch)) {
            if (!std::holds_alternative<Pivot>(step))
                break;
            auto program = node.program;
            program.steps.push_back(step);
            auto next = evaluate(std::move(program), apply_transform(node.grid, step), sketch);
            consider(next);
            node.priority = std::min(node.priority, next.score);
        }
    };

    Candidate root = evaluate({}, grid_from_table(input), sketch);
    consider(root);

    std::unordered_set<std::string> seen{grid_signature(root.grid)};
    std::vector<Candidate> frontier{root};
    std::size_t evaluations = 1;

    for (std::size_t depth = 1; depth <= cfg.max_depth && !frontier.empty(); ++depth) {
        std::size_t planned = 0;
        for (const auto& node : frontier)
            planned += all_transforms(node.grid.cols()).size();
        bool exhaustive = depth <= cfg.exhaustive_depth && evaluations + planned <= cfg.exhaustive_budget;
        if (!exhaustive && frontier.size() > cfg.beam) {
            for (auto& node : frontier)
                look_ahead(node, depth - 1);
            std::sort(frontier.begin(), frontier.end(), beam_less);
            frontier.resize(cfg.beam);
        }

        std::vector<Candidate> children;
        for (const auto& node : frontier) {
            auto steps = exhaustive ? all_transforms(node.grid.cols()) : propose_transforms(node.grid, sketch);
            for (const auto& step : steps) {
                auto grid = apply_transform(node.grid, step);
                if (grid == node.grid)
                    continue;
                auto program = node.program;
                program.steps.push_back(step);
                children.push_back(evaluate(std::move(program), std::move(grid), sketch));
                ++evaluations;
            }
        }
        std::sort(children.begin(), children.end(), candidate_less);

        std::vector<Candidate> next;
        for (auto& child : children) {
            if (!seen.insert(grid_signature(child.grid)).second)
                continue;
            consider(child);
            next.push_back(std::move(child));
        }
        if (depth >= cfg.exhaustive_depth && next.size() > cfg.beam) {
            for (auto& node : next)
                look_ahead(node, depth);
            std::sort(next.begin(), next.end(), beam_less);
            next.resize(cfg.beam);
        }
        frontier = std::move(next);
    }

    if (!best_satisfying)
        throw Error(ErrorCode::exhausted, "no program satisfies the wrangling sketch within the search bounds",
            "best partial program: " + describe_program(best_any->program)
                + " (score " + std::to_string(best_any->score) + ")");
    return SynthesisResult{best_satisfying->program, best_satisfying->grid, best_satisfying->score};
}

Json program_to_json(const TransformProgram& program)
{
    Json out = Json::array();
    for (const auto& step : program.steps) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Split>)
                    out.push_back({{"op", "split"}, {"col", s.col + 1}});
                else if constexpr (std::is_same_v<T, ForwardFill>)
                    out.push_back({{"op", "ffill"}, {"col", s.col + 1}});
                else if constexpr (std::is_same_v<T, Pivot>)
                    out.push_back({{"op", "pivot"}, {"key", s.key + 1}, {"value", s.value + 1}});
                else if constexpr (std::is_same_v<T, DropEmptyRows>)
                    out.push_back({{"op", "drop_empty_rows"}});
                else
                    out.push_back({{"op", "drop_empty_columns"}});
            },
            step);
    }
    return out;
}

TransformProgram program_from_json(const Json& value)
{
    const auto column = [](const Json& item, const char* field) {
        auto index = item.at(field).get<long long>();
        if (index < 1)
            throw Error(ErrorCode::validation, "program columns are 1-based");
        return static_cast<std::size_t>(index - 1);
    };
    TransformProgram program;
    try {
        for (const auto& item : value) {
            auto op = item.at("op").get<std::string>();
            if (op == "split")
                program.steps.push_back(Split{column(item, "col")});
            else if (op == "ffill")
                program.steps.push_back(ForwardFill{column(item, "col")});
            else if (op == "pivot")
                program.steps.push_back(Pivot{column(item, "key"), column(item, "value")});
            else if (op == "drop_empty_rows")
                program.steps.push_back(DropEmptyRows{});
            else if (op == "drop_empty_columns")
                program.steps.push_back(DropEmptyColumns{});
            else
                throw Error(ErrorCode::validation, "unknown transform op '" + op + "'");
        }
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::validation, std::string("malformed program: ") + e.what());
    }
    return program;
}

} // namespace sketchsci::wrangle
