#include "sketchsci/autocomplete.hpp"

#include "sketchsci/error.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>

namespace sketchsci::autocomplete {

namespace {

    using constraints::ConstraintInstance;
    using constraints::Orientation;

    bool position_wise(const std::string& name) { return constraints::is_formula(name); }

    bool mentions(const ConstraintInstance& c, std::size_t column)
    {
        return std::any_of(c.args.begin(), c.args.end(), [&](const auto& ref) { return ref.index == column; });
    }

    /// Column constraints of the task table, spanning every non-excluded row.
    std::vector<ConstraintInstance> usable_constraints(
        const std::vector<ConstraintInstance>& found, const Table& table, const predict::PredictionTask& task)
    {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < table.row_count(); ++r)
            if (!task.excluded_rows.count(r))
                rows.push_back(r);
        std::vector<ConstraintInstance> out;
        for (const auto& c : found) {
            bool local = std::all_of(c.args.begin(), c.args.end(), [&](const auto& ref) {
                return ref.table == table.name() && ref.orientation == Orientation::column;
            });
            if (!local)
                continue;
            auto wide = c;
            for (auto& ref : wide.args)
                ref.positions = rows;
            out.push_back(std::move(wide));
        }
        return out;
    }

    /// Does the value now at (row, column) break a constraint? Position-wise
    /// templates are judged on that row alone, the others on the whole vector.
    bool violates(const std::vector<ConstraintInstance>& usable, const Table& table, std::size_t row, std::size_t column)
    {
        Workbook view({table});
        for (const auto& c : usable) {
            if (!mentions(c, column))
                continue;
            auto probe = c;
            if (position_wise(c.name))
                for (auto& ref : probe.args)
                    ref.positions = {row};
            if (!constraints::check_constraint(probe, view))
                return true;
        }
        return false;
    }

    Coloring& target_coloring(Sketch& sketch, const std::string& table, std::size_t column)
    {
        for (auto& coloring : sketch.colorings)
            if (coloring.role == Role::target)
                for (const auto& cell : coloring.cells)
                    if (cell.table == table && cell.col == column)
                        return coloring;
        for (auto& coloring : sketch.colorings)
            if (coloring.role == Role::target)
                return coloring;
        sketch.colorings.push_back({"blue", Role::target, {}});
        return sketch.colorings.back();
    }

    void remove_from_other_colorings(Sketch& sketch, const CellRef& cell, const Coloring& keep)
    {
        for (auto& coloring : sketch.colorings)
            if (&coloring != &keep)
                coloring.cells.erase(cell);
    }

    CompletionResult run(const Workbook& workbook, const Sketch& sketch, const predict::PredictionTask& task,
        const std::vector<ConstraintInstance>& found, const CompletionConfig& cfg)
    {
        CompletionResult result;
        result.task = task;
        result.constraints = found;
        Table current = workbook.table(task.table);
        result.plan = plan_completion(current, task, found);
        auto usable = usable_constraints(found, current, task);

        std::vector<std::size_t> known = task.input_cols;
        for (const auto& step : result.plan.steps) {
            const auto column = step.column;
            std::vector<std::size_t> rows;
            for (std::size_t r = 0; r < current.row_count(); ++r)
                if (!task.excluded_rows.count(r) && current.at(r, column).is_missing())
                    rows.push_back(r);

            std::optional<predict::Ensemble> ensemble;
            const auto train = [&] {
                if (ensemble)
                    return;
                predict::PredictionTask local = task;
                local.input_cols = known;
                ensemble = predict::train_ensemble(current, local, column, predict::EnsembleConfig{cfg.m, cfg.seed});
            };

            for (auto r : rows) {
                CellRef cell{task.table, r, column};
                if (step.strategy == Strategy::formula) {
                    auto value = constraints::evaluate_formula(*step.formula, Workbook({current}), r);
                    if (value) {
                        current = current.with_cell(r, column, *value);
                        result.filled.push_back({cell, *value, "formula", {}});
                        continue;
                    }
                }
                train();
                std::vector<predict::Candidate> candidates;
                try {
                    candidates = predict::predict_candidates(*ensemble, current.rows()[r], cfg.min_weight);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::no_prediction)
                        throw;
                    result.unfillable.push_back(cell);
                    continue;
                }
                std::optional<CellValue> chosen;
                for (const auto& candidate : candidates)
                    if (!violates(usable, current.with_cell(r, column, candidate.value), r, column)) {
                        chosen = candidate.value;
                        break;
                    }
                FilledCell filled{cell, chosen ? *chosen : candidates.front().value, "predicted", {}};
                if (!chosen)
                    filled.flags.push_back("constraint_violating");
                current = current.with_cell(r, column, filled.value);
                result.filled.push_back(std::move(filled));
            }
            if (ensemble)
                result.models.push_back(std::move(*ensemble));
            known.push_back(column);
            std::sort(known.begin(), known.end());
        }

        result.workbook = workbook.with_table(current);
        result.sketch = sketch;
        for (const auto& filled : result.filled) {
            auto& coloring = target_coloring(result.sketch, task.table, filled.cell.col);
            coloring.cells.insert(filled.cell);
            remove_from_other_colorings(result.sketch, filled.cell, coloring);
            result.sketch.machine_generated.insert(filled.cell);
        }
        return result;
    }

    std::string describe_cycle(const std::vector<std::size_t>& cycle, const Table& table)
    {
        std::string out;
        for (auto c : cycle)
            out += (out.empty() ? "" : " -> ") + table.header()[c];
        return out;
    }

} // namespace

CompletionPlan plan_completion(
    const Table& table, const predict::PredictionTask& task, const std::vector<ConstraintInstance>& found)
{
    std::set<std::size_t> targets(task.target_cols.begin(), task.target_cols.end());
    std::map<std::size_t, ConstraintInstance> chosen;
    std::map<std::size_t, std::set<std::size_t>> depends;

    for (auto v : targets) {
        std::optional<std::pair<std::size_t, std::size_t>> best; // (target operands, discovery index)
        for (std::size_t i = 0; i < found.size(); ++i) {
            const auto& c = found[i];
            if (!constraints::is_formula(c.name) || c.args.empty())
                continue;
            bool local = std::all_of(c.args.begin(), c.args.end(), [&](const auto& ref) {
                return ref.table == table.name() && ref.orientation == Orientation::column;
            });
            if (!local || c.args[0].index != v)
                continue;
            bool self = std::any_of(c.args.begin() + 1, c.args.end(), [&](const auto& ref) { return ref.index == v; });
            if (self)
                continue;
            std::size_t pending = std::count_if(
                c.args.begin() + 1, c.args.end(), [&](const auto& ref) { return targets.count(ref.index) > 0; });
            if (!best || std::make_pair(pending, i) < *best)
                best = {pending, i};
        }
        if (!best)
            continue;
        const auto& formula = found[best->second];
        chosen.emplace(v, formula);
        for (auto it = formula.args.begin() + 1; it != formula.args.end(); ++it)
            if (targets.count(it->index))
                depends[v].insert(it->index);
    }

    // Kahn's algorithm, lowest column first among the ready targets.
    std::map<std::size_t, std::size_t> indegree;
    for (auto v : targets)
        indegree[v] = depends[v].size();
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (const auto& [v, d] : indegree)
        if (d == 0)
            ready.push(v);
    CompletionPlan plan;
    while (!ready.empty()) {
        auto v = ready.top();
        ready.pop();
        PlanStep step{v, Strategy::ensemble, std::nullopt};
        if (auto it = chosen.find(v); it != chosen.end()) {
            step.strategy = Strategy::formula;
            step.formula = it->second;
        }
        plan.steps.push_back(std::move(step));
        for (auto w : targets)
            if (depends[w].count(v) && --indegree[w] == 0)
                ready.push(w);
    }

    if (plan.steps.size() != targets.size()) {
        // Walk dependencies from an unplaced target until one repeats.
        std::size_t start = 0;
        for (const auto& [v, d] : indegree)
            if (d > 0) {
                start = v;
                break;
            }
        std::vector<std::size_t> path{start};
        std::set<std::size_t> seen{start};
        while (true) {
            std::size_t next = 0;
            for (auto u : depends[path.back()])
                if (indegree[u] > 0) {
                    next = u;
                    break;
                }
            if (seen.count(next)) {
                auto from = std::find(path.begin(), path.end(), next);
                std::vector<std::size_t> cycle(from, path.end());
                cycle.push_back(next);
                throw Error(ErrorCode::cycle, "formulas among the targets depend on each other",
                    describe_cycle(cycle, table));
            }
            seen.insert(next);
            path.push_back(next);
        }
    }
    return plan;
}

CompletionResult complete(const Workbook& workbook, const Sketch& sketch, const CompletionConfig& cfg)
{
    auto task = predict::derive_prediction_task(workbook, sketch, cfg.table);
    Workbook region({workbook.table(task.table)});
    Sketch local;
    for (const auto& coloring : sketch.colorings) {
        Coloring kept{coloring.color, coloring.role, {}};
        for (const auto& cell : coloring.cells)
            if (cell.table == task.table)
                kept.cells.insert(cell);
        local.colorings.push_back(std::move(kept));
    }
    auto found = constraints::learn_constraints(region, local);
    return run(workbook, sketch, task, found, cfg);
}

CompletionResult correct_and_rerun(const CompletionResult& previous, const std::map<CellRef, CellValue>& corrections,
    const Workbook& workbook, const Sketch& sketch, const CompletionConfig& cfg)
{
    const auto& task = previous.task;
    Table base = workbook.table(task.table);
    for (const auto& [cell, value] : corrections) {
        bool target = std::find(task.target_cols.begin(), task.target_cols.end(), cell.col) != task.target_cols.end();
        bool inside = cell.table == task.table && cell.row < base.row_count() && cell.col < base.col_count();
        if (!inside || !target || task.excluded_rows.count(cell.row) || !base.at(cell.row, cell.col).is_missing())
            throw Error(ErrorCode::validation, "corrections must target cells the completion filled",
                cell.table + " row " + std::to_string(cell.row + 1) + " col " + std::to_string(cell.col + 1));
        if (!value.is_observed())
            throw Error(ErrorCode::validation, "a correction needs a value",
                cell.table + " row " + std::to_string(cell.row + 1) + " col " + std::to_string(cell.col + 1));
        base = base.with_cell(cell.row, cell.col, value);
    }

    auto result = run(workbook.with_table(base), sketch, task, previous.constraints, cfg);
    auto usable = usable_constraints(previous.constraints, result.workbook.table(task.table), task);
    for (const auto& [cell, value] : corrections) {
        FilledCell entry{cell, value, "user", {}};
        if (violates(usable, result.workbook.table(task.table), cell.row, cell.col))
            entry.flags.push_back("constraint_violating");
        result.corrected.push_back(std::move(entry));
        auto& coloring = target_coloring(result.sketch, task.table, cell.col);
        coloring.cells.insert(cell);
        remove_from_other_colorings(result.sketch, cell, coloring);
        result.sketch.machine_generated.erase(cell);
    }
    return result;
}

Json result_to_json(const CompletionResult& result)
{
    const auto cells = [](const std::vector<FilledCell>& entries) {
        Json out = Json::array();
        for (const auto& e : entries)
            out.push_back({{"cell", cellref_to_json(e.cell)}, {"value", cell_to_json(e.value)},
                {"provenance", e.provenance}, {"flags", e.flags}});
        return out;
    };
    const auto& header = result.workbook.table(result.task.table).header();
    Json plan = Json::array();
    for (const auto& step : result.plan.steps) {
        Json entry = {{"column", header[step.column]},
            {"strategy", step.strategy == Strategy::formula ? "formula" : "ensemble"}};
        if (step.formula)
            entry["formula"] = constraints::render(*step.formula);
        plan.push_back(entry);
    }
    Json found = Json::array();
    for (const auto& c : result.constraints)
        found.push_back(constraints::render(c));
    Json models = Json::array();
    for (const auto& e : result.models)
        models.push_back(predict::ensemble_to_json(e));
    Json unfillable = Json::array();
    for (const auto& cell : result.unfillable)
        unfillable.push_back(cellref_to_json(cell));
    Json inputs = Json::array(), targets = Json::array(), excluded = Json::array();
    for (auto c : result.task.input_cols)
        inputs.push_back(header[c]);
    for (auto c : result.task.target_cols)
        targets.push_back(header[c]);
    for (auto r : result.task.excluded_rows)
        excluded.push_back(r + 1);
    return {{"task", {{"table", result.task.table}, {"inputs", inputs}, {"targets", targets}, {"excluded_rows", excluded}}},
        {"plan", plan}, {"constraints", found}, {"filled", cells(result.filled)}, {"corrected", cells(result.corrected)},
        {"unfillable", unfillable}, {"models", models}};
}

} // namespace sketchsci::autocomplete
