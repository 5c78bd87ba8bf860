#include "sketchsci/engine.hpp"

#include "sketchsci/constraints.hpp"
#include "sketchsci/predict.hpp"
#include "sketchsci/selector.hpp"
#include "sketchsci/wrangler.hpp"

#include <algorithm>
#include <array>

namespace sketchsci::engine {

namespace {

    constexpr std::array<std::pair<TaskKind, std::string_view>, 6> kind_names{{
        {TaskKind::wrangle, "wrangle"},
        {TaskKind::select, "select"},
        {TaskKind::cluster, "cluster"},
        {TaskKind::learn_constraints, "learn_constraints"},
        {TaskKind::predict, "predict"},
        {TaskKind::autocomplete, "autocomplete"},
    }};

    /// The explicitly configured table, else the one carrying the role's
    /// cells, else the only table.
    const Table& task_table(const Document& doc, const TaskConfig& cfg, Role role)
    {
        if (cfg.table)
            return doc.workbook.table(*cfg.table);
        for (const auto& cell : doc.sketch.cells_with_role(role))
            return doc.workbook.table(cell.table);
        if (doc.workbook.tables().size() == 1)
            return doc.workbook.tables().front();
        throw Error(ErrorCode::validation, "cannot tell which table the task is about; set \"table\" in the config");
    }

    template <typename T>
    T field(const Json& value, const std::string& key)
    {
        try {
            return value.get<T>();
        } catch (const Json::exception&) {
            throw Error(ErrorCode::configuration, "config key has the wrong type", key);
        }
    }

    Json names(const std::vector<std::size_t>& cols, const Table& table)
    {
        Json out = Json::array();
        for (auto c : cols)
            out.push_back(table.header()[c]);
        return out;
    }

    /// Wrangled cells inherit the group color shared by all their colored origins.
    Sketch color_wrangled(const wrangle::ProvenancedGrid& grid, const Table& output, const Sketch& original)
    {
        Sketch sketch = original;
        for (std::size_t r = 0, out_row = 0; r < grid.rows(); ++r) {
            if (grid.header_row == r)
                continue;
            for (std::size_t c = 0; c < grid.cols(); ++c) {
                std::optional<std::size_t> owner;
                bool clash = false;
                for (const auto& origin : grid.origins[r][c]) {
                    for (std::size_t i = 0; i < original.colorings.size(); ++i) {
                        const auto& coloring = original.colorings[i];
                        if (coloring.role != Role::group || !coloring.cells.count(origin))
                            continue;
                        clash |= owner && *owner != i;
                        owner = i;
                    }
                }
                if (owner && !clash) {
                    CellRef cell{output.name(), out_row, c};
                    sketch.colorings[*owner].cells.insert(cell);
                    sketch.machine_generated.insert(cell);
                }
            }
            ++out_row;
        }
        return sketch;
    }

    TaskOutcome run_wrangle(const Document& input, const TaskConfig& cfg)
    {
        const auto& table = task_table(input, cfg, Role::group);
        auto sketch = wrangle::wrangling_sketch(input.sketch, table.name());
        wrangle::SynthesisConfig scfg;
        scfg.beam = cfg.beam;
        scfg.max_depth = cfg.max_depth;
        auto result = wrangle::synthesize_program(table, sketch, scfg);
        auto output = wrangle::table_from_grid(result.grid, table.name() + "_wrangled");
        Json steps = Json::array();
        for (const auto& t : result.program.steps)
            steps.push_back(wrangle::describe(t));
        TaskOutcome out;
        out.document = {input.workbook.with_table(output), color_wrangled(result.grid, output, input.sketch)};
        out.summary = {{"table", table.name()}, {"output_table", output.name()},
            {"program", wrangle::program_to_json(result.program)}, {"steps", steps}, {"score", result.score}};
        return out;
    }

    TaskOutcome run_select(const Document& input, const TaskConfig& cfg)
    {
        select::SelectionConfig scfg;
        scfg.seed = cfg.seed;
        auto result = select::run_selection(input.workbook, input.sketch, scfg);
        Json queries = Json::array();
        for (const auto& q : result.queries)
            queries.push_back(select::to_prolog(q, result.tmpl));
        TaskOutcome out;
        out.document = {input.workbook, result.sketch};
        out.summary = {{"queries", queries}, {"warnings", result.warnings}};
        return out;
    }

    TaskOutcome run_cluster(const Document& input, const TaskConfig& cfg)
    {
        const auto& table = task_table(input, cfg, Role::group);
        auto result = cluster::run_clustering(table, input.sketch, cfg.overrides, cfg.seed);
        Json constraints = Json::array();
        for (const auto& c : result.constraints)
            constraints.push_back(cluster::to_string(c));
        Json assignment = Json::array();
        for (std::size_t r = 0; r < result.assignment.cluster_of.size(); ++r)
            assignment.push_back({{"row", r + 1}, {"cluster", result.assignment.cluster_of[r]}});
        TaskOutcome out;
        out.document = {input.workbook.with_table(result.table), result.sketch};
        out.summary = {{"table", table.name()}, {"k", result.assignment.k}, {"constraints", constraints},
            {"assignment", assignment},
            {"violations", cluster::count_violations(result.assignment, result.constraints)}};
        return out;
    }

    TaskOutcome run_constraints(const Document& input, const TaskConfig& cfg)
    {
        constraints::DiscoveryConfig dcfg;
        dcfg.max_addends = cfg.max_addends;
        auto found = constraints::learn_constraints(input.workbook, input.sketch, dcfg);
        Json rendered = Json::array();
        for (const auto& c : found)
            rendered.push_back(constraints::render(c));
        return {input, {{"constraints", rendered}}, nullptr};
    }

    /// Independent per-target predictions without formulas or ordering.
    TaskOutcome run_predict(const Document& input, const TaskConfig& cfg)
    {
        auto task = predict::derive_prediction_task(input.workbook, input.sketch, cfg.table);
        const auto& original = input.workbook.table(task.table);
        Table filled_table = original;
        Sketch sketch = input.sketch;
        Json filled = Json::array(), unfillable = Json::array(), models = Json::array();
        for (auto target : task.target_cols) {
            auto ensemble = predict::train_ensemble(original, task, target, {cfg.m, cfg.seed});
            models.push_back(predict::ensemble_to_json(ensemble));
            Coloring* home = nullptr;
            for (auto& coloring : sketch.colorings)
                if (coloring.role == Role::target && !home)
                    home = &coloring;
            for (std::size_t r = 0; r < original.row_count(); ++r) {
                if (task.excluded_rows.count(r) || !original.at(r, target).is_missing())
                    continue;
                CellRef cell{task.table, r, target};
                try {
                    auto best = predict::predict_candidates(ensemble, original.rows()[r], cfg.min_weight).front();
                    filled_table = filled_table.with_cell(r, target, best.value);
                    if (!home) {
                        sketch.colorings.push_back({"blue", Role::target, {}});
                        home = &sketch.colorings.back();
                    }
                    home->cells.insert(cell);
                    sketch.machine_generated.insert(cell);
                    filled.push_back({{"cell", cellref_to_json(cell)}, {"value", cell_to_json(best.value)},
                        {"provenance", "predicted"}, {"score", best.score}});
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::no_prediction)
                        throw;
                    unfillable.push_back(cellref_to_json(cell));
                }
            }
        }
        TaskOutcome out;
        out.document = {input.workbook.with_table(filled_table), sketch};
        out.summary = {{"task", {{"table", task.table}, {"inputs", names(task.input_cols, original)},
                                    {"targets", names(task.target_cols, original)}}},
            {"filled", filled}, {"unfillable", unfillable}, {"models", models}};
        return out;
    }

    autocomplete::CompletionConfig completion_config(const TaskConfig& cfg)
    {
        autocomplete::CompletionConfig out;
        out.seed = cfg.seed;
        out.m = cfg.m;
        out.min_weight = cfg.min_weight;
        out.table = cfg.table;
        return out;
    }

    TaskOutcome completion_outcome(autocomplete::CompletionResult result)
    {
        TaskOutcome out;
        out.summary = autocomplete::result_to_json(result);
        out.document = {result.workbook, result.sketch};
        out.completion = std::make_shared<const autocomplete::CompletionResult>(std::move(result));
        return out;
    }

    Session append(Session session, HistoryEntry entry)
    {
        session.history.resize(session.current + 1);
        session.history.push_back(std::move(entry));
        session.current = session.history.size() - 1;
        return session;
    }

} // namespace

std::string_view to_string(TaskKind kind)
{
    for (const auto& [k, name] : kind_names)
        if (k == kind)
            return name;
    return "?";
}

TaskKind task_kind_from_string(std::string_view text)
{
    if (text == "constraints")
        return TaskKind::learn_constraints;
    for (const auto& [k, name] : kind_names)
        if (name == text)
            return k;
    throw Error(ErrorCode::not_found, "unknown task kind", std::string(text));
}

const std::set<Role>& accepted_roles(TaskKind kind)
{
    static const std::set<Role> group{Role::group};
    static const std::set<Role> selection{Role::positive, Role::negative};
    static const std::set<Role> modelling{Role::input, Role::target, Role::exclude};
    switch (kind) {
    case TaskKind::wrangle:
    case TaskKind::cluster:
        return group;
    case TaskKind::select:
        return selection;
    default:
        return modelling;
    }
}

TaskConfig config_from_json(const Json& value)
{
    TaskConfig cfg;
    if (value.is_null())
        return cfg;
    if (!value.is_object())
        throw Error(ErrorCode::configuration, "config must be a JSON object");
    for (const auto& [key, v] : value.items()) {
        if (key == "seed")
            cfg.seed = field<unsigned>(v, key);
        else if (key == "beam")
            cfg.beam = field<std::size_t>(v, key);
        else if (key == "max_depth")
            cfg.max_depth = field<std::size_t>(v, key);
        else if (key == "m")
            cfg.m = field<std::size_t>(v, key);
        else if (key == "min_weight")
            cfg.min_weight = field<double>(v, key);
        else if (key == "max_addends")
            cfg.max_addends = field<std::size_t>(v, key);
        else if (key == "table")
            cfg.table = field<std::string>(v, key);
        else if (key == "ordinals")
            cfg.overrides.ordinals = field<std::map<std::string, std::vector<std::string>>>(v, key);
        else if (key == "identifiers")
            cfg.overrides.identifiers = field<std::vector<std::string>>(v, key);
        else
            throw Error(ErrorCode::configuration, "unknown config key", key);
        if ((key == "seed" || key == "beam" || key == "max_depth" || key == "m" || key == "max_addends")
            && !v.is_number_unsigned())
            throw Error(ErrorCode::configuration, "config key needs a non-negative integer", key);
    }
    if (cfg.beam == 0)
        throw Error(ErrorCode::configuration, "beam must be positive", "beam");
    return cfg;
}

Json config_to_json(const TaskConfig& cfg)
{
    Json out = {{"seed", cfg.seed}, {"beam", cfg.beam}, {"max_depth", cfg.max_depth}, {"m", cfg.m},
        {"min_weight", cfg.min_weight}, {"max_addends", cfg.max_addends}, {"ordinals", cfg.overrides.ordinals},
        {"identifiers", cfg.overrides.identifiers}};
    if (cfg.table)
        out["table"] = *cfg.table;
    return out;
}

namespace {

    TaskOutcome dispatch(TaskKind kind, const Document& input, const TaskConfig& cfg)
    {
        validate_sketch(input.sketch, input.workbook);
        require_roles(input.sketch, accepted_roles(kind), to_string(kind));
        switch (kind) {
    case TaskKind::wrangle:
        return run_wrangle(input, cfg);
    case TaskKind::select:
        return run_select(input, cfg);
    case TaskKind::cluster:
        return run_cluster(input, cfg);
    case TaskKind::learn_constraints:
        return run_constraints(input, cfg);
    case TaskKind::predict:
        return run_predict(input, cfg);
    case TaskKind::autocomplete:
        return completion_outcome(autocomplete::complete(input.workbook, input.sketch, completion_config(cfg)));
    }
    throw Error(ErrorCode::invalid_arguments, "unknown task kind");
    }

} // namespace

TaskOutcome execute(TaskKind kind, const Document& input, const TaskConfig& cfg)
{
    try {
        return dispatch(kind, input, cfg);
    } catch (const Error& e) {
        throw Error(e.code(), std::string(to_string(kind)) + ": " + e.what(), e.details());
    }
}

Session open_session(std::string id, Document document)
{
    validate_sketch(document.sketch, document.workbook);
    Session session;
    session.id = std::move(id);
    HistoryEntry entry;
    entry.document = std::move(document);
    entry.summary = {{"action", "load"}};
    session.history.push_back(std::move(entry));
    return session;
}

Session run_task(Session session, TaskKind kind, const TaskConfig& cfg)
{
    auto outcome = execute(kind, session.state(), cfg);
    HistoryEntry entry;
    entry.document = std::move(outcome.document);
    entry.kind = kind;
    entry.summary = std::move(outcome.summary);
    entry.config = cfg;
    entry.completion = std::move(outcome.completion);
    if (entry.completion)
        entry.completion_input = std::make_shared<const Document>(session.state());
    return append(std::move(session), std::move(entry));
}

Session set_sketch(Session session, Sketch sketch)
{
    validate_sketch(sketch, session.state().workbook);
    HistoryEntry entry;
    entry.document = {session.state().workbook, std::move(sketch)};
    entry.summary = {{"action", "sketch"}};
    return append(std::move(session), std::move(entry));
}

Session apply_corrections(Session session, const std::map<CellRef, CellValue>& corrections)
{
    const auto& current = session.entry();
    if (!current.completion)
        throw Error(ErrorCode::validation, "corrections need a completion as the current state");
    auto merged = current.corrections;
    for (const auto& [cell, value] : corrections)
        merged[cell] = value;
    const auto& input = *current.completion_input;
    auto result = autocomplete::correct_and_rerun(
        *current.completion, merged, input.workbook, input.sketch, completion_config(current.config));
    auto outcome = completion_outcome(std::move(result));
    HistoryEntry entry;
    entry.document = std::move(outcome.document);
    entry.kind = TaskKind::autocomplete;
    entry.summary = std::move(outcome.summary);
    entry.config = current.config;
    entry.completion = std::move(outcome.completion);
    entry.completion_input = current.completion_input;
    entry.corrections = std::move(merged);
    return append(std::move(session), std::move(entry));
}

Session revert(Session session, std::size_t index)
{
    if (index >= session.history.size())
        throw Error(ErrorCode::index, "history index out of range",
            std::to_string(index) + " of " + std::to_string(session.history.size()));
    session.current = index;
    return session;
}

Json session_to_json(const Session& session)
{
    Json history = Json::array();
    for (std::size_t i = 0; i < session.history.size(); ++i) {
        const auto& entry = session.history[i];
        history.push_back({{"index", i}, {"kind", entry.kind ? Json(to_string(*entry.kind)) : Json(nullptr)},
            {"summary", entry.summary}});
    }
    return {{"id", session.id}, {"current", session.current}, {"document", document_to_json(session.state())},
        {"history", history}};
}

Json error_to_json(const Error& error)
{
    return {{"code", to_string(error.code())}, {"message", error.what()}, {"details", error.details()}};
}

int exit_code(ErrorCode code)
{
    switch (code) {
    case ErrorCode::infeasible:
    case ErrorCode::exhausted:
    case ErrorCode::inconsistency:
        return 3;
    case ErrorCode::validation:
    case ErrorCode::structural:
    case ErrorCode::conflict:
    case ErrorCode::invalid_arguments:
    case ErrorCode::schema:
    case ErrorCode::configuration:
    case ErrorCode::stale_reference:
    case ErrorCode::empty_selection:
    case ErrorCode::untrainable_target:
    case ErrorCode::cycle:
    case ErrorCode::task_role:
    case ErrorCode::index:
        return 2;
    default:
        return 1;
    }
}

} // namespace sketchsci::engine
