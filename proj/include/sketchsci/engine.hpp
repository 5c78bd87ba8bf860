#pragma once

#include "sketchsci/autocomplete.hpp"
#include "sketchsci/cluster.hpp"
#include "sketchsci/error.hpp"
#include "sketchsci/io.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sketchsci::engine {

enum class TaskKind { wrangle, select, cluster, learn_constraints, predict, autocomplete };

std::string_view to_string(TaskKind kind);
/// Accepts the API spelling ("learn_constraints") and the CLI one ("constraints").
TaskKind task_kind_from_string(std::string_view text);

/// Roles a sketch may carry for the task.
const std::set<Role>& accepted_roles(TaskKind kind);

/// Every knob of every task; one document per request.
struct TaskConfig {
    unsigned seed = 0;
    std::size_t beam = 5;
    std::size_t max_depth = 6;
    std::size_t m = 7;
    double min_weight = 0.02;
    std::size_t max_addends = 4;
    std::optional<std::string> table;
    cluster::FeatureOverrides overrides;

    friend bool operator==(const TaskConfig&, const TaskConfig&) = default;
};

/// Throws a configuration error on unknown keys or mistyped values.
TaskConfig config_from_json(const Json& value);
Json config_to_json(const TaskConfig& cfg);

struct TaskOutcome {
    Document document;
    Json summary;
    std::shared_ptr<const autocomplete::CompletionResult> completion;
};

/// Runs one task on a document without touching any session.
TaskOutcome execute(TaskKind kind, const Document& input, const TaskConfig& cfg);

struct HistoryEntry {
    Document document;
    std::optional<TaskKind> kind; ///< empty for loads and sketch edits
    Json summary;
    TaskConfig config;
    /// Autocomplete entries keep what the correction loop needs.
    std::shared_ptr<const autocomplete::CompletionResult> completion;
    std::shared_ptr<const Document> completion_input;
    std::map<CellRef, CellValue> corrections;
};

struct Session {
    std::string id;
    std::vector<HistoryEntry> history;
    std::size_t current = 0;

    const HistoryEntry& entry() const { return history.at(current); }
    const Document& state() const { return entry().document; }
};

Session open_session(std::string id, Document document);

/// Appends the task's result after truncating everything past `current`.
Session run_task(Session session, TaskKind kind, const TaskConfig& cfg = {});

/// Appends an entry holding the current workbook under a new sketch.
Session set_sketch(Session session, Sketch sketch);

/// Requires the current entry to be a completion; earlier corrections of
/// the same completion are kept, new ones override them.
Session apply_corrections(Session session, const std::map<CellRef, CellValue>& corrections);

Session revert(Session session, std::size_t index);

/// {id, current, document, history: [{index, kind, summary}]}
Json session_to_json(const Session& session);

/// {code, message, details}
Json error_to_json(const Error& error);

/// 0 success, 2 validation, 3 infeasible or exhausted, 1 otherwise.
int exit_code(ErrorCode code);

} // namespace sketchsci::engine
