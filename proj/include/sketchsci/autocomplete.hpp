#pragma once

#include "sketchsci/constraints.hpp"
#include "sketchsci/io.hpp"
#include "sketchsci/predict.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sketchsci::autocomplete {

enum class Strategy { formula, ensemble };

struct PlanStep {
    std::size_t column = 0;
    Strategy strategy = Strategy::ensemble;
    std::optional<constraints::ConstraintInstance> formula;
};

struct CompletionPlan {
    std::vector<PlanStep> steps;
};

/// Orders the targets so every formula's target inputs come first (ties
/// left to right). Throws a cycle error on circular formulas.
CompletionPlan plan_completion(
    const Table& table, const predict::PredictionTask& task, const std::vector<constraints::ConstraintInstance>& found);

struct FilledCell {
    CellRef cell;
    CellValue value;
    std::string provenance; ///< "formula", "predicted" or "user"
    std::vector<std::string> flags;
};

struct CompletionConfig {
    unsigned seed = 0;
    std::size_t m = 7;
    double min_weight = 0.02;
    std::optional<std::string> table;
};

struct CompletionResult {
    predict::PredictionTask task;
    std::vector<constraints::ConstraintInstance> constraints;
    CompletionPlan plan;
    std::vector<FilledCell> filled;
    std::vector<FilledCell> corrected;
    std::vector<CellRef> unfillable;
    std::vector<predict::Ensemble> models;
    Workbook workbook;
    Sketch sketch;
};

CompletionResult complete(const Workbook& workbook, const Sketch& sketch, const CompletionConfig& cfg = {});

/// Fixes the corrected cells as observed values, clears every other filled
/// cell and completes again with the previous task and constraints.
/// `workbook` and `sketch` are the inputs of the previous run.
CompletionResult correct_and_rerun(const CompletionResult& previous, const std::map<CellRef, CellValue>& corrections,
    const Workbook& workbook, const Sketch& sketch, const CompletionConfig& cfg = {});

/// {"filled": [...], "corrected": [...], "unfillable": [...], "plan": [...],
///  "constraints": [...], "models": [...]}
Json result_to_json(const CompletionResult& result);

} // namespace sketchsci::autocomplete
