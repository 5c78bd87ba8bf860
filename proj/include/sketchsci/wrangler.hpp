#pragma once

#include "sketchsci/io.hpp"
#include "sketchsci/sketch.hpp"

#include <map>
#include <optional>
#include <variant>
#include <vector>

namespace sketchsci::wrangle {

/// Cells with data to their right keep the column; the rest move to a new column after it.
struct Split {
    std::size_t col;
    friend bool operator==(const Split&, const Split&) = default;
};
struct ForwardFill {
    std::size_t col;
    friend bool operator==(const ForwardFill&, const ForwardFill&) = default;
};
struct Pivot {
    std::size_t key;
    std::size_t value;
    friend bool operator==(const Pivot&, const Pivot&) = default;
};
struct DropEmptyRows {
    friend bool operator==(const DropEmptyRows&, const DropEmptyRows&) = default;
};
struct DropEmptyColumns {
    friend bool operator==(const DropEmptyColumns&, const DropEmptyColumns&) = default;
};

/// Alternative order doubles as the tie-break order between transforms.
using Transform = std::variant<Split, ForwardFill, Pivot, DropEmptyRows, DropEmptyColumns>;

struct TransformProgram {
    std::vector<Transform> steps;
    friend bool operator==(const TransformProgram&, const TransformProgram&) = default;
};

std::string describe(const Transform& t);
/// Strict weak order: kind, then column indices.
bool transform_less(const Transform& a, const Transform& b);

/// Grid of cells where each cell remembers which input cells it came from.
/// Pivot header cells merge every key cell that named their column.
struct ProvenancedGrid {
    std::vector<std::vector<CellValue>> cells;
    std::vector<std::vector<std::vector<CellRef>>> origins;
    std::optional<std::size_t> header_row;

    std::size_t rows() const { return cells.size(); }
    std::size_t cols() const { return cells.empty() ? 0 : cells.front().size(); }

    friend bool operator==(const ProvenancedGrid&, const ProvenancedGrid&) = default;
};

/// Every body cell of the table with itself as origin; no header row.
ProvenancedGrid grid_from_table(const Table& table);

/// Header row (if any) becomes the column names; blank names become "ColumnN".
Table table_from_grid(const ProvenancedGrid& grid, const std::string& name);

/// color -> original cells that must end up in one row.
using WranglingSketch = std::map<std::string, std::set<CellRef>>;

/// Group colorings of the sketch that touch `table`.
WranglingSketch wrangling_sketch(const Sketch& sketch, const std::string& table);

ProvenancedGrid apply_transform(const ProvenancedGrid& grid, const Transform& t);
ProvenancedGrid apply_program(const ProvenancedGrid& grid, const TransformProgram& program);

struct SketchCheck {
    bool satisfied = true;
    std::size_t violations = 0;
};

SketchCheck check_sketch(const ProvenancedGrid& grid, const WranglingSketch& sketch);

double score_candidate(const ProvenancedGrid& grid, const WranglingSketch& sketch);

struct SynthesisConfig {
    std::size_t beam = 5;
    std::size_t max_depth = 6;
    /// Levels up to this depth keep every distinct grid and try every
    /// transform, as long as the evaluation budget allows; deeper levels are
    /// beam-truncated and only try proposed transforms.
    std::size_t exhaustive_depth = 3;
    std::size_t exhaustive_budget = 20000;
};

struct SynthesisResult {
    TransformProgram program;
    ProvenancedGrid grid;
    double score = 0.0;
};

/// Beam search over transform programs; throws ErrorCode::exhausted with the
/// best partial program in the details when nothing satisfies the sketch.
SynthesisResult synthesize_program(const Table& input, const WranglingSketch& sketch, const SynthesisConfig& cfg = {});

/// Transforms worth trying on `grid`, most promising first: cue-matching
/// pivots, other pivots, splits, forward fills, drops.
std::vector<Transform> propose_transforms(const ProvenancedGrid& grid, const WranglingSketch& sketch);

/// Every transform applicable to a grid with `cols` columns.
std::vector<Transform> all_transforms(std::size_t cols);

Json program_to_json(const TransformProgram& program);
TransformProgram program_from_json(const Json& value);

} // namespace sketchsci::wrangle
