#pragma once

#include "sketchsci/sketch.hpp"
#include "sketchsci/workbook.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sketchsci::constraints {

enum class Orientation { row, column };

/// A whole row or column of a table, restricted to `positions` (row indices
/// for a column, column indices for a row).
struct VectorRef {
    std::string table;
    Orientation orientation = Orientation::column;
    std::size_t index = 0;
    std::vector<std::size_t> positions;
    std::string name; ///< header for columns, "row N" for rows

    friend bool operator==(const VectorRef&, const VectorRef&) = default;
    friend auto operator<=>(const VectorRef&, const VectorRef&) = default;
};

struct Vector {
    VectorRef ref;
    std::vector<CellValue> cells; ///< one per position
    TypeTag type = TypeTag::numeric;
};

/// Adjacent vectors of one table, orientation and type.
struct Block {
    std::vector<Vector> vectors;
};

/// The part of a table a sketch selects.
struct TableView {
    std::string table;
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
};

TableView full_view(const Table& table);

/// Column and row blocks of a view. Vectors whose full original row/column
/// is mixed or unobserved are dropped; a gap in the view breaks a block.
std::vector<Block> partition_blocks(const Table& table, const TableView& view);
std::vector<Block> partition_blocks(const Table& table);

/// Keeps the rows and columns holding input/target cells (every table when
/// nothing is colored) and drops rows with an exclude cell. Throws an
/// empty-selection error when nothing is left.
std::vector<TableView> restrict_by_sketch(const Workbook& workbook, const Sketch& sketch);

/// args[0] is the constrained vector; for formulas the rest are operands.
struct ConstraintInstance {
    std::string name;
    std::vector<VectorRef> args;

    friend bool operator==(const ConstraintInstance&, const ConstraintInstance&) = default;
    friend auto operator<=>(const ConstraintInstance&, const ConstraintInstance&) = default;
};

/// Catalog order: ROW_SUM, MAX, MIN, AVERAGE, DIFFERENCE, PRODUCT, EQUAL,
/// ASCENDING, ALLDIFFERENT, FOREIGNKEY.
const std::vector<std::string>& catalog();

/// Formulas determine args[0] from the remaining arguments.
bool is_formula(const std::string& name);

/// `Total = SUM(June, July, Aug)`, `ASCENDING(Total)`, ...
std::string render(const ConstraintInstance& constraint);

struct DiscoveryConfig {
    std::size_t max_addends = 4;
    std::size_t min_support = 2;
};

/// Every satisfied template instance over sub-blocks of `blocks`, sorted.
std::vector<ConstraintInstance> find_constraints(const std::vector<Block>& blocks, const DiscoveryConfig& cfg = {});

/// Discovery over the sketch-restricted workbook.
std::vector<ConstraintInstance> learn_constraints(
    const Workbook& workbook, const Sketch& sketch, const DiscoveryConfig& cfg = {});

/// |a - b| <= 1e-6 * max(1, |a|, |b|)
bool nearly_equal(double a, double b);

/// Re-evaluates on current values; positions with an unobserved referenced
/// cell are skipped. Throws a stale-reference error on dangling references.
bool check_constraint(const ConstraintInstance& constraint, const Workbook& workbook);

/// Value of args[0] at `position` computed from the operands, when they are
/// all observed numbers (or the observed value for EQUAL).
std::optional<CellValue> evaluate_formula(
    const ConstraintInstance& constraint, const Workbook& workbook, std::size_t position);

/// The same constraint spanning every position of its vectors.
ConstraintInstance widen(const ConstraintInstance& constraint, const Workbook& workbook);

/// The cell of `ref` at `position`.
CellRef cell_at(const VectorRef& ref, std::size_t position);

} // namespace sketchsci::constraints
