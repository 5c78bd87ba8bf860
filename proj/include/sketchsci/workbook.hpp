#pragma once

#include "sketchsci/cell.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace sketchsci {

using Row = std::vector<CellValue>;

/// Rectangular grid of cells with a header; column types are inferred on
/// construction and kept in sync by every with_* method.
class Table {
public:
    Table() = default;
    Table(std::string name, std::vector<std::string> header, std::vector<Row> rows);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<TypeTag>& col_types() const { return col_types_; }

    std::size_t row_count() const { return rows_.size(); }
    std::size_t col_count() const { return header_.size(); }
    const CellValue& at(std::size_t row, std::size_t col) const { return rows_.at(row).at(col); }

    std::optional<std::size_t> column_index(std::string_view column) const;
    std::vector<CellValue> column(std::size_t col) const;

    Table with_cell(std::size_t row, std::size_t col, CellValue value) const;
    Table with_name(std::string name) const;
    /// Replaces the column if one with this name exists, otherwise appends it.
    Table with_column(const std::string& column, std::vector<CellValue> values) const;

    friend bool operator==(const Table&, const Table&) = default;

private:
    void infer_types();

    std::string name_;
    std::vector<std::string> header_;
    std::vector<Row> rows_;
    std::vector<TypeTag> col_types_;
};

/// Vacuous columns (no observed cell) default to textual.
TypeTag infer_type(const std::vector<CellValue>& cells);

struct ForeignKey {
    std::string from_table;
    std::vector<std::string> from_cols;
    std::string to_table;
    std::vector<std::string> to_cols;

    friend bool operator==(const ForeignKey&, const ForeignKey&) = default;
};

class Workbook {
public:
    Workbook() = default;
    Workbook(std::vector<Table> tables, std::vector<ForeignKey> schema = {});

    const std::vector<Table>& tables() const { return tables_; }
    const std::vector<ForeignKey>& schema() const { return schema_; }

    const Table* find(std::string_view name) const;
    const Table& table(std::string_view name) const;
    std::optional<std::size_t> table_index(std::string_view name) const;

    /// Replaces the table of the same name, or appends it.
    Workbook with_table(Table table) const;

    friend bool operator==(const Workbook&, const Workbook&) = default;

private:
    std::vector<Table> tables_;
    std::vector<ForeignKey> schema_;
};

} // namespace sketchsci
