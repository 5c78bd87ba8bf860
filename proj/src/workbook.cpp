#include "sketchsci/workbook.hpp"

#include "sketchsci/error.hpp"

#include <set>

namespace sketchsci {

TypeTag infer_type(const std::vector<CellValue>& cells)
{
    std::optional<TypeTag> seen;
    for (const auto& cell : cells) {
        if (!cell.is_observed())
            continue;
        if (!seen)
            seen = cell.type();
        else if (*seen != cell.type())
            return TypeTag::mixed;
    }
    return seen.value_or(TypeTag::textual);
}

Table::Table(std::string name, std::vector<std::string> header, std::vector<Row> rows)
    : name_(std::move(name)), header_(std::move(header)), rows_(std::move(rows))
{
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r].size() != header_.size())
            throw Error(ErrorCode::structural,
                "table '" + name_ + "': row " + std::to_string(r + 1) + " has " + std::to_string(rows_[r].size())
                    + " cells, header has " + std::to_string(header_.size()));
    }
    infer_types();
}

void Table::infer_types()
{
    col_types_.clear();
    for (std::size_t c = 0; c < header_.size(); ++c)
        col_types_.push_back(infer_type(column(c)));
}

std::optional<std::size_t> Table::column_index(std::string_view column) const
{
    for (std::size_t c = 0; c < header_.size(); ++c)
        if (header_[c] == column)
            return c;
    return std::nullopt;
}

std::vector<CellValue> Table::column(std::size_t col) const
{
    std::vector<CellValue> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_)
        out.push_back(row.at(col));
    return out;
}

Table Table::with_cell(std::size_t row, std::size_t col, CellValue value) const
{
    Table copy = *this;
    copy.rows_.at(row).at(col) = std::move(value);
    copy.col_types_.at(col) = infer_type(copy.column(col));
    return copy;
}

Table Table::with_name(std::string name) const
{
    Table copy = *this;
    copy.name_ = std::move(name);
    return copy;
}

Table Table::with_column(const std::string& column, std::vector<CellValue> values) const
{
    if (values.size() != rows_.size())
        throw Error(ErrorCode::structural, "column '" + column + "' length does not match row count");
    Table copy = *this;
    auto existing = column_index(column);
    std::size_t col = existing.value_or(header_.size());
    if (!existing) {
        copy.header_.push_back(column);
        for (auto& row : copy.rows_)
            row.emplace_back();
    }
    for (std::size_t r = 0; r < values.size(); ++r)
        copy.rows_[r][col] = std::move(values[r]);
    copy.infer_types();
    return copy;
}

Workbook::Workbook(std::vector<Table> tables, std::vector<ForeignKey> schema)
    : tables_(std::move(tables)), schema_(std::move(schema))
{
    std::set<std::string> names;
    for (const auto& table : tables_)
        if (!names.insert(table.name()).second)
            throw Error(ErrorCode::conflict, "duplicate table name '" + table.name() + "'");

    for (const auto& fk : schema_) {
        if (fk.from_cols.empty() || fk.from_cols.size() != fk.to_cols.size())
            throw Error(ErrorCode::validation,
                "foreign key " + fk.from_table + " -> " + fk.to_table + " needs equal, nonempty column lists");
        const auto check = [&](const std::string& table_name, const std::vector<std::string>& cols) {
            const Table* table = find(table_name);
            if (!table)
                throw Error(ErrorCode::validation, "foreign key references unknown table '" + table_name + "'");
            for (const auto& col : cols)
                if (!table->column_index(col))
                    throw Error(ErrorCode::validation,
                        "foreign key references unknown column '" + table_name + "." + col + "'");
        };
        check(fk.from_table, fk.from_cols);
        check(fk.to_table, fk.to_cols);
    }
}

const Table* Workbook::find(std::string_view name) const
{
    for (const auto& table : tables_)
        if (table.name() == name)
            return &table;
    return nullptr;
}

const Table& Workbook::table(std::string_view name) const
{
    if (const Table* table = find(name))
        return *table;
    throw Error(ErrorCode::not_found, "no table named '" + std::string(name) + "'");
}

std::optional<std::size_t> Workbook::table_index(std::string_view name) const
{
    for (std::size_t i = 0; i < tables_.size(); ++i)
        if (tables_[i].name() == name)
            return i;
    return std::nullopt;
}

Workbook Workbook::with_table(Table table) const
{
    auto tables = tables_;
    if (auto index = table_index(table.name()))
        tables[*index] = std::move(table);
    else
        tables.push_back(std::move(table));
    return Workbook(std::move(tables), schema_);
}

} // namespace sketchsci
