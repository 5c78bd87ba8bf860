#include "sketchsci/io.hpp"

#include "sketchsci/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sketchsci {

namespace fs = std::filesystem;

Json cell_to_json(const CellValue& cell)
{
    if (cell.is_empty())
        return nullptr;
    if (cell.is_missing())
        return "?";
    if (cell.is_bool())
        return cell.flag();
    if (cell.is_text())
        return cell.text();
    double value = cell.number();
    if (value == std::floor(value) && std::fabs(value) < 9e15)
        return static_cast<std::int64_t>(value);
    return value;
}

CellValue cell_from_json(const Json& value)
{
    if (value.is_null())
        return Empty{};
    if (value.is_boolean())
        return value.get<bool>();
    if (value.is_number())
        return value.get<double>();
    if (value.is_string()) {
        auto text = value.get<std::string>();
        if (text == "?")
            return Missing{};
        return text;
    }
    throw Error(ErrorCode::validation, "cell must be a number, string, boolean or null");
}

Json cellref_to_json(const CellRef& ref)
{
    return Json{{"table", ref.table}, {"row", ref.row + 1}, {"col", ref.col + 1}};
}

CellRef cellref_from_json(const Json& value)
{
    try {
        auto row = value.at("row").get<long long>();
        auto col = value.at("col").get<long long>();
        if (row < 1 || col < 1)
            throw Error(ErrorCode::validation, "cell references are 1-based");
        return CellRef{value.at("table").get<std::string>(), static_cast<std::size_t>(row - 1),
            static_cast<std::size_t>(col - 1)};
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::validation, std::string("malformed cell reference: ") + e.what());
    }
}

Json sketch_to_json(const Sketch& sketch)
{
    Json colorings = Json::array();
    for (const auto& coloring : sketch.colorings) {
        Json cells = Json::array();
        for (const auto& cell : coloring.cells)
            cells.push_back(cellref_to_json(cell));
        colorings.push_back({{"color", coloring.color}, {"role", to_string(coloring.role)}, {"cells", cells}});
    }
    Json machine = Json::array();
    for (const auto& cell : sketch.machine_generated)
        machine.push_back(cellref_to_json(cell));
    return Json{{"colorings", colorings}, {"machine_generated", machine}};
}

Sketch sketch_from_json(const Json& value)
{
    Sketch sketch;
    if (value.is_null())
        return sketch;
    try {
        for (const auto& item : value.value("colorings", Json::array())) {
            Coloring coloring;
            coloring.color = item.at("color").get<std::string>();
            coloring.role = role_from_string(item.at("role").get<std::string>());
            for (const auto& cell : item.value("cells", Json::array()))
                coloring.cells.insert(cellref_from_json(cell));
            sketch.colorings.push_back(std::move(coloring));
        }
        for (const auto& cell : value.value("machine_generated", Json::array()))
            sketch.machine_generated.insert(cellref_from_json(cell));
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::validation, std::string("malformed sketch: ") + e.what());
    }
    return sketch;
}

Json schema_to_json(const std::vector<ForeignKey>& schema)
{
    Json keys = Json::array();
    for (const auto& fk : schema)
        keys.push_back({{"from_table", fk.from_table}, {"from_cols", fk.from_cols}, {"to_table", fk.to_table},
            {"to_cols", fk.to_cols}});
    return Json{{"foreign_keys", keys}};
}

std::vector<ForeignKey> schema_from_json(const Json& value)
{
    std::vector<ForeignKey> schema;
    if (value.is_null())
        return schema;
    try {
        for (const auto& item : value.value("foreign_keys", Json::array()))
            schema.push_back(ForeignKey{item.at("from_table").get<std::string>(),
                item.at("from_cols").get<std::vector<std::string>>(), item.at("to_table").get<std::string>(),
                item.at("to_cols").get<std::vector<std::string>>()});
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::validation, std::string("malformed schema: ") + e.what());
    }
    return schema;
}

Json document_to_json(const Document& document)
{
    Json tables = Json::array();
    for (const auto& table : document.workbook.tables()) {
        Json rows = Json::array();
        for (const auto& row : table.rows()) {
            Json cells = Json::array();
            for (const auto& cell : row)
                cells.push_back(cell_to_json(cell));
            rows.push_back(std::move(cells));
        }
        tables.push_back({{"name", table.name()}, {"header", table.header()}, {"rows", rows}});
    }
    return Json{{"tables", tables}, {"schema", schema_to_json(document.workbook.schema())},
        {"sketch", sketch_to_json(document.sketch)}};
}

Document document_from_json(const Json& value)
{
    if (!value.is_object() || !value.contains("tables"))
        throw Error(ErrorCode::validation, "workbook document needs a \"tables\" array");
    std::vector<Table> tables;
    try {
        for (const auto& item : value.at("tables")) {
            auto name = item.at("name").get<std::string>();
            auto header = item.at("header").get<std::vector<std::string>>();
            std::vector<Row> rows;
            for (const auto& raw_row : item.value("rows", Json::array())) {
                Row row;
                for (const auto& cell : raw_row)
                    row.push_back(cell_from_json(cell));
                rows.push_back(std::move(row));
            }
            tables.emplace_back(std::move(name), std::move(header), std::move(rows));
        }
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::validation, std::string("malformed workbook: ") + e.what());
    }
    Document document{Workbook(std::move(tables), schema_from_json(value.value("schema", Json()))),
        sketch_from_json(value.value("sketch", Json()))};
    validate_sketch(document.sketch, document.workbook);
    return document;
}

std::string serialize_document(const Document& document)
{
    return document_to_json(document).dump(2) + "\n";
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;

    const auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    const auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            end_record();
        } else if (c == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n')
                continue;
            end_record();
        } else {
            field += c;
            field_started = true;
        }
    }
    if (field_started || !record.empty())
        end_record();
    return records;
}

namespace {

    std::string read_file(const fs::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error(ErrorCode::io, "cannot read '" + path.string() + "'");
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    }

    Table read_csv_table(const fs::path& path)
    {
        auto records = parse_csv(read_file(path));
        if (records.empty())
            throw Error(ErrorCode::structural, "'" + path.string() + "' has no header row");
        auto header = records.front();
        std::vector<Row> rows;
        for (std::size_t r = 1; r < records.size(); ++r) {
            if (records[r].size() != header.size())
                throw Error(ErrorCode::structural,
                    "'" + path.filename().string() + "' row " + std::to_string(r + 1) + " has "
                        + std::to_string(records[r].size()) + " fields, header has " + std::to_string(header.size()));
            Row row;
            for (const auto& raw : records[r])
                row.push_back(infer_cell_value(raw));
            rows.push_back(std::move(row));
        }
        return Table(path.stem().string(), std::move(header), std::move(rows));
    }

    Document load_csv_directory(const fs::path& dir)
    {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());

        std::vector<Table> tables;
        for (const auto& file : files)
            tables.push_back(read_csv_table(file));

        std::vector<ForeignKey> schema;
        auto sidecar = dir / "schema.json";
        if (fs::exists(sidecar)) {
            Json parsed;
            try {
                parsed = Json::parse(read_file(sidecar));
            } catch (const Json::parse_error& e) {
                throw Error(ErrorCode::validation, "schema.json: " + std::string(e.what()));
            }
            schema = schema_from_json(parsed.contains("schema") ? parsed.at("schema") : parsed);
        }
        return Document{Workbook(std::move(tables), std::move(schema)), Sketch{}};
    }

} // namespace

Document load_document(const fs::path& path)
{
    if (fs::is_directory(path))
        return load_csv_directory(path);
    Json parsed;
    try {
        parsed = Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::validation, "'" + path.string() + "': " + e.what());
    }
    return document_from_json(parsed);
}

Workbook import_workbook(const fs::path& path)
{
    return load_document(path).workbook;
}

void export_workbook(const Workbook& workbook, const Sketch& sketch, const fs::path& path)
{
    validate_sketch(sketch, workbook);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
    out << serialize_document(Document{workbook, sketch});
    if (!out)
        throw Error(ErrorCode::io, "write to '" + path.string() + "' failed");
}

} // namespace sketchsci
