#pragma once

#include "sketchsci/sketch.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace sketchsci {

using Json = nlohmann::json;

/// A workbook together with the sketch painted on it: the unit every task
/// consumes and produces.
struct Document {
    Workbook workbook;
    Sketch sketch;

    friend bool operator==(const Document&, const Document&) = default;
};

Json cell_to_json(const CellValue& cell);
CellValue cell_from_json(const Json& value);

Json cellref_to_json(const CellRef& ref);
CellRef cellref_from_json(const Json& value);

Json sketch_to_json(const Sketch& sketch);
Sketch sketch_from_json(const Json& value);

Json schema_to_json(const std::vector<ForeignKey>& schema);
std::vector<ForeignKey> schema_from_json(const Json& value);

Json document_to_json(const Document& document);
Document document_from_json(const Json& value);

/// Canonical text of a document; equal documents serialize to equal bytes.
std::string serialize_document(const Document& document);

/// Loads a .vsw.json file, or a directory of CSV files (one table per file,
/// optional schema.json sidecar). CSV import carries an empty sketch.
Document load_document(const std::filesystem::path& path);
Workbook import_workbook(const std::filesystem::path& path);

void export_workbook(const Workbook& workbook, const Sketch& sketch, const std::filesystem::path& path);

/// RFC 4180 style: quoted fields, doubled quotes, CRLF or LF line ends.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

} // namespace sketchsci
