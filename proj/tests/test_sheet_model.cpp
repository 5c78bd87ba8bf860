#include "fixtures.hpp"
#include "sketchsci/error.hpp"
#include "sketchsci/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace sketchsci;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("sketchsci-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter()
    {
        static int value = 0;
        return value;
    }
    void write(const std::string& name, const std::string& text) const { std::ofstream(path / name) << text; }
};

} // namespace

TEST_CASE("infer_cell_value classifies raw strings")
{
    CHECK(infer_cell_value("1470") == CellValue(1470));
    CHECK(infer_cell_value("  ?  ").is_missing());
    CHECK(infer_cell_value("").is_empty());
    CHECK(infer_cell_value("   ").is_empty());
    CHECK(infer_cell_value("YES") == CellValue("YES"));
    CHECK(infer_cell_value("TRUE") == CellValue(true));
    CHECK(infer_cell_value("false") == CellValue(false));
    CHECK(infer_cell_value("-2.5") == CellValue(-2.5));
    CHECK(infer_cell_value("1e3") == CellValue(1000));
    CHECK(infer_cell_value("nan").is_text());
    CHECK(infer_cell_value("inf").is_text());
    CHECK(infer_cell_value("12abc").is_text());
    CHECK(infer_cell_value("1,5").is_text());
}

TEST_CASE("CellValue rejects non-finite numbers and orders deterministically")
{
    CHECK_THROWS_AS(CellValue(std::numeric_limits<double>::infinity()), Error);
    CHECK_THROWS_AS(CellValue(std::nan("")), Error);
    CHECK(CellValue(1) < CellValue(2));
    CHECK(CellValue(Missing{}) != CellValue(Empty{}));
    CHECK(CellValue(610).display() == "610");
    CHECK(CellValue(0.5).display() == "0.5");
}

TEST_CASE("column types follow the observed cells")
{
    Table t("t", {"n", "s", "b", "m", "v"},
        {{1, "a", true, 1, Missing{}}, {Missing{}, Empty{}, false, "x", Empty{}}});
    CHECK(t.col_types()
        == std::vector<TypeTag>{TypeTag::numeric, TypeTag::textual, TypeTag::boolean, TypeTag::mixed, TypeTag::textual});
    CHECK_THROWS_AS(Table("t", {"a", "b"}, {{1}}), Error);
}

TEST_CASE("workbook validates names and foreign keys")
{
    Table a("a", {"x"}, {{1}});
    CHECK_THROWS_AS(Workbook({a, a}), Error);
    CHECK_THROWS_AS(Workbook({a}, {ForeignKey{"a", {"x"}, "b", {"x"}}}), Error);
    CHECK_THROWS_AS(Workbook({a}, {ForeignKey{"a", {"x"}, "a", {"nope"}}}), Error);
    CHECK_NOTHROW(Workbook({a}, {ForeignKey{"a", {"x"}, "a", {"x"}}}));
}

TEST_CASE("CSV directory import")
{
    TempDir dir;
    dir.write("sales.csv", "Type,City,June,July,Aug,Total,Profit\nVanilla,Florence,610,190,670,1470,YES\n"
                           "Chocolate,Milan,430,350,?,?,?\n");
    dir.write("empty.csv", "a,b\n");
    auto wb = import_workbook(dir.path);
    REQUIRE(wb.tables().size() == 2);
    const auto& sales = wb.table("sales");
    CHECK(sales.rows()[0]
        == Row{"Vanilla", "Florence", 610, 190, 670, 1470, "YES"});
    CHECK(sales.at(1, 4).is_missing());
    const auto& empty = wb.table("empty");
    CHECK(empty.row_count() == 0);
    CHECK(empty.col_types() == std::vector<TypeTag>{TypeTag::textual, TypeTag::textual});
    CHECK(wb.schema().empty());
}

TEST_CASE("CSV import reports ragged rows with file and row")
{
    TempDir dir;
    dir.write("bad.csv", "a,b\n1,2\n3\n");
    try {
        import_workbook(dir.path);
        FAIL("expected structural error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::structural);
        std::string message = e.what();
        CHECK(message.find("bad.csv") != std::string::npos);
        CHECK(message.find("3") != std::string::npos);
    }
}

TEST_CASE("CSV quoting and schema sidecar")
{
    CHECK(parse_csv("a,\"b,c\",\"d\"\"e\"\r\n1,2,3\n")
        == std::vector<std::vector<std::string>>{{"a", "b,c", "d\"e"}, {"1", "2", "3"}});
    TempDir dir;
    dir.write("p.csv", "k\n1\n");
    dir.write("q.csv", "k\n1\n");
    dir.write("schema.json",
        R"({"foreign_keys":[{"from_table":"p","from_cols":["k"],"to_table":"q","to_cols":["k"]}]})");
    auto wb = import_workbook(dir.path);
    REQUIRE(wb.schema().size() == 1);
    CHECK(wb.schema()[0].to_table == "q");
}

TEST_CASE("export and import round-trip byte-identically")
{
    for (const auto* name : {"icecream_raw.vsw.json", "icecream_sales.vsw.json", "selection.vsw.json", "cities.vsw.json"}) {
        CAPTURE(name);
        auto doc = fixtures::load(name);
        TempDir dir;
        auto path = dir.path / "out.vsw.json";
        export_workbook(doc.workbook, doc.sketch, path);
        auto again = load_document(path);
        CHECK(again == doc);
        CHECK(serialize_document(again) == serialize_document(doc));
    }
}

TEST_CASE("round-trip preserves sketch cells and schema")
{
    Table t("t", {"a", "b"}, {{1, "x"}, {2, "y"}});
    Table u("u", {"b"}, {{"x"}});
    Workbook wb({t, u}, {ForeignKey{"t", {"b"}, "u", {"b"}}});
    Sketch sketch;
    sketch.colorings.push_back({"blue", Role::group, {{"t", 0, 0}, {"t", 1, 1}, {"u", 0, 0}}});
    sketch.machine_generated = {{"t", 1, 1}};
    auto json = document_to_json(Document{wb, sketch});
    CHECK(json["sketch"]["colorings"][0]["cells"][0]["row"] == 1);
    auto back = document_from_json(json);
    CHECK(back.workbook == wb);
    CHECK(back.sketch == sketch);
}

TEST_CASE("sketch validation")
{
    Workbook wb({Table("t", {"a"}, {{1}, {2}})});
    Sketch twice;
    twice.colorings.push_back({"blue", Role::group, {{"t", 0, 0}}});
    twice.colorings.push_back({"red", Role::group, {{"t", 0, 0}}});
    CHECK_THROWS_AS(validate_sketch(twice, wb), Error);

    Sketch outside;
    outside.colorings.push_back({"blue", Role::group, {{"t", 5, 0}}});
    CHECK_THROWS_AS(validate_sketch(outside, wb), Error);

    Sketch stray;
    stray.colorings.push_back({"blue", Role::group, {{"t", 0, 0}}});
    stray.machine_generated = {{"t", 1, 0}};
    CHECK_THROWS_AS(validate_sketch(stray, wb), Error);

    try {
        require_roles(stray, {Role::positive, Role::negative}, "select");
        FAIL("expected role error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::task_role);
    }
}

TEST_CASE("export to an unwritable path is an I/O error")
{
    Workbook wb({Table("t", {"a"}, {{1}})});
    try {
        export_workbook(wb, {}, "/nonexistent-dir/x/out.vsw.json");
        FAIL("expected io error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::io);
    }
}
