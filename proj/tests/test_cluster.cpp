#include "cluster_oracle.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "sketchsci/cluster.hpp"
#include "sketchsci/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace sketchsci;
using namespace sketchsci::cluster;

namespace {

std::set<std::string> as_text(const std::vector<PairConstraint>& constraints)
{
    std::set<std::string> out;
    for (const auto& c : constraints)
        out.insert(to_string(c));
    return out;
}

Sketch row_colors(const std::string& table, std::size_t cols, const std::vector<std::vector<std::size_t>>& groups)
{
    const std::vector<std::string> names = {"green", "lavender", "blue", "orange", "pink"};
    Sketch sketch;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        Coloring coloring{names[g], Role::group, {}};
        for (auto r : groups[g])
            for (std::size_t c = 0; c < cols; ++c)
                coloring.cells.insert({table, r, c});
        sketch.colorings.push_back(coloring);
    }
    return sketch;
}

std::string city_of(const Table& t, std::size_t row) { return t.at(row, 0).text(); }

} // namespace

TEST_CASE("group colors become the listed must-link and cannot-link constraints")
{
    auto doc = fixtures::load("cities.vsw.json");
    const auto& table = doc.workbook.table("cities");
    auto constraints = sketch_to_constraints(doc.sketch, table);

    // The expected listing, with each pair normalized to a < b.
    std::set<std::string> expected = {"mustlink(1, 7)", "mustlink(2, 6)", "mustlink(4, 11)", "cannotlink(1, 2)",
        "cannotlink(1, 6)", "cannotlink(1, 4)", "cannotlink(1, 11)", "cannotlink(2, 7)", "cannotlink(6, 7)",
        "cannotlink(4, 7)", "cannotlink(7, 11)", "cannotlink(2, 4)", "cannotlink(2, 11)", "cannotlink(4, 6)",
        "cannotlink(6, 11)"};
    CHECK(constraints.size() == 15);
    CHECK(as_text(constraints) == expected);
    CHECK(std::count_if(constraints.begin(), constraints.end(),
              [](const PairConstraint& c) { return c.kind == LinkKind::must_link; })
        == 3);
    CHECK(std::is_sorted(constraints.begin(), constraints.end()));
    for (const auto& c : constraints)
        CHECK(c.a < c.b);
}

TEST_CASE("trivial constraint sets")
{
    Table t("t", {"X"}, {{1}, {2}, {3}});
    CHECK(sketch_to_constraints(row_colors("t", 1, {{0}}), t).empty());
    auto two = sketch_to_constraints(row_colors("t", 1, {{0}, {2}}), t);
    REQUIRE(two.size() == 1);
    CHECK(to_string(two[0]) == "cannotlink(1, 3)");

    Sketch clash;
    clash.colorings.push_back({"green", Role::group, {{"t", 0, 0}}});
    Table wide("t", {"X", "Y"}, {{1, 2}});
    clash.colorings.push_back({"blue", Role::group, {{"t", 0, 1}}});
    try {
        sketch_to_constraints(clash, wide);
        FAIL("expected a contradiction");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::conflict);
    }

    Sketch wrong_role;
    wrong_role.colorings.push_back({"blue", Role::positive, {{"t", 0, 0}}});
    CHECK_THROWS_AS(sketch_to_constraints(wrong_role, t), Error);
}

TEST_CASE("default feature space on the city table")
{
    auto doc = fixtures::load("cities.vsw.json");
    auto fs = default_feature_space(doc.workbook.table("cities"));
    REQUIRE(fs.features.size() == 4);
    CHECK(fs.features[0].kind == FeatureKind::identifier);
    CHECK(fs.features[1].kind == FeatureKind::ordinal);
    CHECK(fs.features[1].ordering == std::vector<std::string>{"Low", "Medium", "High", "Very High"});
    CHECK(fs.features[2].kind == FeatureKind::categorical);
    CHECK(fs.features[3].kind == FeatureKind::categorical);

    FeatureOverrides overrides;
    overrides.identifiers = {"Nat"};
    overrides.ordinals["Weather"] = {"Cold", "Mild", "Hot"};
    auto custom = default_feature_space(doc.workbook.table("cities"), overrides);
    CHECK(custom.features[2].kind == FeatureKind::ordinal);
    CHECK(custom.features[3].kind == FeatureKind::identifier);

    overrides.ordinals["Weather"] = {"Cold", "Hot"};
    CHECK_THROWS_AS(default_feature_space(doc.workbook.table("cities"), overrides), Error);
    CHECK_THROWS_AS(default_feature_space(doc.workbook.table("cities"), FeatureOverrides{{}, {"Population"}}), Error);
}

TEST_CASE("gower distance on city rows")
{
    auto doc = fixtures::load("cities.vsw.json");
    const auto& t = doc.workbook.table("cities");
    auto fs = default_feature_space(t);
    const auto row = [&](std::size_t one_based) { return t.rows()[one_based - 1]; };

    CHECK(gower_distance(row(1), row(10), fs) == doctest::Approx(0.0));      // Florence, Turin
    CHECK(gower_distance(row(1), row(2), fs) == doctest::Approx(2.0 / 3.0)); // Florence, Stockholm
    CHECK(gower_distance(row(1), row(4), fs) == doctest::Approx(7.0 / 9.0)); // Florence, Berlin

    for (std::size_t i = 0; i < t.row_count(); ++i)
        for (std::size_t j = 0; j < t.row_count(); ++j) {
            double d = gower_distance(t.rows()[i], t.rows()[j], fs);
            CHECK(d >= 0.0);
            CHECK(d <= 1.0);
            CHECK(d == gower_distance(t.rows()[j], t.rows()[i], fs));
        }

    Row with_missing = row(1);
    with_missing[2] = CellValue::missing();
    CHECK(gower_distance(row(1), with_missing, fs) == doctest::Approx(0.5 / 3.0));

    Table numeric("n", {"A", "B"}, {{0, "x"}, {10, "x"}, {5, "y"}});
    auto nfs = default_feature_space(numeric);
    CHECK(nfs.features[0].kind == FeatureKind::numeric);
    CHECK(gower_distance(numeric.rows()[0], numeric.rows()[2], nfs) == doctest::Approx((0.5 + 1.0) / 2));

    FeatureSpace ids{{Feature{FeatureKind::identifier, {}, 0, 0}}};
    CHECK_THROWS_AS(gower_distance({1}, {2}, ids), Error);
}

TEST_CASE("city clustering reproduces the expected assignment")
{
    auto doc = fixtures::load("cities.vsw.json");
    const auto& t = doc.workbook.table("cities");
    auto result = run_clustering(t, doc.sketch);

    CHECK(count_violations(result.assignment, result.constraints) == 0);
    std::map<std::string, std::set<std::string>> by_color;
    for (std::size_t r = 0; r < t.row_count(); ++r)
        by_color[result.table.at(r, 4).text()].insert(city_of(t, r));
    CHECK(by_color["green"] == std::set<std::string>{"Florence", "Milan", "Turin"});
    CHECK(by_color["lavender"] == std::set<std::string>{"Stockholm", "Brussels", "Copenhagen"});
    CHECK(by_color["blue"] == std::set<std::string>{"Berlin", "Seville", "Aachen", "Munich", "Paris", "Valencia"});
    CHECK(by_color.size() == 3);

    // Copenhagen (row 3) is machine-colored lavender; Stockholm (row 2) was painted.
    CHECK(result.table.header().back() == "Cluster");
    CHECK(result.table.column(4).size() == t.row_count());
    const auto* copenhagen = result.sketch.coloring_of({"cities", 2, 0});
    REQUIRE(copenhagen);
    CHECK(copenhagen->color == "lavender");
    CHECK(result.sketch.machine_generated.count({"cities", 2, 0}));
    CHECK_FALSE(result.sketch.machine_generated.count({"cities", 1, 0}));
    CHECK(result.sketch.coloring_of({"cities", 1, 0})->color == "lavender");
    for (const auto& coloring : result.sketch.colorings)
        CHECK(coloring.role == Role::group);
    validate_sketch(result.sketch, doc.workbook.with_table(result.table));

    CHECK(run_clustering(t, doc.sketch).assignment == result.assignment);
}

TEST_CASE("refinement: feeding the result back with a correction")
{
    auto doc = fixtures::load("cities.vsw.json");
    auto first = run_clustering(doc.workbook.table("cities"), doc.sketch);

    // Every row is colored now, so clustering again changes nothing.
    auto again = run_clustering(first.table, first.sketch);
    CHECK(again.sketch == first.sketch);
    CHECK(again.assignment == first.assignment);

    // The user moves Valencia (row 12) from blue to green and reruns from the
    // painted rows only.
    Sketch corrected = doc.sketch;
    for (std::size_t c = 0; c < 4; ++c)
        corrected.colorings[0].cells.insert({"cities", 11, c});
    auto refined = run_clustering(first.table, corrected);
    CHECK(refined.assignment.cluster_of[11] == refined.assignment.cluster_of[0]);
    CHECK(count_violations(refined.assignment, refined.constraints) == 0);
    CHECK(refined.table.col_count() == 5);
}

TEST_CASE("clustering satisfies random consistent constraint sets with exactly k clusters")
{
    std::mt19937 rng(11);
    for (int trial = 0; trial < 150; ++trial) {
        CAPTURE(trial);
        auto [t, constraints, k] = gen::consistent_constraints(rng);
        std::size_t n = t.row_count();
        REQUIRE(oracle::feasible(n, k, constraints));

        auto assignment = constrained_cluster(t, constraints, k, default_feature_space(t), static_cast<unsigned>(trial));
        CHECK(count_violations(assignment, constraints) == 0);
        std::set<std::size_t> ids(assignment.cluster_of.begin(), assignment.cluster_of.end());
        CHECK(ids.size() == k);
        CHECK(*ids.begin() == 1);
        CHECK(*ids.rbegin() == k);
        CHECK(assignment == constrained_cluster(t, constraints, k, default_feature_space(t), static_cast<unsigned>(trial)));
    }
}

TEST_CASE("clustering succeeds exactly when a brute-force partition exists")
{
    std::mt19937 rng(5);
    int feasible = 0, infeasible = 0;
    for (int trial = 0; trial < 200; ++trial) {
        CAPTURE(trial);
        auto [t, constraints, k] = gen::arbitrary_constraints(rng);
        std::size_t n = t.row_count();
        if (oracle::feasible(n, k, constraints)) {
            ++feasible;
            auto assignment = constrained_cluster(t, constraints, k, default_feature_space(t));
            CHECK(count_violations(assignment, constraints) == 0);
            CHECK(std::set<std::size_t>(assignment.cluster_of.begin(), assignment.cluster_of.end()).size() == k);
        } else {
            ++infeasible;
            try {
                constrained_cluster(t, constraints, k, default_feature_space(t));
                FAIL("expected infeasibility");
            } catch (const Error& e) {
                CHECK(e.code() == ErrorCode::infeasible);
            }
        }
    }
    CHECK(feasible >= 50);
    CHECK(infeasible >= 20);
}

TEST_CASE("inconsistent constraints report the offending cycle")
{
    Table t("t", {"X"}, {{1}, {2}, {3}, {4}});
    std::vector<PairConstraint> constraints = {
        {LinkKind::must_link, 1, 2}, {LinkKind::must_link, 2, 3}, {LinkKind::cannot_link, 1, 3}};
    try {
        constrained_cluster(t, constraints, 2, default_feature_space(t));
        FAIL("expected infeasibility");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::infeasible);
        CHECK(e.details() == "mustlink(1, 2), mustlink(2, 3), cannotlink(1, 3)");
    }

    std::vector<PairConstraint> merged = {{LinkKind::must_link, 1, 2}, {LinkKind::must_link, 3, 4}};
    CHECK_NOTHROW(constrained_cluster(t, merged, 2, default_feature_space(t)));
    try {
        constrained_cluster(t, merged, 3, default_feature_space(t));
        FAIL("expected infeasibility");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::infeasible);
    }
    CHECK_THROWS_AS(constrained_cluster(t, {{LinkKind::must_link, 1, 9}}, 2, default_feature_space(t)), Error);
}

TEST_CASE("fully colored tables keep their coloring verbatim")
{
    Table t("t", {"X", "Y"}, {{1, "a"}, {2, "b"}, {9, "a"}, {8, "b"}});
    auto sketch = row_colors("t", 2, {{0, 3}, {1, 2}});
    auto result = run_clustering(t, sketch);
    CHECK(result.sketch == sketch);
    CHECK(result.sketch.machine_generated.empty());
    CHECK(result.assignment.cluster_of == std::vector<std::size_t>{1, 2, 2, 1});
    CHECK(result.table.column(2) == std::vector<CellValue>{"green", "lavender", "lavender", "green"});

    CHECK_THROWS_AS(run_clustering(t, Sketch{}), Error);
}
