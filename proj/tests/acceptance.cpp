// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "cluster_oracle.hpp"
#include "constraint_oracle.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "select_oracle.hpp"
#include "wrangle_oracle.hpp"

#include "sketchsci/autocomplete.hpp"
#include "sketchsci/cluster.hpp"
#include "sketchsci/constraints.hpp"
#include "sketchsci/engine.hpp"
#include "sketchsci/predict.hpp"
#include "sketchsci/selector.hpp"
#include "sketchsci/wrangler.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>

#include <unistd.h>

using namespace sketchsci;

namespace {

/// Records the first failed expectation.
struct Check {
    bool ok = true;
    std::string why;

    void expect(bool condition, const std::string& what)
    {
        if (!condition && ok) {
            ok = false;
            why = what;
        }
    }
};

const std::vector<std::vector<CellValue>> tidy_sales = {
    {Empty{}, Empty{}, "June", "July", "Aug", "Total", "Profit"},
    {"Vanilla", "Florence", 610, 190, 670, 1470, "YES"},
    {"Banana", "Stockholm", 170, 690, 520, 1380, "YES"},
    {"Chocolate", "Copenhagen", 560, 320, 140, 1020, "YES"},
    {"Banana", "Berlin", 610, 640, 320, 1570, "NO"},
    {"Stracciatella", "Florence", 300, 270, 290, 860, "NO"},
    {"Chocolate", "Milan", 430, 350, Missing{}, Missing{}, Missing{}},
    {"Banana", "Aachen", 250, 650, Missing{}, Missing{}, Missing{}},
    {"Chocolate", "Brussels", 210, 280, Missing{}, Missing{}, Missing{}},
};

void wrangling_golden(Check& check)
{
    using namespace wrangle;
    auto doc = fixtures::load("icecream_raw.vsw.json");
    const auto& raw = doc.workbook.table("sales_raw");
    auto start = std::chrono::steady_clock::now();
    auto result = synthesize_program(raw, wrangling_sketch(doc.sketch, raw.name()), SynthesisConfig{5, 6});
    auto elapsed = std::chrono::steady_clock::now() - start;
    TransformProgram expected{{Split{0}, ForwardFill{0}, ForwardFill{1}, Pivot{2, 3}}};
    std::string text;
    for (const auto& t : result.program.steps)
        text += (text.empty() ? "" : "; ") + describe(t);
    check.expect(result.program == expected, "program was " + text);
    check.expect(result.grid.cells == tidy_sales, "output grid differs from the expected table");
    check.expect(elapsed < std::chrono::seconds(5), "synthesis took 5 s or more");
}

void wrangling_staircases(Check& check)
{
    for (unsigned seed = 1; seed <= 60; ++seed) {
        auto instance = oracle::random_staircase(seed);
        auto best = oracle::exhaustive(instance.table, instance.sketch, 3);
        auto beam = oracle::run_beam(instance.table, instance.sketch);
        auto tag = " (seed " + std::to_string(seed) + ")";
        if (best.best_satisfying) {
            check.expect(beam.satisfied, "beam missed a satisfying program" + tag);
            check.expect(beam.score <= *best.best_satisfying + 1e-12, "beam scored worse than exhaustive" + tag);
        } else {
            check.expect(beam.score <= best.best_score + 1e-12, "beam scored worse than exhaustive" + tag);
        }
    }
}

void selection_golden(Check& check)
{
    using namespace select;
    auto doc = fixtures::load("selection.vsw.json");
    auto result = run_selection(doc.workbook, doc.sketch);

    // Independently assembled expected clauses over the retained columns:
    // sales(Type City June July Aug Profit), provider(Type City Price Quality).
    enum { i0, i1, type, city, june, july, aug, profit, price, quality };
    auto expected = [&](bool cheap) {
        Query q;
        q.atoms.push_back({0, {Var{i0}, Var{type}, Var{city}, Var{june}, Var{july}, Var{aug},
                                  cheap ? Term{CellValue("YES")} : Term{Var{profit}}}});
        q.atoms.push_back({1, {Var{i1}, Var{type}, Var{city}, cheap ? Term{CellValue("Cheap")} : Term{CellValue("Regular")},
                                  cheap ? Term{Var{quality}} : Term{CellValue("Good")}}});
        return q;
    };
    check.expect(result.queries.size() == 2, "expected two queries, got " + std::to_string(result.queries.size()));
    if (result.queries.size() != 2)
        return;
    for (bool cheap : {true, false}) {
        auto want = expected(cheap);
        bool found = std::any_of(result.queries.begin(), result.queries.end(), [&](const Query& q) {
            return oracle::brute_subsumes(q, want) && oracle::brute_subsumes(want, q)
                && q.atoms.size() == want.atoms.size();
        });
        check.expect(found, std::string("no query equivalent to the ") + (cheap ? "Cheap" : "Regular/Good") + " clause");
    }

    std::set<std::pair<std::string, std::size_t>> rows, want = {{"sales", 1}, {"sales", 3}, {"sales", 6},
                                                           {"sales", 8}, {"provider", 1}, {"provider", 2},
                                                           {"provider", 4}, {"provider", 5}, {"provider", 7}};
    for (const auto& coloring : result.sketch.colorings)
        if (coloring.role == Role::positive)
            for (const auto& cell : coloring.cells)
                rows.insert({cell.table, cell.row + 1});
    check.expect(rows == want, "recolored rows differ");
}

void lgg_properties(Check& check)
{
    using namespace select;
    auto tmpl = gen::toy_template();
    std::mt19937 rng(7);
    int pairs = 0;
    for (int trial = 0; trial < 250; ++trial) {
        auto e1 = as_query(gen::random_example(rng));
        auto e2 = as_query(gen::random_example(rng));
        auto g = lgg(e1, e2);
        if (g.atoms.empty())
            continue;
        ++pairs;
        auto tag = " (trial " + std::to_string(trial) + ")";
        check.expect(oracle::brute_subsumes(g, e1) && oracle::brute_subsumes(g, e2), "lgg does not subsume" + tag);
        auto self = canonicalize(lgg(e1, e1), tmpl);
        check.expect(oracle::brute_subsumes(self, e1) && oracle::brute_subsumes(e1, self)
                && self.atoms.size() == e1.atoms.size(),
            "lgg(e, e) is not e" + tag);
        check.expect(to_prolog(canonicalize(gen::scramble(g, rng), tmpl), tmpl) == to_prolog(canonicalize(g, tmpl), tmpl),
            "serialization depends on atom order or variable names" + tag);
    }
    check.expect(pairs >= 200, "only " + std::to_string(pairs) + " pairs shared a predicate");
}

void clustering_golden(Check& check)
{
    using namespace cluster;
    auto doc = fixtures::load("cities.vsw.json");
    const auto& t = doc.workbook.table("cities");
    auto result = run_clustering(t, doc.sketch);
    std::set<std::string> text, expected = {"mustlink(1, 7)", "mustlink(2, 6)", "mustlink(4, 11)", "cannotlink(1, 2)",
                                    "cannotlink(1, 6)", "cannotlink(1, 4)", "cannotlink(1, 11)", "cannotlink(2, 7)",
                                    "cannotlink(6, 7)", "cannotlink(4, 7)", "cannotlink(7, 11)", "cannotlink(2, 4)",
                                    "cannotlink(2, 11)", "cannotlink(4, 6)", "cannotlink(6, 11)"};
    for (const auto& c : result.constraints)
        text.insert(to_string(c));
    check.expect(result.constraints.size() == 15 && text == expected, "constraint list differs");

    std::map<std::string, std::string> color;
    for (std::size_t r = 0; r < t.row_count(); ++r)
        color[t.at(r, 0).text()] = result.table.at(r, result.table.col_count() - 1).text();
    check.expect(color["Turin"] == "green", "Turin is " + color["Turin"]);
    check.expect(color["Copenhagen"] == "lavender", "Copenhagen is " + color["Copenhagen"]);
    for (auto city : {"Aachen", "Munich", "Paris", "Valencia"})
        check.expect(color[city] == "blue", std::string(city) + " is " + color[city]);
    check.expect(count_violations(result.assignment, result.constraints) == 0, "constraint violations");
}

void clustering_property(Check& check)
{
    using namespace cluster;
    std::mt19937 rng(11);
    for (int trial = 0; trial < 120; ++trial) {
        auto [t, constraints, k] = gen::consistent_constraints(rng);
        auto a = constrained_cluster(t, constraints, k, default_feature_space(t), static_cast<unsigned>(trial));
        auto tag = " (trial " + std::to_string(trial) + ")";
        check.expect(count_violations(a, constraints) == 0, "violations" + tag);
        check.expect(std::set<std::size_t>(a.cluster_of.begin(), a.cluster_of.end()).size() == k, "not k clusters" + tag);
    }
    std::mt19937 rng2(5);
    int infeasible = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto [t, constraints, k] = gen::arbitrary_constraints(rng2);
        if (oracle::feasible(t.row_count(), k, constraints))
            continue;
        ++infeasible;
        bool raised = false;
        try {
            constrained_cluster(t, constraints, k, default_feature_space(t));
        } catch (const Error& e) {
            raised = e.code() == ErrorCode::infeasible;
        }
        check.expect(raised, "inconsistent set did not raise infeasibility (trial " + std::to_string(trial) + ")");
    }
    check.expect(infeasible >= 20, "too few inconsistent sets sampled");
}

void constraint_discovery(Check& check)
{
    using namespace constraints;
    auto doc = fixtures::load("icecream_sales.vsw.json");
    const auto& sales = doc.workbook.table("sales");
    Table done("sales", sales.header(), std::vector<Row>(sales.rows().begin(), sales.rows().begin() + 5));
    auto found = find_constraints(partition_blocks(done));
    auto it = std::find_if(found.begin(), found.end(), [](const auto& c) {
        return c.name == "ROW_SUM" && c.args.size() == 4 && c.args[0].name == "Total" && c.args[1].name == "June"
            && c.args[2].name == "July" && c.args[3].name == "Aug";
    });
    check.expect(it != found.end(), "ROW_SUM(Total; June, July, Aug) not found");
    const std::vector<double> totals = {1470, 1380, 1020, 1570, 860};
    for (std::size_t r = 0; r < 5; ++r)
        check.expect(done.at(r, 2).number() + done.at(r, 3).number() + done.at(r, 4).number() == totals[r]
                && done.at(r, 5).number() == totals[r],
            "row total mismatch");

    std::mt19937 rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        auto t = gen::constraint_table(rng);
        auto blocks = partition_blocks(t);
        auto got = find_constraints(blocks);
        check.expect(std::set<ConstraintInstance>(got.begin(), got.end()) == oracle::brute_force(blocks)
                && got.size() == oracle::brute_force(blocks).size(),
            "differs from brute force (trial " + std::to_string(trial) + ")");
    }
}

class AlwaysYes : public predict::Learner {
public:
    void fit(const predict::TrainingSet&) override {}
    CellValue predict(const std::vector<CellValue>&) const override { return CellValue("YES"); }
};

void calibration(Check& check)
{
    using namespace predict;
    TrainingSet data;
    for (auto label : {"YES", "YES", "YES", "NO", "NO"}) {
        data.x.push_back({CellValue(label)});
        data.y.push_back(CellValue(label));
    }
    auto map = calibrate([] { return std::make_unique<AlwaysYes>(); }, data, false);
    check.expect(map.probability("YES", "YES") == 4.0 / 7.0, "P(YES|YES) is not 4/7");
    auto rows_sum_to_one = [&](const CalibrationMap& m) {
        return std::all_of(m.matrix.begin(), m.matrix.end(),
            [](const auto& row) { return std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) <= 1e-9; });
    };
    check.expect(rows_sum_to_one(map), "calibration row does not sum to 1");

    auto doc = fixtures::load("icecream_sales.vsw.json");
    auto task = derive_prediction_task(doc.workbook, doc.sketch);
    for (unsigned seed = 0; seed < 5; ++seed)
        for (auto target : task.target_cols) {
            auto ensemble = train_ensemble(doc.workbook.table("sales"), task, target, {7, seed});
            double total = 0;
            for (const auto& m : ensemble.members) {
                total += m.weight;
                check.expect(rows_sum_to_one(m.calibration), "member calibration row does not sum to 1");
            }
            check.expect(std::abs(total - 1.0) <= 1e-9, "ensemble weights do not sum to 1");
        }
}

void autocompletion(Check& check)
{
    using namespace autocomplete;
    auto doc = fixtures::load("icecream_sales.vsw.json");
    auto result = complete(doc.workbook, doc.sketch);
    const auto& t = result.workbook.table("sales");
    std::vector<std::string> plan;
    for (const auto& step : result.plan.steps)
        plan.push_back(t.header()[step.column]);
    check.expect(plan == std::vector<std::string>{"Aug", "Total", "Profit"}, "plan order differs");
    for (std::size_t r = 0; r < t.row_count(); ++r) {
        const auto &june = t.at(r, 2), &july = t.at(r, 3), &aug = t.at(r, 4), &total = t.at(r, 5);
        check.expect(june.is_number() && july.is_number() && aug.is_number() && total.is_number()
                && total.number() == june.number() + july.number() + aug.number(),
            "Total is not June + July + Aug on row " + std::to_string(r + 1));
        check.expect(t.at(r, 6) == CellValue("YES") || t.at(r, 6) == CellValue("NO"), "Profit not YES/NO");
    }

    for (unsigned seed : {1u, 2u, 3u}) {
        auto wb = gen::sum_workbook(20, seed);
        auto syn = complete(wb, Sketch{});
        const auto& before = wb.table("syn");
        const auto& after = syn.workbook.table("syn");
        std::size_t missing = 0;
        for (std::size_t r = 0; r < before.row_count(); ++r)
            if (before.at(r, 2).is_missing()) {
                ++missing;
                check.expect(after.at(r, 2).is_number()
                        && after.at(r, 2).number() == before.at(r, 0).number() + before.at(r, 1).number(),
                    "synthetic y not filled exactly");
            }
        check.expect(syn.filled.size() == missing, "not every Missing y was filled");
        for (const auto& f : syn.filled)
            check.expect(f.provenance == "formula", "synthetic fill without formula provenance");
    }
}

void correction_loop(Check& check)
{
    using namespace autocomplete;
    auto doc = fixtures::load("icecream_sales.vsw.json");
    CompletionConfig cfg;
    cfg.seed = 13;
    auto first = complete(doc.workbook, doc.sketch, cfg);
    CellRef aug{"sales", 6, 4};
    auto again = correct_and_rerun(first, {{aug, CellValue(777.0)}}, doc.workbook, doc.sketch, cfg);
    const auto& t = again.workbook.table("sales");
    check.expect(t.at(6, 4) == CellValue(777.0), "corrected value not kept");
    check.expect(t.at(6, 5) == CellValue(250.0 + 650.0 + 777.0), "downstream formula ignores the correction");
    auto direct = predict::train_ensemble(
        doc.workbook.table("sales").with_cell(6, 4, CellValue(777.0)), first.task, 4, {cfg.m, cfg.seed});
    check.expect(!again.models.empty() && predict::ensemble_to_json(again.models[0]) == predict::ensemble_to_json(direct),
        "Aug model was not retrained with the corrected row");
    const auto* coloring = again.sketch.coloring_of(aug);
    check.expect(coloring && coloring->role == Role::target, "corrected cell not in the target coloring");
    check.expect(!again.sketch.machine_generated.count(aug), "corrected cell still machine_generated");

    auto idle = correct_and_rerun(first, {}, doc.workbook, doc.sketch, cfg);
    check.expect(result_to_json(idle).dump() == result_to_json(first).dump()
            && serialize_document({idle.workbook, idle.sketch}) == serialize_document({first.workbook, first.sketch}),
        "empty correction changed the result");
}

void closure_and_determinism(Check& check)
{
    using engine::TaskKind;
    const std::vector<std::pair<std::string, TaskKind>> cases = {{"icecream_raw.vsw.json", TaskKind::wrangle},
        {"selection.vsw.json", TaskKind::select}, {"cities.vsw.json", TaskKind::cluster},
        {"icecream_sales.vsw.json", TaskKind::learn_constraints}, {"icecream_sales.vsw.json", TaskKind::predict},
        {"icecream_sales.vsw.json", TaskKind::autocomplete}};
    auto dir = std::filesystem::temp_directory_path() / ("acceptance-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    for (const auto& [file, kind] : cases) {
        auto tag = " (" + std::string(engine::to_string(kind)) + ")";
        auto doc = fixtures::load(file);
        engine::TaskConfig cfg;
        cfg.seed = 17;
        auto a = engine::execute(kind, doc, cfg);
        auto b = engine::execute(kind, doc, cfg);
        auto bytes = serialize_document(a.document);
        check.expect(bytes == serialize_document(b.document) && a.summary.dump() == b.summary.dump(),
            "two runs differ" + tag);

        auto path = dir / (std::string(engine::to_string(kind)) + ".vsw.json");
        export_workbook(a.document.workbook, a.document.sketch, path);
        auto reloaded = load_document(path);
        check.expect(serialize_document(reloaded) == bytes && reloaded == a.document, "export/import changed it" + tag);
    }
    std::filesystem::remove_all(dir);
}

} // namespace

int main()
{
    const std::vector<std::tuple<int, std::string, std::function<void(Check&)>>> criteria = {
        {1, "wrangling golden program and output", wrangling_golden},
        {2, "beam search vs exhaustive depth-3 on staircases", wrangling_staircases},
        {3, "selection golden queries and recoloring", selection_golden},
        {4, "lgg subsumption, idempotence, canonical text", lgg_properties},
        {5, "clustering golden constraints and assignment", clustering_golden},
        {6, "clustering on random constraint sets", clustering_property},
        {7, "constraint discovery golden and brute force", constraint_discovery},
        {8, "calibration exactness and normalization", calibration},
        {9, "auto-completion consistency", autocompletion},
        {10, "correction loop", correction_loop},
        {11, "closure and determinism", closure_and_determinism},
    };
    int failed = 0;
    for (const auto& [id, name, run] : criteria) {
        Check check;
        auto start = std::chrono::steady_clock::now();
        try {
            run(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        std::cout << (check.ok ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " [" << ms << " ms]";
        if (!check.ok)
            std::cout << " -- " << check.why;
        std::cout << '\n';
        failed += !check.ok;
    }
    return failed == 0 ? 0 : 1;
}
