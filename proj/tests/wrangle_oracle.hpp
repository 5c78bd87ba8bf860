#pragma once

// Exhaustive enumeration of every program up to a depth, independent of the
// synthesizer's proposal heuristics.

#include "sketchsci/error.hpp"
#include "sketchsci/wrangler.hpp"

#include <optional>
#include <random>

namespace oracle {

struct ExhaustiveBest {
    double best_score = 1e300;
    std::optional<double> best_satisfying;
};

inline std::vector<sketchsci::wrangle::Transform> all_transforms(std::size_t cols)
{
    using namespace sketchsci::wrangle;
    std::vector<Transform> out;
    for (std::size_t c = 0; c < cols; ++c)
        out.push_back(Split{c});
    for (std::size_t c = 0; c < cols; ++c)
        out.push_back(ForwardFill{c});
    for (std::size_t k = 0; k < cols; ++k)
        for (std::size_t v = 0; v < cols; ++v)
            if (k != v)
                out.push_back(Pivot{k, v});
    out.push_back(DropEmptyRows{});
    out.push_back(DropEmptyColumns{});
    return out;
}

inline void enumerate(const sketchsci::wrangle::ProvenancedGrid& grid, const sketchsci::wrangle::WranglingSketch& sketch,
    std::size_t depth_left, ExhaustiveBest& best)
{
    using namespace sketchsci::wrangle;
    double score = score_candidate(grid, sketch);
    best.best_score = std::min(best.best_score, score);
    if (check_sketch(grid, sketch).satisfied)
        best.best_satisfying = std::min(best.best_satisfying.value_or(1e300), score);
    if (depth_left == 0)
        return;
    for (const auto& t : all_transforms(grid.cols()))
        enumerate(apply_transform(grid, t), sketch, depth_left - 1, best);
}

inline ExhaustiveBest exhaustive(const sketchsci::Table& table, const sketchsci::wrangle::WranglingSketch& sketch,
    std::size_t depth)
{
    ExhaustiveBest best;
    enumerate(sketchsci::wrangle::grid_from_table(table), sketch, depth, best);
    return best;
}

struct StaircaseCase {
    sketchsci::Table table;
    sketchsci::wrangle::WranglingSketch sketch;
};

/// 6x3 stacked layout: two records of a label row and two key/value rows,
/// with random labels, keys, values, label placement and a random sketch.
inline StaircaseCase random_staircase(unsigned seed)
{
    using namespace sketchsci;
    std::mt19937 rng(seed);
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    const std::vector<std::string> labels = {"Florence", "Milan", "Berlin", "Paris"};
    const std::vector<std::string> keys = {"June", "July", "Aug"};

    std::vector<Row> rows;
    bool inline_label = pick(2) == 0; // label beside the first key, as "Vanilla June 610"
    int first = pick(3);
    for (int record = 0; record < 2; ++record) {
        std::string label = labels[static_cast<std::size_t>(pick(4))];
        if (!inline_label)
            rows.push_back({label, Empty{}, Empty{}});
        for (int k = 0; k < (inline_label ? 3 : 2); ++k) {
            CellValue value = pick(6) == 0 ? CellValue(Missing{}) : CellValue(10 * (1 + pick(9)));
            CellValue key = keys[static_cast<std::size_t>((first + k) % 3)];
            rows.push_back({k == 0 && inline_label ? CellValue(label) : CellValue(Empty{}), key, value});
        }
    }
    Table table("grid", {"A", "B", "C"}, rows);

    wrangle::WranglingSketch sketch;
    std::size_t record_rows = rows.size() / 2;
    // one color over (part of) the first record's labels and values, one over the second record's keys
    for (std::size_t r = 0; r < record_rows; ++r) {
        if (!rows[r][0].is_empty() && pick(3) != 0)
            sketch["blue"].insert(CellRef{"grid", r, 0});
        if (!rows[r][2].is_empty() && pick(3) != 0)
            sketch["blue"].insert(CellRef{"grid", r, 2});
    }
    for (std::size_t r = record_rows; r < rows.size(); ++r)
        if (!rows[r][1].is_empty() && pick(2) == 0)
            sketch["red"].insert(CellRef{"grid", r, 1});
    for (auto it = sketch.begin(); it != sketch.end();)
        it = it->second.empty() ? sketch.erase(it) : std::next(it);
    return {table, sketch};
}

/// Score the synthesizer reached: the returned program, or the best partial
/// program reported with the exhaustion error.
struct BeamOutcome {
    bool satisfied = false;
    double score = 0.0;
};

inline BeamOutcome run_beam(const sketchsci::Table& table, const sketchsci::wrangle::WranglingSketch& sketch)
{
    try {
        auto result = sketchsci::wrangle::synthesize_program(table, sketch);
        return {true, result.score};
    } catch (const sketchsci::Error& e) {
        if (e.code() != sketchsci::ErrorCode::exhausted)
            throw;
        auto pos = e.details().rfind("(score ");
        return {false, std::stod(e.details().substr(pos + 7))};
    }
}

} // namespace oracle
