#pragma once

#include "sketchsci/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

namespace oracle {

using namespace sketchsci;
using namespace sketchsci::constraints;

inline bool close(double a, double b)
{
    return std::fabs(a - b) <= 1e-6 * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}

inline bool same_frame(const std::vector<const Vector*>& args)
{
    for (const auto* v : args)
        if (v->ref.table != args[0]->ref.table || v->ref.orientation != args[0]->ref.orientation
            || v->cells.size() != args[0]->cells.size())
            return false;
    return true;
}

/// Straight evaluation of one template on one argument list; no signature
/// shortcuts beyond what the template's meaning requires.
inline bool satisfied(const std::string& name, const std::vector<const Vector*>& args)
{
    if (name == "ASCENDING" || name == "ALLDIFFERENT") {
        std::vector<CellValue> seen;
        for (const auto& c : args[0]->cells)
            if (c.is_observed())
                seen.push_back(c);
        if (seen.size() < 2)
            return false;
        if (name == "ALLDIFFERENT") {
            for (std::size_t i = 0; i < seen.size(); ++i)
                for (std::size_t j = i + 1; j < seen.size(); ++j)
                    if (seen[i] == seen[j])
                        return false;
            return true;
        }
        for (std::size_t i = 0; i < seen.size(); ++i)
            if (!seen[i].is_number())
                return false;
        for (std::size_t i = 1; i < seen.size(); ++i)
            if (seen[i].number() < seen[i - 1].number() && !close(seen[i].number(), seen[i - 1].number()))
                return false;
        return true;
    }
    if (name == "FOREIGNKEY") {
        if (args[0]->ref.orientation != Orientation::column || args[1]->ref.orientation != Orientation::column)
            return false;
        std::vector<CellValue> keys, values;
        for (const auto& c : args[1]->cells)
            if (c.is_observed())
                keys.push_back(c);
        for (const auto& c : args[0]->cells)
            if (c.is_observed())
                values.push_back(c);
        if (std::set<CellValue>(keys.begin(), keys.end()).size() != keys.size() || keys.size() < 2 || values.size() < 2)
            return false;
        for (const auto& v : values)
            if (std::find(keys.begin(), keys.end(), v) == keys.end())
                return false;
        return true;
    }

    if (!same_frame(args))
        return false;
    std::size_t support = 0;
    for (std::size_t i = 0; i < args[0]->cells.size(); ++i) {
        bool all = true;
        for (const auto* v : args)
            all = all && v->cells[i].is_observed();
        if (!all)
            continue;
        ++support;
        const auto& lhs = args[0]->cells[i];
        if (name == "EQUAL") {
            const auto& rhs = args[1]->cells[i];
            bool eq = lhs.is_number() && rhs.is_number() ? close(lhs.number(), rhs.number()) : lhs == rhs;
            if (!eq)
                return false;
            continue;
        }
        for (const auto* v : args)
            if (!v->cells[i].is_number())
                return false;
        std::vector<double> xs;
        for (std::size_t a = 1; a < args.size(); ++a)
            xs.push_back(args[a]->cells[i].number());
        double expected = 0;
        if (name == "ROW_SUM") {
            for (double x : xs)
                expected += x;
        } else if (name == "AVERAGE") {
            for (double x : xs)
                expected += x / static_cast<double>(xs.size());
        } else if (name == "MAX") {
            expected = *std::max_element(xs.begin(), xs.end());
        } else if (name == "MIN") {
            expected = *std::min_element(xs.begin(), xs.end());
        } else if (name == "DIFFERENCE") {
            expected = xs[0] - xs[1];
        } else if (name == "PRODUCT") {
            expected = xs[0] * xs[1];
        }
        if (!close(lhs.number(), expected))
            return false;
    }
    return support >= 2;
}

/// Every template on every argument list drawn from the blocks.
inline std::set<ConstraintInstance> brute_force(const std::vector<Block>& blocks, std::size_t max_addends = 4)
{
    std::vector<const Vector*> all;
    for (const auto& b : blocks)
        for (const auto& v : b.vectors)
            all.push_back(&v);

    std::set<ConstraintInstance> out;
    const auto add = [&](const std::string& name, const std::vector<const Vector*>& args) {
        if (!satisfied(name, args))
            return;
        ConstraintInstance c{name, {}};
        for (const auto* v : args)
            c.args.push_back(v->ref);
        out.insert(c);
    };

    for (const auto& b : blocks)
        for (std::size_t start = 0; start < b.vectors.size(); ++start)
            for (std::size_t len = 2; len <= max_addends && start + len <= b.vectors.size(); ++len)
                for (const auto* v : all) {
                    std::vector<const Vector*> args{v};
                    bool inside = false;
                    for (std::size_t i = start; i < start + len; ++i) {
                        args.push_back(&b.vectors[i]);
                        inside = inside || &b.vectors[i] == v;
                    }
                    if (inside)
                        continue;
                    for (const char* name : {"ROW_SUM", "MAX", "MIN", "AVERAGE"})
                        add(name, args);
                }
    for (const auto* a : all)
        for (const auto* b : all)
            for (const auto* c : all)
                if (a != b && a != c && b != c) {
                    add("DIFFERENCE", {a, b, c});
                    if (b->ref < c->ref)
                        add("PRODUCT", {a, b, c});
                }
    for (const auto* a : all) {
        add("ASCENDING", {a});
        add("ALLDIFFERENT", {a});
        for (const auto* b : all) {
            if (a->ref < b->ref)
                add("EQUAL", {a, b});
            if (a != b)
                add("FOREIGNKEY", {a, b});
        }
    }
    return out;
}

} // namespace oracle
