#include "sketchsci/sketch.hpp"

#include "sketchsci/error.hpp"

#include <map>

namespace sketchsci {

std::string_view to_string(Role role)
{
    switch (role) {
    case Role::group: return "group";
    case Role::positive: return "positive";
    case Role::negative: return "negative";
    case Role::input: return "input";
    case Role::target: return "target";
    case Role::exclude: return "exclude";
    }
    return "group";
}

Role role_from_string(std::string_view text)
{
    for (Role role : {Role::group, Role::positive, Role::negative, Role::input, Role::target, Role::exclude})
        if (to_string(role) == text)
            return role;
    throw Error(ErrorCode::validation, "unknown coloring role '" + std::string(text) + "'");
}

std::set<Role> Sketch::roles() const
{
    std::set<Role> out;
    for (const auto& coloring : colorings)
        out.insert(coloring.role);
    return out;
}

const Coloring* Sketch::coloring_of(const CellRef& cell) const
{
    for (const auto& coloring : colorings)
        if (coloring.cells.contains(cell))
            return &coloring;
    return nullptr;
}

std::set<CellRef> Sketch::cells_with_role(Role role) const
{
    std::set<CellRef> out;
    for (const auto& coloring : colorings)
        if (coloring.role == role)
            out.insert(coloring.cells.begin(), coloring.cells.end());
    return out;
}

namespace {
    std::string describe(const CellRef& cell)
    {
        return cell.table + "[" + std::to_string(cell.row + 1) + "," + std::to_string(cell.col + 1) + "]";
    }
} // namespace

void validate_sketch(const Sketch& sketch, const Workbook& workbook)
{
    std::map<CellRef, std::string> owner;
    for (const auto& coloring : sketch.colorings) {
        for (const auto& cell : coloring.cells) {
            const Table* table = workbook.find(cell.table);
            if (!table || cell.row >= table->row_count() || cell.col >= table->col_count())
                throw Error(ErrorCode::validation, "sketch cell " + describe(cell) + " does not resolve");
            auto [it, inserted] = owner.emplace(cell, coloring.color);
            if (!inserted)
                throw Error(ErrorCode::validation,
                    "cell " + describe(cell) + " carries two colors ('" + it->second + "' and '" + coloring.color
                        + "')");
        }
    }
    for (const auto& cell : sketch.machine_generated)
        if (!owner.contains(cell))
            throw Error(ErrorCode::validation, "machine-generated cell " + describe(cell) + " has no color");
}

void require_roles(const Sketch& sketch, const std::set<Role>& allowed, std::string_view task)
{
    for (const auto& coloring : sketch.colorings) {
        if (!allowed.contains(coloring.role)) {
            std::string expected;
            for (Role role : allowed)
                expected += (expected.empty() ? "" : ", ") + std::string(to_string(role));
            throw Error(ErrorCode::task_role,
                std::string(task) + " does not accept role '" + std::string(to_string(coloring.role)) + "'",
                "expected roles: " + expected);
        }
    }
}

} // namespace sketchsci
