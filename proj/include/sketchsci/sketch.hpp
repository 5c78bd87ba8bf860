#pragma once

#include "sketchsci/workbook.hpp"

#include <compare>
#include <set>
#include <string>
#include <vector>

namespace sketchsci {

/// 0-based internally; files and user-facing output are 1-based.
struct CellRef {
    std::string table;
    std::size_t row = 0;
    std::size_t col = 0;

    friend bool operator==(const CellRef&, const CellRef&) = default;
    friend auto operator<=>(const CellRef&, const CellRef&) = default;
};

enum class Role { group, positive, negative, input, target, exclude };

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

struct Coloring {
    std::string color;
    Role role = Role::group;
    std::set<CellRef> cells;

    friend bool operator==(const Coloring&, const Coloring&) = default;
};

struct Sketch {
    std::vector<Coloring> colorings;
    /// Cells whose color was assigned by the engine (rendered as light shades).
    std::set<CellRef> machine_generated;

    bool empty() const { return colorings.empty(); }
    std::set<Role> roles() const;
    /// Coloring that owns the cell, or nullptr.
    const Coloring* coloring_of(const CellRef& cell) const;
    std::set<CellRef> cells_with_role(Role role) const;

    friend bool operator==(const Sketch&, const Sketch&) = default;
};

/// Throws validation errors: unresolvable cells, a cell carrying two
/// colors, machine_generated cells outside every coloring.
void validate_sketch(const Sketch& sketch, const Workbook& workbook);

/// Throws a task-role error unless every coloring role is in `allowed`.
void require_roles(const Sketch& sketch, const std::set<Role>& allowed, std::string_view task);

} // namespace sketchsci
